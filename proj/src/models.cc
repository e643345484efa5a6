// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "disco/models.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "disco/errors.h"

namespace disco {

double ApplyActivation(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity:
      return x;
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::kSoftplus:
      return x > 30.0 ? x : std::log1p(std::exp(x));
    case Activation::kOneMinusExp:
      return -std::expm1(-x);
  }
  return x;
}

double ActivationDerivative(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity:
      return 1.0;
    case Activation::kRelu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::kSigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::kSoftplus:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::kOneMinusExp:
      return std::exp(-x);
  }
  return 1.0;
}

std::string ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kSoftplus:
      return "softplus";
    case Activation::kOneMinusExp:
      return "one_minus_exp";
  }
  return "identity";
}

Activation ParseActivation(const std::string& name) {
  for (Activation a :
       {Activation::kIdentity, Activation::kRelu, Activation::kTanh,
        Activation::kSigmoid, Activation::kSoftplus,
        Activation::kOneMinusExp}) {
    if (ActivationName(a) == name) return a;
  }
  throw InvalidArgument("unknown activation '" + name + "'");
}

namespace {

void CheckInputs(const Embeddings& inputs, int dim) {
  if (inputs.empty()) throw ShapeError("empty input sequence");
  for (const auto& x : inputs) {
    if (static_cast<int>(x.size()) != dim) {
      throw DimensionMismatch("input dimension " + std::to_string(x.size()) +
                              " does not match model dimension " +
                              std::to_string(dim));
    }
  }
}

Embeddings ZerosLike(const Embeddings& inputs) {
  Embeddings out(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out[i].assign(inputs[i].size(), 0.0);
  }
  return out;
}

}  // namespace

// MeanEmbeddingModel ---------------------------------------------------------

MeanEmbeddingModel::MeanEmbeddingModel(Vector target, Direction direction,
                                       Aggregation aggregation)
    : target_(std::move(target)),
      direction_(direction),
      aggregation_(aggregation) {
  if (target_.empty()) throw DimensionMismatch("target vector is empty");
}

double MeanEmbeddingModel::Distance(const Embeddings& inputs) const {
  Embeddings unused;
  const double score = ScoreAndGradient(inputs, &unused);
  return direction_ == Direction::kMaximizeDistance ? score : -score;
}

double MeanEmbeddingModel::Score(const Embeddings& inputs) const {
  Embeddings unused;
  return ScoreAndGradient(inputs, &unused);
}

double MeanEmbeddingModel::ScoreAndGradient(const Embeddings& inputs,
                                            Embeddings* gradient) const {
  const int dim = dimension();
  CheckInputs(inputs, dim);
  const double scale = aggregation_ == Aggregation::kMean
                           ? 1.0 / static_cast<double>(inputs.size())
                           : 1.0;
  Vector diff(dim, 0.0);
  for (const auto& x : inputs) {
    for (int d = 0; d < dim; ++d) diff[d] += scale * x[d];
  }
  double value = 0.0;
  for (int d = 0; d < dim; ++d) {
    diff[d] -= target_[d];
    value += diff[d] * diff[d];
  }
  const double sign = direction_ == Direction::kMaximizeDistance ? 1.0 : -1.0;
  *gradient = ZerosLike(inputs);
  for (auto& g : *gradient) {
    for (int d = 0; d < dim; ++d) g[d] = sign * 2.0 * scale * diff[d];
  }
  return sign * value;
}

// WcnnModel ------------------------------------------------------------------

void WcnnModel::Validate() const {
  if (embedding_dim < 1 || window < 1 || stride < 1) {
    throw ShapeError("W-CNN needs positive dimension, window and stride");
  }
  if (filters.empty()) throw ShapeError("W-CNN needs at least one filter");
  if (filter_bias.size() != filters.size() ||
      output_weights.size() != filters.size()) {
    throw ShapeError("W-CNN bias/readout sizes differ from the filter count");
  }
  for (const auto& f : filters) {
    if (static_cast<int>(f.size()) != embedding_dim * window) {
      throw ShapeError("W-CNN filter must have embedding_dim * window entries");
    }
  }
}

int WcnnModel::NumWindows(int length) const {
  if (length < window || (length - window) % stride != 0) {
    throw ShapeError("sequence length " + std::to_string(length) +
                     " is not tiled by window " + std::to_string(window) +
                     " and stride " + std::to_string(stride));
  }
  return (length - window) / stride + 1;
}

double WcnnModel::Score(const Embeddings& inputs) const {
  Embeddings unused;
  return ScoreAndGradient(inputs, &unused);
}

double WcnnModel::ScoreAndGradient(const Embeddings& inputs,
                                   Embeddings* gradient) const {
  Validate();
  CheckInputs(inputs, embedding_dim);
  const int windows = NumWindows(static_cast<int>(inputs.size()));
  *gradient = ZerosLike(inputs);
  double value = output_bias;
  for (std::size_t j = 0; j < filters.size(); ++j) {
    const Vector& w = filters[j];
    int best_window = -1;
    double best_pre = 0.0, best_act = 0.0;
    for (int i = 0; i < windows; ++i) {
      double pre = filter_bias[j];
      for (int h = 0; h < window; ++h) {
        const Vector& x = inputs[i * stride + h];
        for (int d = 0; d < embedding_dim; ++d) {
          pre += w[h * embedding_dim + d] * x[d];
        }
      }
      const double act = ApplyActivation(activation, pre);
      if (best_window < 0 || act > best_act) {
        best_window = i;
        best_pre = pre;
        best_act = act;
      }
    }
    value += output_weights[j] * best_act;
    const double upstream =
        output_weights[j] * ActivationDerivative(activation, best_pre);
    for (int h = 0; h < window; ++h) {
      Vector& g = (*gradient)[best_window * stride + h];
      for (int d = 0; d < embedding_dim; ++d) {
        g[d] += upstream * w[h * embedding_dim + d];
      }
    }
  }
  return value;
}

// RnnModel -------------------------------------------------------------------

double RnnModel::Score(const Embeddings& inputs) const {
  Embeddings unused;
  return ScoreAndGradient(inputs, &unused);
}

double RnnModel::ScoreAndGradient(const Embeddings& inputs,
                                  Embeddings* gradient) const {
  const int dim = dimension();
  if (dim < 1) throw ShapeError("RNN input weights are empty");
  CheckInputs(inputs, dim);
  const std::size_t steps = inputs.size();
  Vector pre(steps);
  double hidden = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    double z = recurrence * hidden + bias;
    for (int d = 0; d < dim; ++d) z += input_weights[d] * inputs[t][d];
    pre[t] = z;
    hidden = ApplyActivation(activation, z);
  }
  *gradient = ZerosLike(inputs);
  // Backward through time: carry d(score)/d(h_t).
  double d_hidden = output_weight;
  for (std::size_t t = steps; t-- > 0;) {
    const double d_pre = d_hidden * ActivationDerivative(activation, pre[t]);
    for (int d = 0; d < dim; ++d) (*gradient)[t][d] = d_pre * input_weights[d];
    d_hidden = d_pre * recurrence;
  }
  return output_weight * hidden;
}

// LinearVictim ---------------------------------------------------------------

LinearVictim::LinearVictim(std::vector<std::string> label_names, int dimension)
    : label_names_(std::move(label_names)),
      dimension_(dimension),
      weights_(label_names_.size(), Vector(dimension, 0.0)),
      bias_(label_names_.size(), 0.0) {
  if (dimension < 1) throw InvalidArgument("victim dimension must be >= 1");
}

Vector LinearVictim::Logits(const Vector& feature) const {
  if (static_cast<int>(feature.size()) != dimension_) {
    throw DimensionMismatch("feature dimension does not match the victim");
  }
  Vector logits(num_classes());
  for (int c = 0; c < num_classes(); ++c) {
    double s = bias_[c];
    for (int d = 0; d < dimension_; ++d) s += weights_[c][d] * feature[d];
    logits[c] = s;
  }
  return logits;
}

Vector LinearVictim::Probabilities(const Vector& feature) const {
  Vector z = Logits(feature);
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
  return z;
}

int LinearVictim::Predict(const Vector& feature) const {
  const Vector z = Logits(feature);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double LinearVictim::Loss(const Vector& feature, int label) const {
  const Vector z = Logits(feature);
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - top);
  return std::log(total) + top - z.at(label);
}

Vector LinearVictim::MeanFeature(const Embeddings& inputs) {
  if (inputs.empty()) throw ShapeError("empty input sequence");
  Vector mean(inputs[0].size(), 0.0);
  for (const auto& x : inputs) {
    if (x.size() != mean.size()) throw DimensionMismatch("ragged inputs");
    for (std::size_t d = 0; d < x.size(); ++d) mean[d] += x[d];
  }
  for (double& v : mean) v /= static_cast<double>(inputs.size());
  return mean;
}

Vector LinearVictim::TokenFeature(std::span<const int> tokens,
                                  const EmbeddingTable& table) {
  Embeddings inputs;
  inputs.reserve(tokens.size());
  for (int t : tokens) {
    if (t < 0 || t >= table.size()) {
      throw UnembeddedToken("token id " + std::to_string(t) +
                            " has no embedding");
    }
    inputs.push_back(table.vector(t));
  }
  return MeanFeature(inputs);
}

namespace {
constexpr char kVictimHeader[] = "disco-linear-victim v1";
}  // namespace

void LinearVictim::Save(std::ostream& out) const {
  out << kVictimHeader << '\n';
  out << "classes " << num_classes() << " dim " << dimension_ << " trained "
      << (trained_ ? 1 : 0) << '\n';
  out << "labels";
  for (const auto& name : label_names_) out << ' ' << name;
  out << '\n';
  char buf[32];
  for (int c = 0; c < num_classes(); ++c) {
    std::snprintf(buf, sizeof(buf), "%.17g", bias_[c]);
    out << buf;
    for (double w : weights_[c]) {
      std::snprintf(buf, sizeof(buf), " %.17g", w);
      out << buf;
    }
    out << '\n';
  }
}

void LinearVictim::SaveFile(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  Save(out);
}

LinearVictim LinearVictim::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kVictimHeader) {
    throw IoFailure("not a linear victim file (bad header)");
  }
  std::string w_classes, w_dim, w_trained;
  int classes = 0, dim = 0, trained = 0;
  if (!std::getline(in, line)) throw IoFailure("victim file truncated");
  std::istringstream shape(line);
  if (!(shape >> w_classes >> classes >> w_dim >> dim >> w_trained >>
        trained) ||
      w_classes != "classes" || w_dim != "dim" || w_trained != "trained" ||
      classes < 1 || dim < 1) {
    throw IoFailure("bad victim shape line");
  }
  if (!std::getline(in, line)) throw IoFailure("victim file truncated");
  std::istringstream labels(line);
  std::string word;
  labels >> word;
  if (word != "labels") throw IoFailure("bad victim label line");
  std::vector<std::string> names;
  while (labels >> word) names.push_back(word);
  if (static_cast<int>(names.size()) != classes) {
    throw IoFailure("victim label count does not match classes");
  }
  LinearVictim victim(std::move(names), dim);
  for (int c = 0; c < classes; ++c) {
    if (!std::getline(in, line)) throw IoFailure("victim file truncated");
    std::istringstream row(line);
    if (!(row >> victim.bias_[c])) throw IoFailure("bad victim weight row");
    for (int d = 0; d < dim; ++d) {
      if (!(row >> victim.weights_[c][d])) {
        throw IoFailure("bad victim weight row");
      }
    }
  }
  victim.trained_ = trained != 0;
  return victim;
}

LinearVictim LinearVictim::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  return Load(in);
}

VictimLossOracle::VictimLossOracle(const LinearVictim& victim, int label)
    : victim_(victim), label_(label) {
  if (label < 0 || label >= victim.num_classes()) {
    throw InvalidArgument("label out of range for the victim");
  }
}

double VictimLossOracle::Score(const Embeddings& inputs) const {
  return victim_.Loss(LinearVictim::MeanFeature(inputs), label_);
}

double VictimLossOracle::ScoreAndGradient(const Embeddings& inputs,
                                          Embeddings* gradient) const {
  CheckInputs(inputs, victim_.dimension());
  const Vector feature = LinearVictim::MeanFeature(inputs);
  Vector residual = victim_.Probabilities(feature);
  residual[label_] -= 1.0;
  Vector d_feature(victim_.dimension(), 0.0);
  for (int c = 0; c < victim_.num_classes(); ++c) {
    for (int d = 0; d < victim_.dimension(); ++d) {
      d_feature[d] += residual[c] * victim_.weights()[c][d];
    }
  }
  const double scale = 1.0 / static_cast<double>(inputs.size());
  *gradient = ZerosLike(inputs);
  for (auto& g : *gradient) {
    for (int d = 0; d < victim_.dimension(); ++d) g[d] = scale * d_feature[d];
  }
  return victim_.Loss(feature, label_);
}

TrainResult TrainLinearVictim(const Dataset& dataset,
                              const EmbeddingTable& embeddings,
                              const TrainOptions& options) {
  if (dataset.num_classes() < 2) {
    throw InvalidArgument("training needs at least two classes");
  }
  if (dataset.examples.empty()) throw InvalidArgument("dataset is empty");
  if (options.epochs < 0 || options.batch_size < 1 || !(options.rate > 0.0)) {
    throw InvalidArgument("bad training options");
  }
  std::vector<Vector> features;
  features.reserve(dataset.examples.size());
  for (const auto& ex : dataset.examples) {
    features.push_back(LinearVictim::TokenFeature(ex.tokens, embeddings));
  }

  TrainResult result;
  LinearVictim& victim = result.victim;
  victim = LinearVictim(dataset.label_names, embeddings.dimension());
  const int classes = victim.num_classes();
  const int dim = victim.dimension();
  std::mt19937_64 rng(options.seed);
  std::vector<int> order(features.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += options.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + options.batch_size);
      std::vector<Vector> grad_w(classes, Vector(dim, 0.0));
      Vector grad_b(classes, 0.0);
      for (std::size_t r = start; r < stop; ++r) {
        const Vector& x = features[order[r]];
        Vector residual = victim.Probabilities(x);
        residual[dataset.examples[order[r]].label] -= 1.0;
        for (int c = 0; c < classes; ++c) {
          grad_b[c] += residual[c];
          for (int d = 0; d < dim; ++d) grad_w[c][d] += residual[c] * x[d];
        }
      }
      const double step = options.rate / static_cast<double>(stop - start);
      for (int c = 0; c < classes; ++c) {
        victim.mutable_bias()[c] -= step * grad_b[c];
        for (int d = 0; d < dim; ++d) {
          victim.mutable_weights()[c][d] -= step * grad_w[c][d];
        }
      }
    }
  }
  victim.set_trained(options.epochs > 0);

  int correct = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int label = dataset.examples[i].label;
    correct += victim.Predict(features[i]) == label;
    loss += victim.Loss(features[i], label);
  }
  result.train_accuracy =
      static_cast<double>(correct) / static_cast<double>(features.size());
  result.final_loss = loss / static_cast<double>(features.size());
  return result;
}

double Accuracy(const LinearVictim& victim, const Dataset& dataset,
                const EmbeddingTable& embeddings) {
  if (dataset.examples.empty()) throw InvalidArgument("dataset is empty");
  int correct = 0;
  for (const auto& ex : dataset.examples) {
    correct += victim.Predict(LinearVictim::TokenFeature(ex.tokens,
                                                         embeddings)) ==
               ex.label;
  }
  return static_cast<double>(correct) /
         static_cast<double>(dataset.examples.size());
}

// Set-oracle adaptors ----------------------------------------------------------

TransformationSetOracle::TransformationSetOracle(
    const DifferentiableOracle& model, CandidateSet candidates,
    InnerMax inner_max)
    : model_(model), candidates_(std::move(candidates)) {
  candidates_.Validate();
  direct_ = inner_max == InnerMax::kAuto;
  for (const auto& slots : candidates_.positions) {
    if (slots.size() > 2) direct_ = false;
  }
  baseline_ = model_.Score(candidates_.Original());
}

std::pair<TransformationIndex, double> TransformationSetOracle::Maximize(
    std::span<const int> positions) const {
  const int n = candidates_.num_positions();
  for (int p : positions) {
    if (p < 0 || p >= n) {
      throw InvalidArgument("position " + std::to_string(p) +
                            " outside the candidate set");
    }
  }
  TransformationIndex index(n, 0);
  if (direct_) {
    for (int p : positions) {
      index[p] = candidates_.positions[p].size() > 1 ? 1 : 0;
    }
    return {index, model_.Score(candidates_.Select(index))};
  }
  // Odometer over the slots of the selected positions, lexicographic order.
  TransformationIndex best = index;
  double best_score = model_.Score(candidates_.Select(index));
  while (true) {
    int r = static_cast<int>(positions.size()) - 1;
    for (; r >= 0; --r) {
      const int p = positions[r];
      if (index[p] + 1 < static_cast<int>(candidates_.positions[p].size())) {
        ++index[p];
        break;
      }
      index[p] = 0;
    }
    if (r < 0) break;
    const double score = model_.Score(candidates_.Select(index));
    if (score > best_score) {
      best_score = score;
      best = index;
    }
  }
  return {best, best_score};
}

double TransformationSetOracle::Evaluate(std::span<const int> positions) const {
  if (positions.empty()) return 0.0;
  return Maximize(positions).second - baseline_;
}

TransformationIndex TransformationSetOracle::BestTransformation(
    std::span<const int> positions) const {
  return Maximize(positions).first;
}

TransformationSetOracle AsSetOracle(
    const DifferentiableOracle& model, const CandidateSet& candidates,
    TransformationSetOracle::InnerMax inner_max) {
  return TransformationSetOracle(model, candidates, inner_max);
}

SubstitutionSetOracle::SubstitutionSetOracle(const DifferentiableOracle& model,
                                             const CandidateSet& candidates)
    : model_(model), candidates_(candidates) {
  candidates_.Validate();
  groups_.resize(candidates_.num_positions());
  for (int i = 0; i < candidates_.num_positions(); ++i) {
    for (int j = 1; j < static_cast<int>(candidates_.positions[i].size());
         ++j) {
      groups_[i].push_back(static_cast<int>(decode_.size()));
      decode_.emplace_back(i, j);
    }
  }
  baseline_ = model_.Score(candidates_.Original());
}

TransformationIndex SubstitutionSetOracle::ToIndex(
    std::span<const int> subset) const {
  TransformationIndex index(candidates_.num_positions(), 0);
  for (int e : subset) {
    if (e < 0 || e >= ground_size()) {
      throw InvalidArgument("substitution id out of range");
    }
    const auto [pos, slot] = decode_[e];
    if (index[pos] != 0) {
      throw InvalidArgument("two substitutions at position " +
                            std::to_string(pos));
    }
    index[pos] = slot;
  }
  return index;
}

double SubstitutionSetOracle::Evaluate(std::span<const int> subset) const {
  if (subset.empty()) return 0.0;
  return model_.Score(candidates_.Select(ToIndex(subset))) - baseline_;
}

FilteredCandidates FilterOutputIncreasing(const DifferentiableOracle& model,
                                          const CandidateSet& candidates) {
  candidates.Validate();
  FilteredCandidates out;
  const double base = model.Score(candidates.Original());
  TransformationIndex index(candidates.num_positions(), 0);
  bool any_left = false;
  for (int i = 0; i < candidates.num_positions(); ++i) {
    const auto& slots = candidates.positions[i];
    std::vector<Candidate> kept{slots[0]};
    for (int j = 1; j < static_cast<int>(slots.size()); ++j) {
      index[i] = j;
      const double score = model.Score(candidates.Select(index));
      if (score > base) {
        kept.push_back(slots[j]);
        any_left = true;
      } else {
        ++out.dropped;
      }
    }
    index[i] = 0;
    out.candidates.positions.push_back(std::move(kept));
  }
  if (!any_left) {
    out.warning = "no candidate increases the model output; ground set is "
                  "vacuous";
  }
  return out;
}

double SubsetSumInstance::Distance(const TransformationIndex& index) const {
  return model.Distance(candidates.Select(index));
}

SubsetSumInstance MakeSubsetSumInstance(std::span<const long long> values,
                                        long long target, int dimension,
                                        int replacements) {
  if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
  if (values.empty()) throw InvalidArgument("subset-sum needs values");
  if (replacements < 1) throw InvalidArgument("replacements must be >= 1");
  EmbeddingTable table(dimension);
  CandidateSet candidates;
  std::vector<int> zero_ids;
  for (int r = 0; r < replacements; ++r) {
    zero_ids.push_back(
        table.Add("zero_" + std::to_string(r), Vector(dimension, 0.0)));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    Vector v(dimension, 0.0);
    v[0] = static_cast<double>(values[i]);
    const int id = table.Add("s_" + std::to_string(i), v);
    std::vector<Candidate> slots{{id, v}};
    for (int z : zero_ids) slots.push_back({z, table.vector(z)});
    candidates.positions.push_back(std::move(slots));
  }
  Vector goal(dimension, 0.0);
  goal[0] = static_cast<double>(target);
  return SubsetSumInstance{
      std::move(table),
      MeanEmbeddingModel(std::move(goal),
                         MeanEmbeddingModel::Direction::kMinimizeDistance,
                         MeanEmbeddingModel::Aggregation::kSum),
      std::move(candidates)};
}

}  // namespace disco
