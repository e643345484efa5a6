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

#ifndef DISCO_MODELS_H_
#define DISCO_MODELS_H_

// Differentiable score models usable both as continuous oracles (score and
// input gradient at blended embeddings) and, through the set-oracle
// adaptors, as set functions over substitutions.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disco/candidate_set.h"
#include "disco/dataset.h"
#include "disco/embedding.h"
#include "disco/oracle.h"
#include "disco/setfn.h"
#include "disco/types.h"

namespace disco {

enum class Activation {
  kIdentity,
  kRelu,
  kTanh,
  kSigmoid,
  kSoftplus,
  // 1 - exp(-x): concave and non-decreasing on the whole real line.
  kOneMinusExp,
};

double ApplyActivation(Activation a, double x);
double ActivationDerivative(Activation a, double x);
std::string ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

// Squared distance between the aggregated input and a target vector.
class MeanEmbeddingModel : public DifferentiableOracle {
 public:
  enum class Direction { kMaximizeDistance, kMinimizeDistance };
  enum class Aggregation { kMean, kSum };

  MeanEmbeddingModel(Vector target, Direction direction,
                     Aggregation aggregation = Aggregation::kMean);

  int dimension() const override { return static_cast<int>(target_.size()); }
  double Score(const Embeddings& inputs) const override;
  double ScoreAndGradient(const Embeddings& inputs,
                          Embeddings* gradient) const override;

  // Unsigned ||aggregate - target||^2.
  double Distance(const Embeddings& inputs) const;

 private:
  Vector target_;
  Direction direction_;
  Aggregation aggregation_;
};

// One-layer windowed CNN: c_ij = act(w_j . x_{window i} + b_j), max pooling
// over windows per filter, then a linear readout.
struct WcnnModel : public DifferentiableOracle {
  int embedding_dim = 0;
  int window = 1;
  int stride = 1;
  // filters[j] has embedding_dim * window entries.
  std::vector<Vector> filters;
  Vector filter_bias;
  Vector output_weights;
  double output_bias = 0.0;
  Activation activation = Activation::kIdentity;

  // Throws ShapeError.
  void Validate() const;
  int NumWindows(int length) const;

  int dimension() const override { return embedding_dim; }
  double Score(const Embeddings& inputs) const override;
  // Gradient flows through the pooled window of each filter; pooling ties
  // go to the lowest window index.
  double ScoreAndGradient(const Embeddings& inputs,
                          Embeddings* gradient) const override;
};

// Scalar-hidden RNN: h_t = act(w h_{t-1} + m . x_t + b), h_0 = 0,
// score = y h_T.
struct RnnModel : public DifferentiableOracle {
  double recurrence = 1.0;
  Vector input_weights;
  double bias = 0.0;
  double output_weight = 1.0;
  Activation activation = Activation::kOneMinusExp;

  int dimension() const override {
    return static_cast<int>(input_weights.size());
  }
  double Score(const Embeddings& inputs) const override;
  double ScoreAndGradient(const Embeddings& inputs,
                          Embeddings* gradient) const override;
};

// Softmax regression on the mean input embedding.
class LinearVictim {
 public:
  LinearVictim() = default;
  // Zero weights: uniform predictions.
  LinearVictim(std::vector<std::string> label_names, int dimension);

  int num_classes() const { return static_cast<int>(label_names_.size()); }
  int dimension() const { return dimension_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  bool trained() const { return trained_; }
  void set_trained(bool trained) { trained_ = trained; }

  // Row c holds the weights of class c.
  std::vector<Vector>& mutable_weights() { return weights_; }
  const std::vector<Vector>& weights() const { return weights_; }
  Vector& mutable_bias() { return bias_; }
  const Vector& bias() const { return bias_; }

  Vector Logits(const Vector& feature) const;
  Vector Probabilities(const Vector& feature) const;
  // argmax of the logits, ties to the lowest class.
  int Predict(const Vector& feature) const;
  // Negative log-likelihood of `label`.
  double Loss(const Vector& feature, int label) const;

  static Vector MeanFeature(const Embeddings& inputs);
  // Throws UnembeddedToken for ids outside the table.
  static Vector TokenFeature(std::span<const int> tokens,
                             const EmbeddingTable& table);

  // Versioned text format: header line, shape line, label line, then one
  // `bias w_1 ... w_d` row per class.
  void Save(std::ostream& out) const;
  void SaveFile(const std::string& path) const;
  static LinearVictim Load(std::istream& in);
  static LinearVictim LoadFile(const std::string& path);

 private:
  std::vector<std::string> label_names_;
  int dimension_ = 0;
  std::vector<Vector> weights_;
  Vector bias_;
  bool trained_ = false;
};

// Score = victim loss of a fixed label at the mean of the inputs. Maximizing
// it is the attack objective.
class VictimLossOracle : public DifferentiableOracle {
 public:
  VictimLossOracle(const LinearVictim& victim, int label);

  int dimension() const override { return victim_.dimension(); }
  double Score(const Embeddings& inputs) const override;
  double ScoreAndGradient(const Embeddings& inputs,
                          Embeddings* gradient) const override;

 private:
  const LinearVictim& victim_;
  int label_;
};

struct TrainOptions {
  int epochs = 200;
  double rate = 0.5;
  int batch_size = 16;
  std::uint64_t seed = 0;
};

struct TrainResult {
  LinearVictim victim;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

// Mini-batch gradient descent from zero weights with a seeded shuffle.
// Throws InvalidArgument with fewer than two classes, UnembeddedToken for
// tokens outside the table.
TrainResult TrainLinearVictim(const Dataset& dataset,
                              const EmbeddingTable& embeddings,
                              const TrainOptions& options);

double Accuracy(const LinearVictim& victim, const Dataset& dataset,
                const EmbeddingTable& embeddings);

// Set function over positions: f(X) = max over transformations supported on
// X of the model score, minus the score of the original input.
class TransformationSetOracle : public SetOracle {
 public:
  enum class InnerMax {
    // Direct evaluation when every position has at most one replacement.
    kAuto,
    kAlways,
  };

  TransformationSetOracle(const DifferentiableOracle& model,
                          CandidateSet candidates,
                          InnerMax inner_max = InnerMax::kAuto);

  double Evaluate(std::span<const int> positions) const override;
  // The maximizing transformation (lowest index vector among ties).
  TransformationIndex BestTransformation(
      std::span<const int> positions) const;
  double baseline_score() const { return baseline_; }
  int num_positions() const { return candidates_.num_positions(); }
  const CandidateSet& candidates() const { return candidates_; }

 private:
  std::pair<TransformationIndex, double> Maximize(
      std::span<const int> positions) const;

  const DifferentiableOracle& model_;
  CandidateSet candidates_;
  bool direct_;
  double baseline_;
};

// Wraps a model as a set function over the positions of `candidates`.
TransformationSetOracle AsSetOracle(
    const DifferentiableOracle& model, const CandidateSet& candidates,
    TransformationSetOracle::InnerMax inner_max =
        TransformationSetOracle::InnerMax::kAuto);

// Set function over individual substitutions: one element per
// (position, slot >= 1). A subset applies its substitutions directly and
// scores the result minus the original score. Subsets with two elements at
// one position throw InvalidArgument.
class SubstitutionSetOracle : public SetOracle {
 public:
  SubstitutionSetOracle(const DifferentiableOracle& model,
                        const CandidateSet& candidates);

  double Evaluate(std::span<const int> subset) const override;
  int ground_size() const { return static_cast<int>(decode_.size()); }
  // Element ids grouped by position, in position order.
  const std::vector<std::vector<int>>& position_groups() const {
    return groups_;
  }
  TransformationIndex ToIndex(std::span<const int> subset) const;
  double baseline_score() const { return baseline_; }

 private:
  const DifferentiableOracle& model_;
  const CandidateSet& candidates_;
  std::vector<std::pair<int, int>> decode_;
  std::vector<std::vector<int>> groups_;
  double baseline_;
};

struct FilteredCandidates {
  CandidateSet candidates;
  int dropped = 0;
  // Set when no replacement survives anywhere.
  std::string warning;
};

// Keeps a replacement only if substituting it alone strictly increases the
// model score.
FilteredCandidates FilterOutputIncreasing(const DifferentiableOracle& model,
                                          const CandidateSet& candidates);

// Subset-sum reduction: position i holds [s_i, 0, ...] with `replacements`
// all-zero candidates, target [W, 0, ...], summed aggregation, minimized
// distance. The best achievable distance is 0 iff some subset of s sums
// to W.
struct SubsetSumInstance {
  EmbeddingTable table;
  MeanEmbeddingModel model;
  CandidateSet candidates;

  // Squared distance of the sum selected by `index` to the target.
  double Distance(const TransformationIndex& index) const;
};

SubsetSumInstance MakeSubsetSumInstance(std::span<const long long> values,
                                        long long target, int dimension,
                                        int replacements = 1);

}  // namespace disco

#endif  // DISCO_MODELS_H_
