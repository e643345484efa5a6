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

#include "disco/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"

#include "disco/errors.h"
#include "disco/setfn.h"

namespace disco {

// Synthetic corpus ------------------------------------------------------------

void SyntheticCorpusConfig::Validate() const {
  if (num_classes < 2) throw InvalidArgument("need at least two classes");
  if (dimension <= num_classes) {
    throw InvalidArgument("dimension must exceed the number of classes");
  }
  if (min_length < 1 || max_length < min_length) {
    throw InvalidArgument("bad document length range");
  }
  if (polar_per_document < 1 || polar_per_document > min_length) {
    throw InvalidArgument("polar tokens per document must be in "
                          "[1, min_length]");
  }
  if (num_examples < num_classes) {
    throw InvalidArgument("need at least one example per class");
  }
  if (!(polarity > 0.0) || !(polar_fraction > 0.0 && polar_fraction < 1.0)) {
    throw InvalidArgument("bad polarity or polar fraction");
  }
  const int groups = static_cast<int>(vocab_size * polar_fraction) /
                     num_classes;
  if (groups < 1 || vocab_size - groups * num_classes < 1) {
    throw InvalidArgument("vocabulary too small for the polar groups");
  }
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusConfig& config) {
  config.Validate();
  const int classes = config.num_classes;
  const int groups =
      static_cast<int>(config.vocab_size * config.polar_fraction) / classes;
  const int neutral = config.vocab_size - groups * classes;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> spread(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.05);

  SyntheticCorpus corpus;
  corpus.table = EmbeddingTable(config.dimension);
  // polar[c][g] is the token id of class c in group g.
  std::vector<std::vector<int>> polar(classes, std::vector<int>(groups));
  for (int g = 0; g < groups; ++g) {
    Vector shared(config.dimension, 0.0);
    for (int d = classes; d < config.dimension; ++d) shared[d] = spread(rng);
    for (int c = 0; c < classes; ++c) {
      Vector v = shared;
      for (int a = 0; a < classes; ++a) v[a] = jitter(rng);
      v[c] += config.polarity;
      polar[c][g] = corpus.table.Add(
          "p" + std::to_string(g) + "_c" + std::to_string(c), std::move(v));
    }
    for (int c = 0; c < classes; ++c) {
      for (int c2 = c + 1; c2 < classes; ++c2) {
        corpus.lexicon.AddSynonym(polar[c][g], polar[c2][g]);
      }
    }
  }
  std::vector<int> neutral_ids;
  for (int i = 0; i < neutral; ++i) {
    Vector v(config.dimension, 0.0);
    for (int a = 0; a < classes; ++a) v[a] = jitter(rng);
    for (int d = classes; d < config.dimension; ++d) v[d] = spread(rng);
    neutral_ids.push_back(
        corpus.table.Add("w" + std::to_string(i), std::move(v)));
  }

  for (int c = 0; c < classes; ++c) {
    corpus.dataset.label_names.push_back("c" + std::to_string(c));
  }
  std::uniform_int_distribution<int> length(config.min_length,
                                            config.max_length);
  std::uniform_int_distribution<int> pick_group(0, groups - 1);
  std::uniform_int_distribution<int> pick_neutral(0, neutral - 1);
  for (int i = 0; i < config.num_examples; ++i) {
    Example ex;
    ex.label = i % classes;
    const int len = length(rng);
    for (int t = 0; t < config.polar_per_document; ++t) {
      ex.tokens.push_back(polar[ex.label][pick_group(rng)]);
    }
    while (static_cast<int>(ex.tokens.size()) < len) {
      ex.tokens.push_back(neutral_ids[pick_neutral(rng)]);
    }
    std::shuffle(ex.tokens.begin(), ex.tokens.end(), rng);
    corpus.dataset.examples.push_back(std::move(ex));
  }
  return corpus;
}

// Configuration ---------------------------------------------------------------

std::string MethodName(AttackMethod method) {
  switch (method) {
    case AttackMethod::kGreedyMarginal:
      return "greedy-marginal";
    case AttackMethod::kGreedySequential:
      return "greedy-sequential";
    case AttackMethod::kDisco:
      return "disco";
  }
  return "disco";
}

AttackMethod ParseMethod(const std::string& name) {
  for (AttackMethod m : {AttackMethod::kGreedyMarginal,
                         AttackMethod::kGreedySequential,
                         AttackMethod::kDisco}) {
    if (MethodName(m) == name) return m;
  }
  throw InvalidArgument("unknown attack method '" + name + "'");
}

void AttackConfig::Validate() const {
  if (budget < 0) throw InvalidArgument("budget must be >= 0");
  if (neighbors < 0) throw InvalidArgument("neighbors must be >= 0");
  if (!(eta_ball >= 0.0 && eta_ball <= 1.0)) {
    throw InvalidArgument("eta_ball must lie in [0, 1]");
  }
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  if (lambda && !(*lambda >= 0.0)) {
    throw InvalidArgument("lambda must be >= 0");
  }
  if (method == AttackMethod::kDisco) relax.Validate();
}

// Attack ----------------------------------------------------------------------

namespace {

TransformationIndex SearchGreedy(const VictimLossOracle& oracle,
                                 const CandidateSet& candidates,
                                 const AttackConfig& config) {
  const SubstitutionSetOracle set_oracle(oracle, candidates);
  TransformationIndex none(candidates.num_positions(), 0);
  if (set_oracle.ground_size() == 0) return none;
  const int limit =
      config.budgeted ? config.budget : candidates.num_positions();
  const PartitionConstraint constraint(set_oracle.position_groups(), limit);
  GreedyOptions options;
  options.strategy = config.method == AttackMethod::kGreedySequential
                         ? GreedyStrategy::kPositionSequential
                         : GreedyStrategy::kMarginalGain;
  options.positions = set_oracle.position_groups();
  options.stop_when_no_gain = true;
  const GreedyTrace trace = GreedyMaximize(
      set_oracle, GroundSet(set_oracle.ground_size()), constraint, options);
  return set_oracle.ToIndex(trace.chosen);
}

TransformationIndex SearchDisco(const VictimLossOracle& oracle,
                                const CandidateSet& candidates,
                                const AttackConfig& config, double clean_loss,
                                AttackResult* result) {
  const GroupLayout layout(candidates.GroupSizes());
  TransformationIndex none(candidates.num_positions(), 0);
  if (layout.dimension() == layout.num_groups()) return none;
  RelaxationParams params = config.relax;
  params.lambda = config.lambda ? *config.lambda
                                : DefaultLambda(clean_loss, layout);
  const OptimizerTrace trace = DiscoOptimize(oracle, candidates, params);
  result->optimizer_iterations = trace.iterations();
  result->final_phi =
      trace.phi_values.empty() ? 0.0 : trace.phi_values.back();
  if (!config.trace_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.trace_dir, ec);
    if (ec) throw IoFailure("cannot create " + config.trace_dir);
    const auto path = std::filesystem::path(config.trace_dir) /
                      ("trace_" + std::to_string(result->example) + ".txt");
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path.string());
    WriteTrace(out, trace);
    result->trace_file = path.string();
  }
  if (trace.aborted) {
    result->failure = "optimizer aborted: " + trace.abort_reason;
    return none;
  }
  return EnforceBudget(RoundToOneHot(trace.final_beta), trace.final_beta,
                       config.budget);
}

}  // namespace

std::vector<AttackResult> RunAttack(const LinearVictim& victim,
                                    const EmbeddingTable& embeddings,
                                    const Dataset& dataset,
                                    const AttackConfig& config,
                                    const EmbeddingTable* space) {
  config.Validate();
  if (victim.dimension() != embeddings.dimension()) {
    throw DimensionMismatch("victim and embedding dimensions differ");
  }
  if (config.samples > dataset.size()) {
    throw InvalidArgument("sample size exceeds the dataset");
  }
  if (space == nullptr) space = &embeddings;
  std::vector<AttackResult> results;
  for (int id : SampleExamples(dataset, config.samples, config.seed)) {
    const Example& ex = dataset.examples[id];
    AttackResult r;
    r.example = id;
    r.label = ex.label;
    r.original_tokens = ex.tokens;
    r.token_count = static_cast<int>(ex.tokens.size());
    const Vector feature = LinearVictim::TokenFeature(ex.tokens, embeddings);
    r.original_prediction = victim.Predict(feature);
    r.loss_before = victim.Loss(feature, ex.label);

    TransformationIndex index(ex.tokens.size(), 0);
    const bool may_change =
        config.budget > 0 || (!config.budgeted &&
                              config.method != AttackMethod::kDisco);
    if (may_change) {
      const CandidateSet candidates = BuildCandidateSet(
          *space, embeddings, ex.tokens, config.neighbors, config.eta_ball);
      const VictimLossOracle oracle(victim, ex.label);
      try {
        if (config.method == AttackMethod::kDisco) {
          index = SearchDisco(oracle, candidates, config, r.loss_before, &r);
        } else {
          index = SearchGreedy(oracle, candidates, config);
        }
      } catch (const Error& e) {
        r.failure = e.what();
        index.assign(ex.tokens.size(), 0);
      }
      r.adversarial_tokens = candidates.SelectTokens(index);
    } else {
      r.adversarial_tokens = ex.tokens;
    }
    r.adversarial_index = index;
    r.tokens_changed = ChangedPositions(index);
    const Vector adv =
        LinearVictim::TokenFeature(r.adversarial_tokens, embeddings);
    r.adversarial_prediction = victim.Predict(adv);
    r.loss_after = victim.Loss(adv, ex.label);
    results.push_back(std::move(r));
  }
  return results;
}

MetricsReport ComputeMetrics(const std::vector<AttackResult>& results) {
  if (results.empty()) throw EmptyResults("no attack results");
  MetricsReport m;
  m.examples = static_cast<int>(results.size());
  double correct = 0.0, adv_correct = 0.0, perturbation = 0.0;
  for (const auto& r : results) {
    correct += r.original_prediction == r.label;
    adv_correct += r.adversarial_prediction == r.label;
    perturbation += static_cast<double>(r.tokens_changed) / r.token_count;
    m.failures += !r.failure.empty();
  }
  m.initial_accuracy = correct / m.examples;
  m.adversarial_accuracy = adv_correct / m.examples;
  m.perturbation = perturbation / m.examples;
  return m;
}

// Reports ---------------------------------------------------------------------

std::string MethodReport::RowLabel() const {
  std::string label = dataset + " [" + MethodName(method);
  if (method == AttackMethod::kDisco || budgeted) {
    label += ", m=" + std::to_string(budget);
  } else {
    label += ", unbudgeted";
  }
  return label + "]";
}

namespace {

using nlohmann::ordered_json;

constexpr int kReportVersion = 1;

ordered_json ResultToJson(const AttackResult& r) {
  ordered_json j;
  j["example"] = r.example;
  j["label"] = r.label;
  j["original_tokens"] = r.original_tokens;
  j["adversarial_tokens"] = r.adversarial_tokens;
  j["adversarial_index"] = r.adversarial_index;
  j["original_prediction"] = r.original_prediction;
  j["adversarial_prediction"] = r.adversarial_prediction;
  j["loss_before"] = r.loss_before;
  j["loss_after"] = r.loss_after;
  j["tokens_changed"] = r.tokens_changed;
  j["token_count"] = r.token_count;
  j["optimizer_iterations"] = r.optimizer_iterations;
  j["final_phi"] = r.final_phi;
  j["trace_file"] = r.trace_file;
  j["failure"] = r.failure;
  return j;
}

AttackResult ResultFromJson(const ordered_json& j) {
  AttackResult r;
  r.example = j.at("example").get<int>();
  r.label = j.at("label").get<int>();
  r.original_tokens = j.at("original_tokens").get<std::vector<int>>();
  r.adversarial_tokens = j.at("adversarial_tokens").get<std::vector<int>>();
  r.adversarial_index = j.at("adversarial_index").get<TransformationIndex>();
  r.original_prediction = j.at("original_prediction").get<int>();
  r.adversarial_prediction = j.at("adversarial_prediction").get<int>();
  r.loss_before = j.at("loss_before").get<double>();
  r.loss_after = j.at("loss_after").get<double>();
  r.tokens_changed = j.at("tokens_changed").get<int>();
  r.token_count = j.at("token_count").get<int>();
  r.optimizer_iterations = j.at("optimizer_iterations").get<int>();
  r.final_phi = j.at("final_phi").get<double>();
  r.trace_file = j.at("trace_file").get<std::string>();
  r.failure = j.at("failure").get<std::string>();
  return r;
}

std::string Percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace

void WriteReportJson(std::ostream& out,
                     const std::vector<MethodReport>& reports) {
  ordered_json root;
  root["version"] = kReportVersion;
  root["methods"] = ordered_json::array();
  for (const auto& rep : reports) {
    ordered_json j;
    j["dataset"] = rep.dataset;
    j["method"] = MethodName(rep.method);
    j["budgeted"] = rep.budgeted;
    j["budget"] = rep.budget;
    j["summary"] = {
        {"examples", rep.metrics.examples},
        {"failures", rep.metrics.failures},
        {"initial_accuracy", rep.metrics.initial_accuracy},
        {"adversarial_accuracy", rep.metrics.adversarial_accuracy},
        {"perturbation", rep.metrics.perturbation},
    };
    j["results"] = ordered_json::array();
    for (const auto& r : rep.results) j["results"].push_back(ResultToJson(r));
    root["methods"].push_back(std::move(j));
  }
  out << root.dump(1) << '\n';
  if (!out) throw IoFailure("failed writing the report");
}

std::vector<MethodReport> ReadReportJson(std::istream& in) {
  ordered_json root;
  try {
    root = ordered_json::parse(in);
    if (root.at("version").get<int>() != kReportVersion) {
      throw IoFailure("unsupported report version");
    }
    std::vector<MethodReport> reports;
    for (const auto& j : root.at("methods")) {
      MethodReport rep;
      rep.dataset = j.at("dataset").get<std::string>();
      rep.method = ParseMethod(j.at("method").get<std::string>());
      rep.budgeted = j.at("budgeted").get<bool>();
      rep.budget = j.at("budget").get<int>();
      const auto& s = j.at("summary");
      rep.metrics.examples = s.at("examples").get<int>();
      rep.metrics.failures = s.at("failures").get<int>();
      rep.metrics.initial_accuracy = s.at("initial_accuracy").get<double>();
      rep.metrics.adversarial_accuracy =
          s.at("adversarial_accuracy").get<double>();
      rep.metrics.perturbation = s.at("perturbation").get<double>();
      for (const auto& r : j.at("results")) {
        rep.results.push_back(ResultFromJson(r));
      }
      reports.push_back(std::move(rep));
    }
    return reports;
  } catch (const nlohmann::json::exception& e) {
    throw IoFailure(std::string("malformed report: ") + e.what());
  }
}

void WriteReportTable(std::ostream& out,
                      const std::vector<MethodReport>& reports,
                      bool with_runtime) {
  const std::vector<std::string> header = {"Dataset", "Original Acc.(%)",
                                           "Adversarial Acc.(%)",
                                           "Perturbation (%)"};
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& rep : reports) {
    width[0] = std::max(width[0], rep.RowLabel().size());
  }
  auto row = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << " | ";
      out << cells[c];
      if (c + 1 < cells.size()) {
        out << std::string(width[c] - cells[c].size(), ' ');
      }
    }
    out << '\n';
  };
  std::size_t total = 3 * (header.size() - 1);
  for (auto w : width) total += w;
  const std::string rule(total, '-');

  const struct {
    const char* title;
    bool disco;
  } blocks[] = {{"Continuous Relaxation Approach", true},
                {"Greedy Approach", false}};
  for (const auto& block : blocks) {
    bool any = false;
    for (const auto& rep : reports) {
      any |= (rep.method == AttackMethod::kDisco) == block.disco;
    }
    if (!any) continue;
    out << block.title << '\n' << rule << '\n';
    row(header);
    out << rule << '\n';
    for (const auto& rep : reports) {
      if ((rep.method == AttackMethod::kDisco) != block.disco) continue;
      row({rep.RowLabel(), Percent(rep.metrics.initial_accuracy),
           Percent(rep.metrics.adversarial_accuracy),
           Percent(rep.metrics.perturbation)});
    }
    out << rule << '\n';
  }
  if (with_runtime) {
    for (const auto& rep : reports) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3f s", rep.metrics.runtime_seconds);
      out << "runtime " << rep.RowLabel() << ": " << buf << '\n';
    }
  }
}

void WriteReport(const std::vector<MethodReport>& reports,
                 const std::string& directory) {
  if (reports.empty()) throw InvalidArgument("no method reports to write");
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoFailure("cannot create " + directory + ": " + ec.message());
  const auto base = std::filesystem::path(directory);
  {
    std::ofstream out(base / "report.json", std::ios::binary);
    if (!out) throw IoFailure("cannot write " + (base / "report.json").string());
    WriteReportJson(out, reports);
  }
  std::ofstream table(base / "table.txt");
  if (!table) throw IoFailure("cannot write " + (base / "table.txt").string());
  WriteReportTable(table, reports);
}

}  // namespace disco
