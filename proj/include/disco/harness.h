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

#ifndef DISCO_HARNESS_H_
#define DISCO_HARNESS_H_

// End-to-end attack pipeline: candidate retrieval, combinatorial search with
// greedy or the continuous relaxation, metrics and report files.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "disco/counterfit.h"
#include "disco/dataset.h"
#include "disco/embedding.h"
#include "disco/models.h"
#include "disco/relax.h"
#include "disco/types.h"

namespace disco {

// Planted corpus. Polar tokens come in groups of num_classes tokens that
// share every coordinate except the class axes: member c carries `polarity`
// on axis c. Members of a group are each other's nearest neighbours and are
// listed as synonyms, so a substitution inside a group moves a document
// across the decision boundary. The remaining tokens are neutral.
struct SyntheticCorpusConfig {
  int vocab_size = 50;
  int num_classes = 2;
  int dimension = 8;
  int num_examples = 200;
  int min_length = 8;
  int max_length = 12;
  // Polar tokens of the true class per document.
  int polar_per_document = 3;
  double polarity = 0.5;
  // Fraction of the vocabulary spent on polar groups.
  double polar_fraction = 0.5;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void Validate() const;
};

struct SyntheticCorpus {
  EmbeddingTable table;
  Dataset dataset;
  Lexicon lexicon;
};

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusConfig& config);

enum class AttackMethod { kGreedyMarginal, kGreedySequential, kDisco };

std::string MethodName(AttackMethod method);
// "greedy-marginal", "greedy-sequential" or "disco". Throws InvalidArgument.
AttackMethod ParseMethod(const std::string& name);

struct AttackConfig {
  AttackMethod method = AttackMethod::kDisco;
  // Maximum number of changed positions.
  int budget = 3;
  // Greedy only: when false the budget is not enforced during the search.
  bool budgeted = true;
  int neighbors = 5;
  double eta_ball = 0.25;
  RelaxationParams relax;
  // Unset: derived from the clean loss per example.
  std::optional<double> lambda;
  int samples = 50;
  std::uint64_t seed = 0;
  // DISCO only: when set, each example's optimizer trace is written to
  // <trace_dir>/trace_<example>.txt.
  std::string trace_dir;

  // Throws InvalidArgument.
  void Validate() const;
};

struct AttackResult {
  int example = -1;
  int label = 0;
  std::vector<int> original_tokens;
  std::vector<int> adversarial_tokens;
  TransformationIndex adversarial_index;
  int original_prediction = 0;
  int adversarial_prediction = 0;
  double loss_before = 0.0;
  double loss_after = 0.0;
  int tokens_changed = 0;
  int token_count = 0;
  // DISCO only; 0 otherwise.
  int optimizer_iterations = 0;
  double final_phi = 0.0;
  std::string trace_file;
  // Empty on success; otherwise the reason the search failed. Failed
  // examples keep their original tokens.
  std::string failure;
};

// Attacks SampleExamples(dataset, config.samples, config.seed) in example
// order. Neighbours are retrieved in `space`, which defaults to `embeddings`.
// Throws UnembeddedToken; search failures are recorded per example.
std::vector<AttackResult> RunAttack(const LinearVictim& victim,
                                    const EmbeddingTable& embeddings,
                                    const Dataset& dataset,
                                    const AttackConfig& config,
                                    const EmbeddingTable* space = nullptr);

struct MetricsReport {
  int examples = 0;
  int failures = 0;
  double initial_accuracy = 0.0;
  double adversarial_accuracy = 0.0;
  // Mean of changed / total over examples, as a fraction.
  double perturbation = 0.0;
  double runtime_seconds = 0.0;
};

// Throws EmptyResults.
MetricsReport ComputeMetrics(const std::vector<AttackResult>& results);

struct MethodReport {
  std::string dataset = "synthetic";
  AttackMethod method = AttackMethod::kDisco;
  // Greedy rows: whether the budget was enforced.
  bool budgeted = true;
  int budget = 0;
  MetricsReport metrics;
  std::vector<AttackResult> results;

  // Row label used in the table, e.g. "synthetic [greedy-sequential, m=3]".
  std::string RowLabel() const;
};

// Machine-readable report. Runtime is left out so identical runs give
// identical bytes.
void WriteReportJson(std::ostream& out,
                     const std::vector<MethodReport>& reports);
std::vector<MethodReport> ReadReportJson(std::istream& in);

// Two blocks: "Continuous Relaxation Approach" for disco rows and "Greedy
// Approach" for greedy rows, columns Dataset | Original Acc.(%) |
// Adversarial Acc.(%) | Perturbation (%). Runtime follows the table when
// `with_runtime` is set.
void WriteReportTable(std::ostream& out,
                      const std::vector<MethodReport>& reports,
                      bool with_runtime = true);

// Writes <directory>/report.json and <directory>/table.txt, creating the
// directory. Throws InvalidArgument with no reports, IoFailure otherwise.
void WriteReport(const std::vector<MethodReport>& reports,
                 const std::string& directory);

}  // namespace disco

#endif  // DISCO_HARNESS_H_
