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

#ifndef DISCO_COUNTERFIT_H_
#define DISCO_COUNTERFIT_H_

// Counter-fitting of an embedding space and epsilon-ball candidate retrieval.
//
// The retrofitting cost over current vectors V' given originals V is
//
//   k1 * sum_{(u,w) in ant} max(0, delta - d(v'_u, v'_w))
// + k2 * sum_{(u,w) in syn} max(0, d(v'_u, v'_w) - gamma)
// + k3 * sum_i sum_{j in N(i)} max(0, d(v'_i, v'_j) - d(v_i, v_j))
//
// with d the Euclidean distance and N(i) the nearest neighbours of i in the
// original space. All hinges use subgradient 0 at the kink.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disco/candidate_set.h"
#include "disco/embedding.h"
#include "disco/types.h"

namespace disco {

struct Lexicon {
  // Unordered token-id pairs, stored with first < second.
  std::vector<std::pair<int, int>> synonyms;
  std::vector<std::pair<int, int>> antonyms;

  // Throws InvalidArgument on self-pairs or a pair in both lists.
  void AddSynonym(int a, int b);
  void AddAntonym(int a, int b);
  bool empty() const { return synonyms.empty() && antonyms.empty(); }
  // Throws InvalidArgument for ids at or above vocab_size.
  void Validate(int vocab_size) const;
};

// Lines `syn a b` or `ant a b`; blank lines and '#' comments are skipped.
// Unknown tokens throw UnknownToken.
Lexicon LoadLexicon(std::istream& in, const EmbeddingTable& vocabulary);
Lexicon LoadLexiconFile(const std::string& path,
                        const EmbeddingTable& vocabulary);
void SaveLexicon(std::ostream& out, const Lexicon& lexicon,
                 const EmbeddingTable& vocabulary);

struct CounterFitConfig {
  double delta = 1.0;
  double gamma = 0.2;
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;
  // |N(i)|, fixed from the original space.
  int neighbors = 10;
  // Initial step of each backtracking line search.
  double step = 0.5;
  int iterations = 500;

  // Throws InvalidArgument unless delta > gamma >= 0, weights >= 0,
  // neighbors >= 0, step > 0, iterations >= 0.
  void Validate() const;
};

struct CounterfitTerms {
  double total = 0.0;
  double antonym = 0.0;
  double synonym = 0.0;
  double topology = 0.0;
};

// N(i): up to `count` nearest other tokens, ties by id.
std::vector<std::vector<int>> TopologyNeighbors(const Embeddings& original,
                                                int count);

// Throws DimensionMismatch if the spaces disagree in shape. `neighborhoods`
// defaults to TopologyNeighbors(original, config.neighbors).
CounterfitTerms CounterfitObjective(
    const Embeddings& original, const Embeddings& current,
    const Lexicon& lexicon, const CounterFitConfig& config,
    const std::vector<std::vector<int>>* neighborhoods = nullptr);

struct CounterfitResult {
  Embeddings vectors;
  // Objective terms per accepted iterate, starting with V' = V.
  std::vector<CounterfitTerms> trace;
  bool converged = false;
};

// Subgradient descent from V' = V with backtracking: a step is accepted only
// if the total does not increase, so the trace is non-increasing. Antonym
// pairs that coincide exactly get a seeded unit repulsion direction.
// Throws NonFiniteObjective.
CounterfitResult CounterfitOptimize(const Embeddings& original,
                                    const Lexicon& lexicon,
                                    const CounterFitConfig& config,
                                    std::uint64_t seed = 0);

// Distance from `anchor` to the furthest vector.
double MaxRadius(const Embeddings& vectors, int anchor);

// Slot 0 is `token` itself, followed by up to k other tokens with
// d <= eta_ball * MaxRadius, ascending by distance then id. Throws
// UnknownToken for ids outside the table and InvalidArgument for eta_ball
// outside [0, 1] or k < 0.
std::vector<Candidate> KnnCandidates(const EmbeddingTable& space, int token,
                                     int k, double eta_ball);

// Candidate set for a token sequence. Neighbours are retrieved in `space`;
// slot embeddings are taken from `inputs` (the victim's table), which must
// share the vocabulary.
CandidateSet BuildCandidateSet(const EmbeddingTable& space,
                               const EmbeddingTable& inputs,
                               std::span<const int> tokens, int k,
                               double eta_ball);

}  // namespace disco

#endif  // DISCO_COUNTERFIT_H_
