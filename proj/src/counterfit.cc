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

#include "disco/counterfit.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "disco/errors.h"

namespace disco {
namespace {

std::pair<int, int> Ordered(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

bool Contains(const std::vector<std::pair<int, int>>& pairs,
              std::pair<int, int> pair) {
  return std::find(pairs.begin(), pairs.end(), pair) != pairs.end();
}

double Distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

void CheckShapes(const Embeddings& original, const Embeddings& current) {
  if (original.size() != current.size()) {
    throw DimensionMismatch("original and current spaces differ in size");
  }
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original[i].size() != current[i].size() ||
        original[i].size() != original[0].size()) {
      throw DimensionMismatch("embedding dimensions disagree at token " +
                              std::to_string(i));
    }
  }
}

void CheckPairs(const Lexicon& lexicon, std::size_t vocab) {
  lexicon.Validate(static_cast<int>(vocab));
}

// Adds w * d/dx d(x_u, x_w) to the gradient. `fallback` is used when the two
// vectors coincide.
void AddDistanceGradient(const Embeddings& x, int u, int w, double weight,
                         const Vector* fallback, Embeddings* grad) {
  const double dist = Distance(x[u], x[w]);
  const std::size_t dim = x[u].size();
  if (dist == 0.0) {
    if (fallback == nullptr) return;
    for (std::size_t d = 0; d < dim; ++d) {
      (*grad)[u][d] += weight * (*fallback)[d];
      (*grad)[w][d] -= weight * (*fallback)[d];
    }
    return;
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const double g = weight * (x[u][d] - x[w][d]) / dist;
    (*grad)[u][d] += g;
    (*grad)[w][d] -= g;
  }
}

}  // namespace

void Lexicon::AddSynonym(int a, int b) {
  if (a == b) throw InvalidArgument("self synonym pair");
  const auto pair = Ordered(a, b);
  if (Contains(antonyms, pair)) {
    throw InvalidArgument("pair is already an antonym pair");
  }
  if (!Contains(synonyms, pair)) synonyms.push_back(pair);
}

void Lexicon::AddAntonym(int a, int b) {
  if (a == b) throw InvalidArgument("self antonym pair");
  const auto pair = Ordered(a, b);
  if (Contains(synonyms, pair)) {
    throw InvalidArgument("pair is already a synonym pair");
  }
  if (!Contains(antonyms, pair)) antonyms.push_back(pair);
}

void Lexicon::Validate(int vocab_size) const {
  for (const auto* list : {&synonyms, &antonyms}) {
    for (const auto& [a, b] : *list) {
      if (a < 0 || b < 0 || a >= vocab_size || b >= vocab_size) {
        throw InvalidArgument("lexicon pair references an unknown token id");
      }
      if (a == b) throw InvalidArgument("lexicon contains a self pair");
    }
  }
  for (const auto& pair : synonyms) {
    if (Contains(antonyms, pair)) {
      throw InvalidArgument("pair listed as both synonym and antonym");
    }
  }
}

Lexicon LoadLexicon(std::istream& in, const EmbeddingTable& vocabulary) {
  Lexicon lexicon;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string kind, a, b, extra;
    if (!(fields >> kind) || kind[0] == '#') continue;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw IoFailure("lexicon line " + std::to_string(line_no) +
                      ": expected `syn|ant tokenA tokenB`");
    }
    const int ia = vocabulary.Id(a);
    const int ib = vocabulary.Id(b);
    if (kind == "syn") {
      lexicon.AddSynonym(ia, ib);
    } else if (kind == "ant") {
      lexicon.AddAntonym(ia, ib);
    } else {
      throw IoFailure("lexicon line " + std::to_string(line_no) +
                      ": unknown relation '" + kind + "'");
    }
  }
  return lexicon;
}

Lexicon LoadLexiconFile(const std::string& path,
                        const EmbeddingTable& vocabulary) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  return LoadLexicon(in, vocabulary);
}

void SaveLexicon(std::ostream& out, const Lexicon& lexicon,
                 const EmbeddingTable& vocabulary) {
  for (const auto& [a, b] : lexicon.synonyms) {
    out << "syn " << vocabulary.token(a) << ' ' << vocabulary.token(b) << '\n';
  }
  for (const auto& [a, b] : lexicon.antonyms) {
    out << "ant " << vocabulary.token(a) << ' ' << vocabulary.token(b) << '\n';
  }
}

void CounterFitConfig::Validate() const {
  if (!(delta > gamma) || !(gamma >= 0.0)) {
    throw InvalidArgument("counter-fitting needs delta > gamma >= 0");
  }
  if (!(k1 >= 0.0) || !(k2 >= 0.0) || !(k3 >= 0.0)) {
    throw InvalidArgument("counter-fitting weights must be >= 0");
  }
  if (neighbors < 0 || !(step > 0.0) || iterations < 0) {
    throw InvalidArgument("bad counter-fitting neighbours/step/iterations");
  }
}

std::vector<std::vector<int>> TopologyNeighbors(const Embeddings& original,
                                                int count) {
  const int n = static_cast<int>(original.size());
  std::vector<std::vector<int>> result(n);
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) order.emplace_back(Distance(original[i], original[j]), j);
    }
    const int take = std::min<int>(count, static_cast<int>(order.size()));
    std::partial_sort(order.begin(), order.begin() + take, order.end());
    for (int r = 0; r < take; ++r) result[i].push_back(order[r].second);
  }
  return result;
}

namespace {

struct Problem {
  const Embeddings& original;
  const Lexicon& lexicon;
  const CounterFitConfig& config;
  const std::vector<std::vector<int>>& neighborhoods;
};

CounterfitTerms Evaluate(const Problem& pr, const Embeddings& x) {
  CounterfitTerms t;
  for (const auto& [u, w] : pr.lexicon.antonyms) {
    t.antonym += std::max(0.0, pr.config.delta - Distance(x[u], x[w]));
  }
  for (const auto& [u, w] : pr.lexicon.synonyms) {
    t.synonym += std::max(0.0, Distance(x[u], x[w]) - pr.config.gamma);
  }
  for (std::size_t i = 0; i < pr.neighborhoods.size(); ++i) {
    for (int j : pr.neighborhoods[i]) {
      t.topology +=
          std::max(0.0, Distance(x[i], x[j]) -
                            Distance(pr.original[i], pr.original[j]));
    }
  }
  t.total = pr.config.k1 * t.antonym + pr.config.k2 * t.synonym +
            pr.config.k3 * t.topology;
  return t;
}

Embeddings Gradient(const Problem& pr, const Embeddings& x,
                    const std::vector<Vector>& repulsion) {
  Embeddings grad(x.size(), Vector(x.empty() ? 0 : x[0].size(), 0.0));
  for (std::size_t a = 0; a < pr.lexicon.antonyms.size(); ++a) {
    const auto [u, w] = pr.lexicon.antonyms[a];
    if (pr.config.delta - Distance(x[u], x[w]) > 0.0) {
      AddDistanceGradient(x, u, w, -pr.config.k1, &repulsion[a], &grad);
    }
  }
  for (const auto& [u, w] : pr.lexicon.synonyms) {
    if (Distance(x[u], x[w]) - pr.config.gamma > 0.0) {
      AddDistanceGradient(x, u, w, pr.config.k2, nullptr, &grad);
    }
  }
  for (std::size_t i = 0; i < pr.neighborhoods.size(); ++i) {
    for (int j : pr.neighborhoods[i]) {
      if (Distance(x[i], x[j]) - Distance(pr.original[i], pr.original[j]) >
          0.0) {
        AddDistanceGradient(x, static_cast<int>(i), j, pr.config.k3, nullptr,
                            &grad);
      }
    }
  }
  return grad;
}

}  // namespace

CounterfitTerms CounterfitObjective(
    const Embeddings& original, const Embeddings& current,
    const Lexicon& lexicon, const CounterFitConfig& config,
    const std::vector<std::vector<int>>* neighborhoods) {
  CheckShapes(original, current);
  CheckPairs(lexicon, original.size());
  std::vector<std::vector<int>> computed;
  if (neighborhoods == nullptr) {
    computed = TopologyNeighbors(original, config.neighbors);
    neighborhoods = &computed;
  }
  return Evaluate(Problem{original, lexicon, config, *neighborhoods}, current);
}

CounterfitResult CounterfitOptimize(const Embeddings& original,
                                    const Lexicon& lexicon,
                                    const CounterFitConfig& config,
                                    std::uint64_t seed) {
  config.Validate();
  CheckShapes(original, original);
  CheckPairs(lexicon, original.size());
  const auto neighborhoods = TopologyNeighbors(original, config.neighbors);
  const Problem pr{original, lexicon, config, neighborhoods};

  // Fixed unit direction per antonym pair, used only while the pair
  // coincides exactly.
  const std::size_t dim = original.empty() ? 0 : original[0].size();
  std::vector<Vector> repulsion(lexicon.antonyms.size(), Vector(dim, 0.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (auto& r : repulsion) {
    double norm = 0.0;
    while (norm == 0.0 && dim > 0) {
      for (double& v : r) v = normal(rng);
      norm = 0.0;
      for (double v : r) norm += v * v;
      norm = std::sqrt(norm);
    }
    for (double& v : r) v /= norm;
  }

  CounterfitResult result;
  result.vectors = original;
  CounterfitTerms current = Evaluate(pr, result.vectors);
  result.trace.push_back(current);
  for (int it = 0; it < config.iterations; ++it) {
    if (!std::isfinite(current.total)) {
      throw NonFiniteObjective("counter-fitting objective is not finite");
    }
    if (current.total == 0.0) {
      result.converged = true;
      break;
    }
    const Embeddings grad = Gradient(pr, result.vectors, repulsion);
    double grad_sq = 0.0;
    for (const auto& g : grad) {
      for (double v : g) grad_sq += v * v;
    }
    if (grad_sq == 0.0) {
      result.converged = true;
      break;
    }
    bool accepted = false;
    for (double t = config.step; t > 1e-14; t *= 0.5) {
      Embeddings trial = result.vectors;
      for (std::size_t i = 0; i < trial.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) trial[i][d] -= t * grad[i][d];
      }
      const CounterfitTerms next = Evaluate(pr, trial);
      if (!std::isfinite(next.total)) {
        throw NonFiniteObjective("counter-fitting objective is not finite");
      }
      if (next.total <= current.total - 1e-4 * t * grad_sq) {
        result.vectors = std::move(trial);
        current = next;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // No descent along the subgradient.
    result.trace.push_back(current);
  }
  if (current.total == 0.0) result.converged = true;
  return result;
}

double MaxRadius(const Embeddings& vectors, int anchor) {
  if (anchor < 0 || anchor >= static_cast<int>(vectors.size())) {
    throw UnknownToken("anchor id " + std::to_string(anchor) +
                       " outside the vocabulary");
  }
  double radius = 0.0;
  for (const auto& v : vectors) {
    radius = std::max(radius, Distance(vectors[anchor], v));
  }
  return radius;
}

std::vector<Candidate> KnnCandidates(const EmbeddingTable& space, int token,
                                     int k, double eta_ball) {
  if (!(eta_ball >= 0.0 && eta_ball <= 1.0)) {
    throw InvalidArgument("eta_ball must lie in [0, 1]");
  }
  if (k < 0) throw InvalidArgument("neighbour count must be >= 0");
  if (token < 0 || token >= space.size()) {
    throw UnknownToken("token id " + std::to_string(token) +
                       " outside the vocabulary");
  }
  const auto& vectors = space.vectors();
  const double epsilon = eta_ball * MaxRadius(vectors, token);
  std::vector<std::pair<double, int>> inside;
  for (int j = 0; j < space.size(); ++j) {
    if (j == token) continue;
    const double d = Distance(vectors[token], vectors[j]);
    if (d <= epsilon) inside.emplace_back(d, j);
  }
  std::sort(inside.begin(), inside.end());
  if (static_cast<int>(inside.size()) > k) inside.resize(k);
  std::vector<Candidate> out{{token, vectors[token]}};
  for (const auto& [d, j] : inside) out.push_back({j, vectors[j]});
  return out;
}

CandidateSet BuildCandidateSet(const EmbeddingTable& space,
                               const EmbeddingTable& inputs,
                               std::span<const int> tokens, int k,
                               double eta_ball) {
  if (space.size() != inputs.size()) {
    throw DimensionMismatch("retrieval and input tables differ in size");
  }
  CandidateSet set;
  for (int token : tokens) {
    if (token < 0 || token >= inputs.size()) {
      throw UnembeddedToken("token id " + std::to_string(token) +
                            " has no embedding");
    }
    auto slots = KnnCandidates(space, token, k, eta_ball);
    for (auto& c : slots) c.embedding = inputs.vector(c.token);
    set.positions.push_back(std::move(slots));
  }
  return set;
}

}  // namespace disco
