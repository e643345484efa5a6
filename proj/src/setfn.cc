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

#include "disco/setfn.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include "disco/errors.h"

namespace disco {
namespace {

Subset Insert(std::span<const int> base, int e) {
  Subset out(base.begin(), base.end());
  out.insert(std::upper_bound(out.begin(), out.end(), e), e);
  return out;
}

bool Contains(std::span<const int> subset, int e) {
  return std::binary_search(subset.begin(), subset.end(), e);
}

void CheckEnumerable(const GroundSet& ground, int limit) {
  if (ground.size() > limit) {
    std::ostringstream msg;
    msg << "ground set of size " << ground.size()
        << " exceeds the enumeration limit " << limit;
    throw GroundSetTooLarge(msg.str());
  }
}

std::vector<double> AllSubsetValues(const SetOracle& oracle, int n) {
  std::vector<double> values(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
    values[mask] = oracle.Evaluate(MaskToSubset(mask));
  }
  return values;
}

}  // namespace

GroundSet::GroundSet(int size) : size_(size) {
  if (size <= 0) throw InvalidArgument("ground set must be nonempty");
}

std::vector<int> GroundSet::elements() const {
  std::vector<int> out(size_);
  for (int i = 0; i < size_; ++i) out[i] = i;
  return out;
}

ModularOracle::ModularOracle(std::vector<double> weights)
    : weights_(std::move(weights)) {}

double ModularOracle::Evaluate(std::span<const int> subset) const {
  double total = 0.0;
  for (int e : subset) total += weights_.at(e);
  return total;
}

CoverageOracle::CoverageOracle(std::vector<std::vector<int>> sets,
                               std::vector<double> item_weights)
    : sets_(std::move(sets)), item_weights_(std::move(item_weights)) {
  for (const auto& s : sets_) {
    for (int item : s) {
      if (item < 0) throw InvalidArgument("coverage items must be >= 0");
      if (!item_weights_.empty() &&
          item >= static_cast<int>(item_weights_.size())) {
        throw InvalidArgument("coverage item without a weight");
      }
    }
  }
}

double CoverageOracle::Evaluate(std::span<const int> subset) const {
  std::set<int> covered;
  for (int e : subset) {
    const auto& s = sets_.at(e);
    covered.insert(s.begin(), s.end());
  }
  if (item_weights_.empty()) return static_cast<double>(covered.size());
  double total = 0.0;
  for (int item : covered) total += item_weights_[item];
  return total;
}

void WeightedSumOracle::Add(double weight, const SetOracle& oracle) {
  terms_.emplace_back(weight, &oracle);
}

double WeightedSumOracle::Evaluate(std::span<const int> subset) const {
  double total = 0.0;
  for (const auto& [weight, oracle] : terms_) {
    total += weight * oracle->Evaluate(subset);
  }
  return total;
}

double MemoizedOracle::Evaluate(std::span<const int> subset) const {
  Subset key(subset.begin(), subset.end());
  std::sort(key.begin(), key.end());
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  // Evaluated outside the lock; a racing duplicate computes the same value.
  const double value = inner_.Evaluate(key);
  std::lock_guard<std::mutex> lock(mu_);
  if (cache_.emplace(std::move(key), value).second) ++misses_;
  return value;
}

std::size_t MemoizedOracle::cache_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

std::size_t MemoizedOracle::misses() const {
  std::lock_guard<std::mutex> lock(mu_);
  return misses_;
}

CardinalityConstraint::CardinalityConstraint(int k) : k_(k) {
  if (k < 0) throw InvalidArgument("cardinality bound must be >= 0");
}

bool CardinalityConstraint::IsFeasible(std::span<const int> subset) const {
  return static_cast<int>(subset.size()) <= k_;
}

std::string CardinalityConstraint::kind() const {
  return "cardinality(" + std::to_string(k_) + ")";
}

PartitionConstraint::PartitionConstraint(
    const std::vector<std::vector<int>>& groups, int k)
    : k_(k) {
  if (k < 0) throw InvalidArgument("cardinality bound must be >= 0");
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    for (int e : groups[g]) {
      if (!group_of_.emplace(e, g).second) {
        throw InvalidArgument("element listed in two partition groups");
      }
    }
  }
}

bool PartitionConstraint::IsFeasible(std::span<const int> subset) const {
  if (static_cast<int>(subset.size()) > k_) return false;
  std::set<int> used;
  for (int e : subset) {
    auto it = group_of_.find(e);
    if (it != group_of_.end() && !used.insert(it->second).second) return false;
  }
  return true;
}

double MarginalGain(const SetOracle& oracle, std::span<const int> base,
                    int e) {
  Subset sorted(base.begin(), base.end());
  std::sort(sorted.begin(), sorted.end());
  if (Contains(sorted, e)) {
    throw ElementAlreadyPresent("element " + std::to_string(e) +
                                " is already in the base set");
  }
  return oracle.Evaluate(Insert(sorted, e)) - oracle.Evaluate(sorted);
}

Subset GreedyTrace::AsSubset() const {
  Subset out = chosen;
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct BestMove {
  int element = -1;
  double value = 0.0;
};

// Best feasible single-element augmentation of `current` among `pool`.
BestMove BestAugmentation(const SetOracle& oracle,
                          const MembershipConstraint& constraint,
                          const Subset& current, std::span<const int> pool) {
  BestMove best;
  for (int e : pool) {
    if (Contains(current, e)) continue;
    Subset next = Insert(current, e);
    if (!constraint.IsFeasible(next)) continue;
    const double value = oracle.Evaluate(next);
    if (best.element < 0 || value > best.value ||
        (value == best.value && e < best.element)) {
      best = {e, value};
    }
  }
  return best;
}

}  // namespace

GreedyTrace GreedyMaximize(const SetOracle& oracle, const GroundSet& ground,
                           const MembershipConstraint& constraint,
                           const GreedyOptions& options) {
  if (!constraint.IsFeasible({})) {
    throw InfeasibleStart("the empty set is not feasible");
  }
  GreedyTrace trace;
  Subset current;
  double current_value = oracle.EmptyValue();

  if (options.strategy == GreedyStrategy::kMarginalGain) {
    const std::vector<int> pool = ground.elements();
    while (true) {
      const BestMove best =
          BestAugmentation(oracle, constraint, current, pool);
      if (best.element < 0) break;
      if (options.stop_when_no_gain && best.value - current_value <= 0.0) {
        break;
      }
      current = Insert(current, best.element);
      current_value = best.value;
      trace.chosen.push_back(best.element);
      trace.values.push_back(current_value);
    }
    return trace;
  }

  if (options.positions.empty()) {
    throw InvalidArgument("position-sequential greedy needs a group layout");
  }
  for (const auto& group : options.positions) {
    for (int e : group) {
      if (!ground.Contains(e)) {
        throw InvalidArgument("position layout references element " +
                              std::to_string(e) + " outside the ground set");
      }
    }
    const BestMove best =
        BestAugmentation(oracle, constraint, current, group);
    if (best.element < 0 || best.value - current_value <= 0.0) continue;
    current = Insert(current, best.element);
    current_value = best.value;
    trace.chosen.push_back(best.element);
    trace.values.push_back(current_value);
  }
  return trace;
}

Subset MaskToSubset(std::uint32_t mask) {
  Subset out;
  for (int e = 0; mask != 0; ++e, mask >>= 1) {
    if (mask & 1u) out.push_back(e);
  }
  return out;
}

BruteForceResult BruteForceMaximize(const SetOracle& oracle,
                                    const GroundSet& ground,
                                    const MembershipConstraint& constraint,
                                    int max_ground) {
  CheckEnumerable(ground, std::min(max_ground, 30));
  if (!constraint.IsFeasible({})) {
    throw InfeasibleStart("the empty set is not feasible");
  }
  BruteForceResult best{{}, oracle.EmptyValue()};
  const std::uint32_t limit = std::uint32_t{1} << ground.size();
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    Subset subset = MaskToSubset(mask);
    if (!constraint.IsFeasible(subset)) continue;
    const double value = oracle.Evaluate(subset);
    if (value > best.value ||
        (value == best.value && std::lexicographical_compare(
                                    subset.begin(), subset.end(),
                                    best.subset.begin(), best.subset.end()))) {
      best = {std::move(subset), value};
    }
  }
  return best;
}

ViolationReport CheckSubmodular(const SetOracle& oracle,
                                const GroundSet& ground, double tolerance,
                                std::size_t max_recorded) {
  CheckEnumerable(ground, kMaxVerifierGround);
  const int n = ground.size();
  const std::vector<double> f = AllSubsetValues(oracle, n);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  ViolationReport report;
  for (std::uint32_t b = 0; b <= full; ++b) {
    // Iterate all submasks a of b, including 0.
    for (std::uint32_t a = b;; a = (a - 1) & b) {
      for (int e = 0; e < n; ++e) {
        const std::uint32_t bit = std::uint32_t{1} << e;
        if (b & bit) continue;
        const double gain_a = f[a | bit] - f[a];
        const double gain_b = f[b | bit] - f[b];
        const double gap = gain_b - gain_a;
        if (gap > tolerance) {
          ++report.count;
          report.worst_gap = std::max(report.worst_gap, gap);
          if (report.violations.size() < max_recorded) {
            report.violations.push_back(
                {MaskToSubset(a), MaskToSubset(b), e, gap});
          }
        }
      }
      if (a == 0) break;
    }
  }
  return report;
}

ViolationReport CheckMonotone(const SetOracle& oracle, const GroundSet& ground,
                              double tolerance, std::size_t max_recorded) {
  CheckEnumerable(ground, kMaxVerifierGround);
  const int n = ground.size();
  const std::vector<double> f = AllSubsetValues(oracle, n);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  ViolationReport report;
  for (std::uint32_t b = 0; b <= full; ++b) {
    for (std::uint32_t a = b;; a = (a - 1) & b) {
      const double gap = f[a] - f[b];
      if (a != b && gap > tolerance) {
        ++report.count;
        report.worst_gap = std::max(report.worst_gap, gap);
        if (report.violations.size() < max_recorded) {
          report.violations.push_back({MaskToSubset(a), MaskToSubset(b), -1,
                                       gap});
        }
      }
      if (a == 0) break;
    }
  }
  return report;
}

}  // namespace disco
