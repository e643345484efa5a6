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

#ifndef DISCO_SETFN_H_
#define DISCO_SETFN_H_

// Set functions over a finite ground set {0, ..., n-1}: value oracles,
// down-monotone constraints, greedy and exhaustive maximization, and
// exhaustive submodularity / monotonicity checks.
//
// Subsets are passed as sorted vectors of element ids.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace disco {

using Subset = std::vector<int>;

class GroundSet {
 public:
  explicit GroundSet(int size);

  int size() const { return size_; }
  bool Contains(int e) const { return e >= 0 && e < size_; }
  std::vector<int> elements() const;

 private:
  int size_;
};

// Black-box value oracle. Implementations must be deterministic and safe to
// call concurrently from several threads.
class SetOracle {
 public:
  virtual ~SetOracle() = default;
  virtual double Evaluate(std::span<const int> subset) const = 0;
  double EmptyValue() const { return Evaluate({}); }
};

// f(S) = sum of weights of S.
class ModularOracle : public SetOracle {
 public:
  explicit ModularOracle(std::vector<double> weights);
  double Evaluate(std::span<const int> subset) const override;

 private:
  std::vector<double> weights_;
};

// Weighted coverage: element e covers the universe items in sets[e];
// f(S) = total weight of the items covered by S. Unit weights by default.
class CoverageOracle : public SetOracle {
 public:
  explicit CoverageOracle(std::vector<std::vector<int>> sets,
                          std::vector<double> item_weights = {});
  double Evaluate(std::span<const int> subset) const override;

 private:
  std::vector<std::vector<int>> sets_;
  std::vector<double> item_weights_;
};

class FunctionOracle : public SetOracle {
 public:
  using Fn = std::function<double(std::span<const int>)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}
  double Evaluate(std::span<const int> subset) const override {
    return fn_(subset);
  }

 private:
  Fn fn_;
};

// sum_i weight_i * f_i(S). The referenced oracles must outlive this object.
class WeightedSumOracle : public SetOracle {
 public:
  void Add(double weight, const SetOracle& oracle);
  double Evaluate(std::span<const int> subset) const override;

 private:
  std::vector<std::pair<double, const SetOracle*>> terms_;
};

// Caches scores keyed by the sorted subset. Thread-safe.
class MemoizedOracle : public SetOracle {
 public:
  explicit MemoizedOracle(const SetOracle& inner) : inner_(inner) {}
  double Evaluate(std::span<const int> subset) const override;
  std::size_t cache_size() const;
  std::size_t misses() const;

 private:
  const SetOracle& inner_;
  mutable std::mutex mu_;
  mutable std::map<Subset, double> cache_;
  mutable std::size_t misses_ = 0;
};

// Feasibility family. Must be down-monotone with the empty set feasible.
class MembershipConstraint {
 public:
  virtual ~MembershipConstraint() = default;
  virtual bool IsFeasible(std::span<const int> subset) const = 0;
  virtual std::string kind() const = 0;
};

class CardinalityConstraint : public MembershipConstraint {
 public:
  explicit CardinalityConstraint(int k);
  bool IsFeasible(std::span<const int> subset) const override;
  std::string kind() const override;
  int k() const { return k_; }

 private:
  int k_;
};

// At most one element from each group and at most `k` elements overall.
// Elements outside every group are unrestricted except for `k`.
class PartitionConstraint : public MembershipConstraint {
 public:
  PartitionConstraint(const std::vector<std::vector<int>>& groups, int k);
  bool IsFeasible(std::span<const int> subset) const override;
  std::string kind() const override { return "custom"; }

 private:
  std::map<int, int> group_of_;
  int k_;
};

class CustomConstraint : public MembershipConstraint {
 public:
  using Fn = std::function<bool(std::span<const int>)>;
  explicit CustomConstraint(Fn fn) : fn_(std::move(fn)) {}
  bool IsFeasible(std::span<const int> subset) const override {
    return fn_(subset);
  }
  std::string kind() const override { return "custom"; }

 private:
  Fn fn_;
};

// Delta(e | base) = f(base + e) - f(base). Throws ElementAlreadyPresent if e
// is in base.
double MarginalGain(const SetOracle& oracle, std::span<const int> base, int e);

struct GreedyTrace {
  std::vector<int> chosen;
  // values[t] = f(first t+1 chosen elements).
  std::vector<double> values;

  Subset AsSubset() const;
};

enum class GreedyStrategy {
  // Repeatedly add argmax_e Delta(e | S) over feasible augmentations.
  kMarginalGain,
  // Visit position groups left to right and fix the best candidate of each
  // before moving on. Keeping the original (adding nothing) wins unless some
  // candidate has a strictly positive gain.
  kPositionSequential,
};

struct GreedyOptions {
  GreedyStrategy strategy = GreedyStrategy::kMarginalGain;
  // Element ids per position; required by kPositionSequential.
  std::vector<std::vector<int>> positions;
  // kMarginalGain only: also stop once the best gain is <= 0.
  bool stop_when_no_gain = false;
};

// Ties in the argmax go to the lowest element id.
GreedyTrace GreedyMaximize(const SetOracle& oracle, const GroundSet& ground,
                           const MembershipConstraint& constraint,
                           const GreedyOptions& options = {});

struct BruteForceResult {
  Subset subset;
  double value = 0.0;
};

inline constexpr int kDefaultMaxGround = 16;
inline constexpr int kMaxVerifierGround = 12;
inline constexpr double kDefaultVerifierTolerance = 1e-9;

// Exact argmax over all feasible subsets. Ties go to the lexicographically
// smallest subset.
BruteForceResult BruteForceMaximize(const SetOracle& oracle,
                                    const GroundSet& ground,
                                    const MembershipConstraint& constraint,
                                    int max_ground = kDefaultMaxGround);

struct SetViolation {
  Subset a;
  Subset b;
  int element = -1;  // -1 for monotonicity violations.
  double gap = 0.0;
};

struct ViolationReport {
  std::size_t count = 0;
  double worst_gap = 0.0;
  // First violations in enumeration order, at most `max_recorded`.
  std::vector<SetViolation> violations;

  bool empty() const { return count == 0; }
};

// Reports every A subset-of B, e not in B with
// Delta(e|A) < Delta(e|B) - tolerance. Requires |E| <= 12.
ViolationReport CheckSubmodular(const SetOracle& oracle,
                                const GroundSet& ground,
                                double tolerance = kDefaultVerifierTolerance,
                                std::size_t max_recorded = 1000);

// Reports every A subset-of B with f(A) > f(B) + tolerance.
ViolationReport CheckMonotone(const SetOracle& oracle, const GroundSet& ground,
                              double tolerance = kDefaultVerifierTolerance,
                              std::size_t max_recorded = 1000);

// Sorted element ids of a bitmask.
Subset MaskToSubset(std::uint32_t mask);

}  // namespace disco

#endif  // DISCO_SETFN_H_
