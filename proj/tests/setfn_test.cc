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

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "disco/errors.h"

namespace disco {
namespace {

double Square(std::span<const int> s) {
  return static_cast<double>(s.size() * s.size());
}

TEST(MarginalGainTest, ModularIsAdditive) {
  const ModularOracle f({5.0, 3.0});
  const std::vector<int> base = {0};
  EXPECT_DOUBLE_EQ(MarginalGain(f, base, 1), 3.0);
}

TEST(MarginalGainTest, EmptyBaseGivesSingletonValue) {
  const CoverageOracle f({{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(MarginalGain(f, {}, 1), f.Evaluate(std::vector<int>{1}));
}

TEST(MarginalGainTest, CoverageCountsNewItems) {
  // A = {1,2}, B = {2,3} over items {1,2,3} (0-based here).
  const CoverageOracle f({{0, 1}, {1, 2}});
  const std::vector<int> base = {0};
  EXPECT_DOUBLE_EQ(MarginalGain(f, base, 1), 1.0);
}

TEST(MarginalGainTest, RejectsElementInBase) {
  const ModularOracle f({1.0, 2.0});
  const std::vector<int> base = {1};
  EXPECT_THROW(MarginalGain(f, base, 1), ElementAlreadyPresent);
}

TEST(GreedyTest, TopTwoOfModular) {
  const ModularOracle f({5.0, 3.0, 2.0, 1.0});
  const GreedyTrace trace =
      GreedyMaximize(f, GroundSet(4), CardinalityConstraint(2));
  EXPECT_EQ(trace.chosen, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(trace.values.back(), 8.0);
}

TEST(GreedyTest, TiesGoToLowestId) {
  const ModularOracle f({1.0, 2.0, 2.0});
  const GreedyTrace trace =
      GreedyMaximize(f, GroundSet(3), CardinalityConstraint(1));
  EXPECT_EQ(trace.chosen, std::vector<int>{1});
}

TEST(GreedyTest, CoverageWithinApproximationOfBruteForce) {
  std::mt19937_64 rng(7);
  std::bernoulli_distribution in(0.35);
  std::vector<std::vector<int>> sets(8);
  for (auto& s : sets) {
    for (int u = 0; u < 10; ++u) {
      if (in(rng)) s.push_back(u);
    }
  }
  const CoverageOracle f(sets);
  const CardinalityConstraint k3(3);
  const double greedy = GreedyMaximize(f, GroundSet(8), k3).values.back();
  const double opt = BruteForceMaximize(f, GroundSet(8), k3).value;
  EXPECT_GE(greedy, (1.0 - std::exp(-1.0)) * opt);
  EXPECT_LE(greedy, opt);
}

TEST(GreedyTest, PositionSequentialPicksBestCandidate) {
  const ModularOracle f({0.1, 0.9, 0.4});
  GreedyOptions options;
  options.strategy = GreedyStrategy::kPositionSequential;
  options.positions = {{0, 1, 2}};
  const GreedyTrace trace =
      GreedyMaximize(f, GroundSet(3), CardinalityConstraint(3), options);
  EXPECT_EQ(trace.chosen, std::vector<int>{1});
}

TEST(GreedyTest, PositionSequentialKeepsOriginalWithoutGain) {
  const ModularOracle f({-1.0, 0.0, 2.0});
  GreedyOptions options;
  options.strategy = GreedyStrategy::kPositionSequential;
  options.positions = {{0, 1}, {2}};
  const GreedyTrace trace =
      GreedyMaximize(f, GroundSet(3), CardinalityConstraint(3), options);
  EXPECT_EQ(trace.chosen, std::vector<int>{2});
}

TEST(GreedyTest, StopsOnNonPositiveGainWhenAsked) {
  const ModularOracle f({3.0, -1.0, 0.0});
  GreedyOptions options;
  options.stop_when_no_gain = true;
  const GreedyTrace stopped =
      GreedyMaximize(f, GroundSet(3), CardinalityConstraint(3), options);
  EXPECT_EQ(stopped.chosen, std::vector<int>{0});
  const GreedyTrace full =
      GreedyMaximize(f, GroundSet(3), CardinalityConstraint(3));
  EXPECT_EQ(full.chosen.size(), 3u);
}

TEST(GreedyTest, PartitionAllowsOnePerGroup) {
  const ModularOracle f({1.0, 5.0, 4.0, 2.0});
  const PartitionConstraint constraint({{0, 1}, {2, 3}}, 2);
  const GreedyTrace trace = GreedyMaximize(f, GroundSet(4), constraint);
  EXPECT_EQ(trace.AsSubset(), (Subset{1, 2}));
}

TEST(GreedyTest, InfeasibleEmptySetThrows) {
  const ModularOracle f({1.0});
  const CustomConstraint never([](std::span<const int>) { return false; });
  EXPECT_THROW(GreedyMaximize(f, GroundSet(1), never), InfeasibleStart);
}

TEST(BruteForceTest, ModularTopTwo) {
  const ModularOracle f({5.0, 3.0, 2.0, 1.0});
  const BruteForceResult best =
      BruteForceMaximize(f, GroundSet(4), CardinalityConstraint(2));
  EXPECT_EQ(best.subset, (Subset{0, 1}));
  EXPECT_DOUBLE_EQ(best.value, 8.0);
}

TEST(BruteForceTest, OnlyEmptyFeasible) {
  const ModularOracle f({5.0, 3.0});
  const BruteForceResult best =
      BruteForceMaximize(f, GroundSet(2), CardinalityConstraint(0));
  EXPECT_TRUE(best.subset.empty());
  EXPECT_DOUBLE_EQ(best.value, 0.0);
}

TEST(BruteForceTest, TiesGoToLexicographicallySmallest) {
  const ModularOracle f({1.0, 1.0, 1.0});
  const BruteForceResult best =
      BruteForceMaximize(f, GroundSet(3), CardinalityConstraint(1));
  EXPECT_EQ(best.subset, Subset{0});
}

TEST(BruteForceTest, RejectsLargeGround) {
  const ModularOracle f(std::vector<double>(17, 1.0));
  EXPECT_THROW(BruteForceMaximize(f, GroundSet(17), CardinalityConstraint(1)),
               GroundSetTooLarge);
}

TEST(CheckSubmodularTest, ModularHasNoViolations) {
  EXPECT_TRUE(CheckSubmodular(ModularOracle({1.0, -2.0, 3.0}), GroundSet(3))
                  .empty());
}

TEST(CheckSubmodularTest, SquareIsSupermodular) {
  const FunctionOracle f(Square);
  const ViolationReport report = CheckSubmodular(f, GroundSet(3));
  EXPECT_GT(report.count, 0u);
  // Delta(e|{a}) = 3 exceeds Delta(e|{}) = 1.
  EXPECT_DOUBLE_EQ(report.worst_gap, 4.0);
}

TEST(CheckSubmodularTest, NonnegativeSumOfCoverageIsSubmodular) {
  const CoverageOracle a({{0, 1}, {1, 2}, {3}, {0, 3}});
  const CoverageOracle b({{2}, {0, 2}, {1}, {1, 3}}, {0.5, 2.0, 1.0, 3.0});
  WeightedSumOracle sum;
  sum.Add(0.7, a);
  sum.Add(2.5, b);
  EXPECT_TRUE(CheckSubmodular(sum, GroundSet(4)).empty());
}

TEST(CheckSubmodularTest, RejectsLargeGround) {
  EXPECT_THROW(CheckSubmodular(ModularOracle(std::vector<double>(13, 1.0)),
                               GroundSet(13)),
               GroundSetTooLarge);
}

TEST(CheckMonotoneTest, CoverageIsMonotone) {
  EXPECT_TRUE(
      CheckMonotone(CoverageOracle({{0}, {0, 1}, {2}}), GroundSet(3)).empty());
}

TEST(CheckMonotoneTest, DecreasingFunctionViolatesEveryInclusion) {
  const FunctionOracle f(
      [](std::span<const int> s) { return -static_cast<double>(s.size()); });
  // Proper inclusions A < B over 3 elements: 3^3 - 2^3 = 19.
  EXPECT_EQ(CheckMonotone(f, GroundSet(3)).count, 19u);
}

TEST(MemoizedOracleTest, CachesBySubset) {
  int calls = 0;
  const FunctionOracle f([&](std::span<const int> s) {
    ++calls;
    return static_cast<double>(s.size());
  });
  const MemoizedOracle memo(f);
  const std::vector<int> s = {0, 2};
  EXPECT_DOUBLE_EQ(memo.Evaluate(s), 2.0);
  EXPECT_DOUBLE_EQ(memo.Evaluate(s), 2.0);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(memo.misses(), 1u);
}

TEST(MaskToSubsetTest, ListsSetBits) {
  EXPECT_EQ(MaskToSubset(0b1011u), (Subset{0, 1, 3}));
}

}  // namespace
}  // namespace disco
