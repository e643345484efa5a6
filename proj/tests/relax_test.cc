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

#include "disco/relax.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "disco/errors.h"
#include "disco/models.h"

namespace disco {
namespace {

// score = sum_i c . x_i, optionally NaN.
class LinearOracle : public DifferentiableOracle {
 public:
  explicit LinearOracle(Vector c, bool poisoned = false)
      : c_(std::move(c)), poisoned_(poisoned) {}
  int dimension() const override { return static_cast<int>(c_.size()); }
  double Score(const Embeddings& x) const override {
    Embeddings g;
    return ScoreAndGradient(x, &g);
  }
  double ScoreAndGradient(const Embeddings& x,
                          Embeddings* grad) const override {
    double s = 0.0;
    grad->assign(x.size(), c_);
    for (const auto& v : x) {
      for (std::size_t d = 0; d < c_.size(); ++d) s += c_[d] * v[d];
    }
    return poisoned_ ? std::numeric_limits<double>::quiet_NaN() : s;
  }

 private:
  Vector c_;
  bool poisoned_;
};

CandidateSet TwoByTwo() {
  CandidateSet c;
  c.positions = {{{0, {1.0, 0.0}}, {1, {0.0, 1.0}}},
                 {{2, {0.5, 0.5}}, {3, {2.0, -1.0}}}};
  return c;
}

TEST(AlphaFromBetaTest, HandValues) {
  const GroupLayout layout({2, 2, 3});
  const BetaVector beta(layout, {1, 1, 2, 0, 1, 2, 3});
  const Vector alpha = AlphaFromBeta(beta, 1);
  EXPECT_DOUBLE_EQ(alpha[0], 0.5);
  EXPECT_DOUBLE_EQ(alpha[1], 0.5);
  EXPECT_DOUBLE_EQ(alpha[2], 1.0);
  EXPECT_DOUBLE_EQ(alpha[3], 0.0);
  EXPECT_NEAR(alpha[4], 1.0 / 14, 1e-15);
  EXPECT_NEAR(alpha[5], 4.0 / 14, 1e-15);
  EXPECT_NEAR(alpha[6], 9.0 / 14, 1e-15);
}

TEST(AlphaFromBetaTest, ZeroGroupThrows) {
  const BetaVector beta(GroupLayout({2}), {0.0, 0.0});
  EXPECT_THROW(AlphaFromBeta(beta, 1), DegenerateGroup);
}

TEST(BetaVectorTest, RejectsBadValues) {
  EXPECT_THROW(BetaVector(GroupLayout({2}), {1.0}), InvalidArgument);
  EXPECT_THROW(BetaVector(GroupLayout({1}), {std::nan("")}), InvalidArgument);
}

TEST(BlendInputsTest, HandValues) {
  CandidateSet c;
  c.positions = {{{0, {7.0, 7.0}}, {1, {-1.0, 2.0}}},
                 {{2, {2.0, 0.0}}, {3, {0.0, 2.0}}},
                 {{4, {1.0, 0.0}}, {5, {0.0, 1.0}}, {6, {1.0, 1.0}}}};
  const GroupLayout layout({2, 2, 3});
  const Vector alpha = {1, 0, 0.5, 0.5, 1.0 / 14, 4.0 / 14, 9.0 / 14};
  const Embeddings x = BlendInputs(layout, alpha, c);
  EXPECT_EQ(x[0], (Vector{7.0, 7.0}));
  EXPECT_EQ(x[1], (Vector{1.0, 1.0}));
  EXPECT_NEAR(x[2][0], 10.0 / 14, 1e-15);
  EXPECT_NEAR(x[2][1], 13.0 / 14, 1e-15);
}

TEST(BlendInputsTest, ShapeMismatchThrows) {
  const CandidateSet c = TwoByTwo();
  EXPECT_THROW(BlendInputs(GroupLayout({2, 3}), Vector(5, 0.2), c),
               DimensionMismatch);
}

TEST(ObjectivePhiTest, ZeroLambdaIsSmoothPart) {
  const LinearOracle oracle({1.0, -2.0});
  const CandidateSet c = TwoByTwo();
  const RelaxedObjective objective(oracle, c, 1);
  const BetaVector beta(objective.layout(), {0.3, -1.2, 0.7, 0.1});
  RelaxationParams params;
  const PhiValue v = ObjectivePhi(objective, beta, params);
  EXPECT_EQ(v.phi, v.f);
  EXPECT_EQ(v.h, 0.0);
}

TEST(ObjectivePhiTest, L1OnSphereWithinNormBound) {
  CandidateSet c;
  c.positions = {{{0, {1.0}}, {1, {2.0}}}, {{2, {0.0}}, {3, {1.0}}, {4, {3.0}}}};
  const LinearOracle oracle({1.0});
  const RelaxedObjective objective(oracle, c, 1);
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0);
  const BetaVector beta(objective.layout(), {r2, -r2, r3, r3, -r3});
  RelaxationParams params;
  params.lambda = 1.0;
  const PhiValue v = ObjectivePhi(objective, beta, params);
  EXPECT_NEAR(v.h, 2 * r2 + 3 * r3, 1e-15);
  EXPECT_LE(v.h, std::sqrt(2.0) + std::sqrt(3.0) + 1e-15);
}

TEST(ObjectivePhiTest, ShrinkingBetaLowersPhiOnly) {
  const LinearOracle oracle({1.0, -2.0});
  const CandidateSet c = TwoByTwo();
  const RelaxedObjective objective(oracle, c, 2);
  const Vector values = {0.3, -1.2, 0.7, 0.1};
  Vector scaled = values;
  for (double& v : scaled) v *= 0.5;
  RelaxationParams params;
  params.p = 2;
  params.lambda = 0.3;
  const PhiValue full =
      ObjectivePhi(objective, BetaVector(objective.layout(), values), params);
  const PhiValue half =
      ObjectivePhi(objective, BetaVector(objective.layout(), scaled), params);
  EXPECT_LT(half.phi, full.phi);
  EXPECT_NEAR(half.f, full.f, 1e-14);
}

TEST(GradPhiSmoothTest, SymmetricGroupGivesOppositeComponents) {
  const LinearOracle oracle({1.0, 0.0});
  CandidateSet c;
  c.positions = {{{0, {1.0, 0.0}}, {1, {3.0, 0.0}}}};
  const RelaxedObjective objective(oracle, c, 1);
  const Vector g =
      GradPhiSmooth(objective, BetaVector(objective.layout(), {1.0, 1.0}));
  EXPECT_NEAR(g[0], -g[1], 1e-15);
  EXPECT_NE(g[0], 0.0);
}

Vector CentralDifference(const SmoothObjective& objective,
                         const GroupLayout& layout, Vector x, double h) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = objective.Value(BetaVector(layout, x));
    x[i] = keep - h;
    const double down = objective.Value(BetaVector(layout, x));
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

TEST(GradPhiSmoothTest, MatchesFiniteDifferences) {
  const MeanEmbeddingModel model(
      {0.5, -1.0}, MeanEmbeddingModel::Direction::kMaximizeDistance);
  const CandidateSet c = TwoByTwo();
  for (int p = 1; p <= 3; ++p) {
    const RelaxedObjective objective(model, c, p);
    for (const Vector& x : {Vector{0.4, -0.9, 1.3, 0.2},
                            Vector{10.0, 0.05, 10.0, 0.05}}) {
      const Vector analytic =
          GradPhiSmooth(objective, BetaVector(objective.layout(), x));
      const Vector numeric =
          CentralDifference(objective, objective.layout(), x, 1e-5);
      for (std::size_t i = 0; i < x.size(); ++i) {
        ASSERT_TRUE(std::isfinite(analytic[i]));
        EXPECT_NEAR(analytic[i], numeric[i],
                    1e-5 * std::max(1.0, std::abs(numeric[i])))
            << "p=" << p << " i=" << i;
      }
    }
  }
}

TEST(ProxL1Test, Branches) {
  EXPECT_DOUBLE_EQ(ProxL1(Vector{1.2}, 0.5)[0], 0.7);
  EXPECT_DOUBLE_EQ(ProxL1(Vector{-1.2}, 0.5)[0], -0.7);
  EXPECT_EQ(ProxL1(Vector{-0.3}, 0.5)[0], 0.0);
  const Vector v = {3.0, -2.0, 0.0, 1e-9};
  EXPECT_EQ(ProxL1(v, 0.0), v);
}

TEST(ProjectGroupSphereTest, HandValues) {
  const BetaVector beta(GroupLayout({2, 4}), {3, 4, 1, 1, 1, 1});
  const BetaVector out = ProjectGroupSphere(beta, 1);
  const Vector expected = {0.6, 0.8, 0.5, 0.5, 0.5, 0.5};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(out.values()[i], expected[i], 1e-15);
  EXPECT_LE(FeasibilityResidual(out, 1), 1e-15);
  const BetaVector again = ProjectGroupSphere(out, 1);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(again.values()[i], out.values()[i], 1e-12);
  }
}

TEST(ProjectGroupSphereTest, ZeroGroupReported) {
  const BetaVector beta(GroupLayout({2, 1}), {0.0, 0.0, 2.0});
  std::vector<int> degenerate;
  const BetaVector out = ProjectGroupSphere(beta, 2, &degenerate);
  EXPECT_EQ(degenerate, std::vector<int>{0});
  EXPECT_EQ(out.values(), (Vector{0.0, 0.0, 1.0}));
}

TEST(InitBetaTest, TheoremAndPractical) {
  const BetaVector t = InitBeta(GroupLayout({4}), 1, RelaxationMode::kTheorem);
  for (double v : t.values()) EXPECT_DOUBLE_EQ(v, 0.5);
  const BetaVector t3 = InitBeta(GroupLayout({3}), 2, RelaxationMode::kTheorem);
  double z = 0.0;
  for (double v : t3.values()) {
    EXPECT_NEAR(v, std::pow(3.0, -0.25), 1e-15);
    z += std::pow(v, 4);
  }
  EXPECT_NEAR(z, 1.0, 1e-14);
  const BetaVector p =
      InitBeta(GroupLayout({3}), 1, RelaxationMode::kPractical);
  EXPECT_EQ(p.values(), (Vector{10.0, 0.05, 0.05}));
  for (auto mode : {RelaxationMode::kTheorem, RelaxationMode::kPractical}) {
    EXPECT_EQ(InitBeta(GroupLayout({1}), 1, mode, true).values(), Vector{1.0});
  }
}

TEST(DiscoOptimizeTest, ConvergesToProjectedTarget) {
  // f = 0.5 ||beta - t||^2 with t = (3, 4).
  const QuadraticObjective f(2, {1, 0, 0, 1}, {3, 4}, 12.5);
  RelaxationParams params;
  params.mode = RelaxationMode::kTheorem;
  params.eta = 0.5;
  params.lipschitz = 1.0;
  params.max_iters = 200;
  const OptimizerTrace trace = DiscoOptimize(f, GroupLayout({2}), params);
  EXPECT_NEAR(trace.final_beta.values()[0], 0.6, 1e-6);
  EXPECT_NEAR(trace.final_beta.values()[1], 0.8, 1e-6);
  for (std::size_t k = 1; k < trace.phi_values.size(); ++k) {
    EXPECT_LE(trace.phi_values[k], trace.phi_values[k - 1] + 1e-12);
  }
}

TEST(DiscoOptimizeTest, TheoremModeRejectsLongStep) {
  const QuadraticObjective f(2, {1, 0, 0, 1}, {3, 4});
  RelaxationParams params;
  params.mode = RelaxationMode::kTheorem;
  params.eta = 1.0;
  params.lipschitz = 1.0;
  EXPECT_THROW(DiscoOptimize(f, GroupLayout({2}), params), InvalidArgument);
}

TEST(DiscoOptimizeTest, TheoremModeEstimatesStep) {
  const QuadraticObjective f(3, {2, 0, 0, 0, 1, 0, 0, 0, 1}, {1, 1, 1});
  RelaxationParams params;
  params.mode = RelaxationMode::kTheorem;
  params.max_iters = 5;
  const OptimizerTrace trace = DiscoOptimize(f, GroupLayout({3}), params);
  EXPECT_GT(trace.lipschitz, 0.0);
  EXPECT_DOUBLE_EQ(trace.eta, 0.9 / trace.lipschitz);
}

TEST(DiscoOptimizeTest, WholeGroupProxIsSkipped) {
  const QuadraticObjective f(2, {1, 0, 0, 1}, {0.1, 0.1});
  RelaxationParams params;
  params.mode = RelaxationMode::kTheorem;
  params.lambda = 100.0;
  params.lipschitz = 1.0;
  params.max_iters = 3;
  const OptimizerTrace trace = DiscoOptimize(f, GroupLayout({2}), params);
  EXPECT_EQ(trace.prox_skips, 3);
  EXPECT_LE(trace.residuals.back(), 1e-12);
}

TEST(DiscoOptimizeTest, PracticalModeImprovesAttackObjective) {
  const LinearOracle oracle({1.0, -2.0});
  const CandidateSet c = TwoByTwo();
  RelaxationParams params;
  params.max_iters = 100;
  const OptimizerTrace trace = DiscoOptimize(oracle, c, params);
  ASSERT_EQ(trace.iterations(), 100);
  EXPECT_LT(trace.f_values.back(), trace.f_values.front());
  // Group 0: original scores 1, replacement -2. Group 1: original -0.5,
  // replacement 4.
  EXPECT_EQ(RoundToOneHot(trace.final_beta), (TransformationIndex{0, 1}));
}

TEST(DiscoOptimizeTest, NonFiniteObjectiveAborts) {
  const LinearOracle oracle({1.0, 0.0}, true);
  const CandidateSet c = TwoByTwo();
  const OptimizerTrace trace = DiscoOptimize(oracle, c, RelaxationParams{});
  EXPECT_TRUE(trace.aborted);
  EXPECT_EQ(trace.iterations(), 0);
}

TEST(RoundToOneHotTest, ArgmaxAndTies) {
  const BetaVector beta(GroupLayout({3, 2}), {0.1, -0.9, 0.3, 0.5, 0.5});
  EXPECT_EQ(RoundToOneHot(beta), (TransformationIndex{1, 0}));
  const BetaVector init =
      InitBeta(GroupLayout({2, 3, 4}), 1, RelaxationMode::kTheorem);
  EXPECT_EQ(RoundToOneHot(init), (TransformationIndex{0, 0, 0}));
}

TEST(EnforceBudgetTest, KeepsLargestMargins) {
  const BetaVector beta(GroupLayout({2, 2, 2}),
                        {0.0, 0.9, 0.3, 0.5, 0.1, 0.6});
  const TransformationIndex index = {1, 1, 1};
  EXPECT_EQ(EnforceBudget(index, beta, 1), (TransformationIndex{1, 0, 0}));
  EXPECT_EQ(EnforceBudget(index, beta, 2), (TransformationIndex{1, 0, 1}));
  EXPECT_EQ(EnforceBudget(index, beta, 3), index);
  EXPECT_EQ(EnforceBudget({0, 0, 0}, beta, 0), (TransformationIndex{0, 0, 0}));
}

TEST(DefaultLambdaTest, Formula) {
  // n = 2, sum (k - 1) = 1 + 3.
  EXPECT_DOUBLE_EQ(DefaultLambda(2.0, GroupLayout({2, 4})),
                   6.0 / (20.0 + 0.05 * 4));
}

TEST(WriteTraceTest, OneLinePerIterate) {
  const QuadraticObjective f(2, {1, 0, 0, 1}, {3, 4});
  RelaxationParams params;
  params.mode = RelaxationMode::kTheorem;
  params.lipschitz = 1.0;
  params.max_iters = 4;
  std::ostringstream out;
  WriteTrace(out, DiscoOptimize(f, GroupLayout({2}), params));
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "# iter f h phi residual");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(ParseModeTest, RoundTrip) {
  for (auto mode : {RelaxationMode::kTheorem, RelaxationMode::kPractical}) {
    EXPECT_EQ(ParseMode(ModeName(mode)), mode);
  }
  EXPECT_THROW(ParseMode("fast"), InvalidArgument);
}

}  // namespace
}  // namespace disco
