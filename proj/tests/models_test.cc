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

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "disco/errors.h"

namespace disco {
namespace {

using Direction = MeanEmbeddingModel::Direction;
using Aggregation = MeanEmbeddingModel::Aggregation;

// Score = c . x_0 for a single-position input.
class Probe : public DifferentiableOracle {
 public:
  explicit Probe(Vector c) : c_(std::move(c)) {}
  int dimension() const override { return static_cast<int>(c_.size()); }
  double Score(const Embeddings& x) const override {
    double s = 0.0;
    for (const auto& v : x) {
      for (std::size_t d = 0; d < c_.size(); ++d) s += c_[d] * v[d];
    }
    return s;
  }
  double ScoreAndGradient(const Embeddings& x, Embeddings* g) const override {
    g->assign(x.size(), c_);
    return Score(x);
  }

 private:
  Vector c_;
};

Vector NumericGradient(const DifferentiableOracle& m, Embeddings x,
                       double h = 1e-6) {
  Vector out;
  for (auto& v : x) {
    for (double& c : v) {
      const double keep = c;
      c = keep + h;
      const double up = m.Score(x);
      c = keep - h;
      const double down = m.Score(x);
      c = keep;
      out.push_back((up - down) / (2 * h));
    }
  }
  return out;
}

void ExpectGradientMatches(const DifferentiableOracle& m, const Embeddings& x,
                           double tolerance) {
  Embeddings g;
  m.ScoreAndGradient(x, &g);
  const Vector numeric = NumericGradient(m, x);
  std::size_t k = 0;
  for (const auto& row : g) {
    for (double v : row) {
      EXPECT_NEAR(v, numeric[k], tolerance * std::max(1.0, std::abs(v)));
      ++k;
    }
  }
}

TEST(MeanEmbeddingModelTest, ZeroAtTarget) {
  const MeanEmbeddingModel m({1.0, 2.0}, Direction::kMaximizeDistance);
  Embeddings g;
  EXPECT_EQ(m.ScoreAndGradient({{1.0, 2.0}, {1.0, 2.0}}, &g), 0.0);
  for (const auto& row : g) EXPECT_EQ(row, (Vector{0.0, 0.0}));
}

TEST(MeanEmbeddingModelTest, UnitOffset) {
  const MeanEmbeddingModel m({0.0, 0.0}, Direction::kMaximizeDistance);
  Embeddings g;
  EXPECT_DOUBLE_EQ(m.ScoreAndGradient({{1.0, 0.0}}, &g), 1.0);
  EXPECT_EQ(g[0], (Vector{2.0, 0.0}));
}

TEST(MeanEmbeddingModelTest, MinimizeNegatesAndSumAggregates) {
  const MeanEmbeddingModel m({1.0}, Direction::kMinimizeDistance,
                             Aggregation::kSum);
  EXPECT_DOUBLE_EQ(m.Score({{2.0}, {3.0}}), -16.0);
  EXPECT_DOUBLE_EQ(m.Distance({{2.0}, {3.0}}), 16.0);
  EXPECT_THROW(m.Score({{1.0, 2.0}}), DimensionMismatch);
}

TEST(MeanEmbeddingModelTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (auto dir : {Direction::kMaximizeDistance, Direction::kMinimizeDistance}) {
    for (auto agg : {Aggregation::kMean, Aggregation::kSum}) {
      const MeanEmbeddingModel m({n(rng), n(rng), n(rng)}, dir, agg);
      Embeddings x(4, Vector(3));
      for (auto& v : x) {
        for (double& c : v) c = n(rng);
      }
      ExpectGradientMatches(m, x, 1e-6);
    }
  }
}

WcnnModel OneFilter(Vector filter, Activation act = Activation::kIdentity) {
  WcnnModel m;
  m.embedding_dim = 2;
  m.window = 2;
  m.stride = 2;
  m.filters = {std::move(filter)};
  m.filter_bias = {0.0};
  m.output_weights = {1.0};
  m.activation = act;
  return m;
}

TEST(WcnnModelTest, FilterEqualToWindowGivesSquaredNorm) {
  const Embeddings x = {{0.1, 0.0}, {0.0, 0.2}, {1.0, 2.0}, {3.0, -1.0}};
  const WcnnModel m = OneFilter({1.0, 2.0, 3.0, -1.0});
  EXPECT_DOUBLE_EQ(m.Score(x), 1 + 4 + 9 + 1);
}

TEST(WcnnModelTest, ZeroInputIsZero) {
  const WcnnModel m = OneFilter({1.0, 2.0, 3.0, -1.0});
  EXPECT_EQ(m.Score(Embeddings(4, Vector(2, 0.0))), 0.0);
}

TEST(WcnnModelTest, UntiledLengthThrows) {
  const WcnnModel m = OneFilter({1.0, 2.0, 3.0, -1.0});
  EXPECT_THROW(m.Score(Embeddings(3, Vector(2, 0.0))), ShapeError);
}

TEST(WcnnModelTest, GradientMatchesFiniteDifferences) {
  WcnnModel m = OneFilter({0.3, -0.7, 1.1, 0.4}, Activation::kTanh);
  m.filters.push_back({-0.2, 0.5, 0.9, -1.3});
  m.filter_bias = {0.1, -0.3};
  m.output_weights = {0.8, -1.4};
  m.stride = 1;
  const Embeddings x = {{0.5, -0.2}, {1.0, 0.3}, {-0.4, 0.9}, {0.2, 0.2}};
  ExpectGradientMatches(m, x, 1e-6);
}

TEST(RnnModelTest, IdentityTelescopes) {
  RnnModel m;
  m.recurrence = 1.0;
  m.input_weights = {2.0, -1.0};
  m.bias = 0.0;
  m.output_weight = 1.0;
  m.activation = Activation::kIdentity;
  const Embeddings x = {{1.0, 1.0}, {0.5, 2.0}, {-1.0, 0.0}};
  EXPECT_DOUBLE_EQ(m.Score(x), 1.0 + (1.0 - 2.0) + (-2.0));
}

TEST(RnnModelTest, SingleConcaveStep) {
  RnnModel m;
  m.input_weights = {1.0};
  m.bias = 0.7;
  m.output_weight = 2.5;
  EXPECT_DOUBLE_EQ(m.Score({{0.0}}), 2.5 * (1.0 - std::exp(-0.7)));
}

TEST(RnnModelTest, GradientMatchesFiniteDifferences) {
  for (Activation act : {Activation::kOneMinusExp, Activation::kTanh,
                         Activation::kSigmoid, Activation::kSoftplus}) {
    RnnModel m;
    m.recurrence = 0.6;
    m.input_weights = {0.4, -1.1};
    m.bias = 0.3;
    m.output_weight = 1.7;
    m.activation = act;
    ExpectGradientMatches(m, {{0.2, -0.3}, {0.5, 0.1}, {-0.2, 0.4}}, 1e-6);
  }
}

TEST(ActivationTest, NamesRoundTrip) {
  for (Activation a : {Activation::kIdentity, Activation::kRelu,
                       Activation::kTanh, Activation::kSigmoid,
                       Activation::kSoftplus, Activation::kOneMinusExp}) {
    EXPECT_EQ(ParseActivation(ActivationName(a)), a);
  }
  EXPECT_THROW(ParseActivation("gelu"), InvalidArgument);
}

TEST(TransformationSetOracleTest, EmptySetIsZero) {
  const Probe model({1.0});
  CandidateSet c;
  c.positions = {{{0, {1.0}}, {1, {1.4}}}};
  EXPECT_EQ(AsSetOracle(model, c).EmptyValue(), 0.0);
}

TEST(TransformationSetOracleTest, SingleImprovingCandidate) {
  const Probe model({1.0});
  CandidateSet c;
  c.positions = {{{0, {1.0}}, {1, {1.4}}}};
  EXPECT_NEAR(AsSetOracle(model, c).Evaluate(std::vector<int>{0}), 0.4,
              1e-15);
}

TEST(TransformationSetOracleTest, InnerMaxMatchesEnumeration) {
  const MeanEmbeddingModel model({0.3, -0.2}, Direction::kMaximizeDistance);
  CandidateSet c;
  c.positions = {{{0, {0.0, 0.0}}, {1, {1.0, -0.5}}},
                 {{2, {0.2, 0.1}}, {3, {-0.7, 0.4}}}};
  double best = -1e300;
  TransformationIndex best_index;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double s = model.Score(c.Select({a, b}));
      if (s > best) {
        best = s;
        best_index = {a, b};
      }
    }
  }
  const auto oracle =
      AsSetOracle(model, c, TransformationSetOracle::InnerMax::kAlways);
  const std::vector<int> both = {0, 1};
  EXPECT_DOUBLE_EQ(oracle.Evaluate(both), best - model.Score(c.Original()));
  EXPECT_EQ(oracle.BestTransformation(both), best_index);
}

TEST(SubstitutionSetOracleTest, OneElementPerReplacement) {
  const Probe model({1.0});
  CandidateSet c;
  c.positions = {{{0, {0.0}}, {1, {1.0}}, {2, {2.0}}}, {{3, {0.0}}},
                 {{4, {5.0}}, {5, {4.0}}}};
  const SubstitutionSetOracle oracle(model, c);
  EXPECT_EQ(oracle.ground_size(), 3);
  EXPECT_EQ(oracle.position_groups(),
            (std::vector<std::vector<int>>{{0, 1}, {}, {2}}));
  EXPECT_DOUBLE_EQ(oracle.Evaluate(std::vector<int>{1, 2}), 2.0 - 1.0);
  EXPECT_THROW(oracle.Evaluate(std::vector<int>{0, 1}), InvalidArgument);
}

TEST(FilterOutputIncreasingTest, KeepsOnlyImprovements) {
  const Probe model({1.0});
  CandidateSet c;
  c.positions = {{{0, {1.0}}, {0, {1.0}}, {1, {1.3}}, {2, {0.5}}}};
  const FilteredCandidates f = FilterOutputIncreasing(model, c);
  ASSERT_EQ(f.candidates.positions[0].size(), 2u);
  EXPECT_EQ(f.candidates.positions[0][1].token, 1);
  EXPECT_EQ(f.dropped, 2);
  EXPECT_TRUE(f.warning.empty());
}

TEST(FilterOutputIncreasingTest, WarnsWhenNothingSurvives) {
  const Probe model({1.0});
  CandidateSet c;
  c.positions = {{{0, {1.0}}, {1, {0.3}}}, {{2, {2.0}}, {3, {-1.0}}}};
  const FilteredCandidates f = FilterOutputIncreasing(model, c);
  EXPECT_EQ(f.candidates.GroupSizes(), (std::vector<int>{1, 1}));
  EXPECT_FALSE(f.warning.empty());
}

double MinimumDistance(const SubsetSumInstance& inst) {
  const int n = inst.candidates.num_positions();
  double best = 1e300;
  for (int mask = 0; mask < (1 << n); ++mask) {
    TransformationIndex index(n);
    for (int i = 0; i < n; ++i) index[i] = (mask >> i) & 1;
    best = std::min(best, inst.Distance(index));
  }
  return best;
}

TEST(SubsetSumInstanceTest, BruteForceDistances) {
  const std::vector<long long> a = {3, 5, 2};
  const auto hit = MakeSubsetSumInstance(a, 8, 2);
  EXPECT_EQ(MinimumDistance(hit), 0.0);
  EXPECT_EQ(hit.Distance({0, 0, 1}), 0.0);
  const std::vector<long long> b = {2, 4};
  EXPECT_EQ(MinimumDistance(MakeSubsetSumInstance(b, 5, 1)), 1.0);
  const std::vector<long long> c = {7};
  const auto single = MakeSubsetSumInstance(c, 7, 3);
  EXPECT_EQ(single.Distance({0}), 0.0);
}

TEST(SubsetSumInstanceTest, ExtraZeroReplacements) {
  const std::vector<long long> a = {4, 1};
  const auto inst = MakeSubsetSumInstance(a, 1, 2, 3);
  EXPECT_EQ(inst.candidates.GroupSizes(), (std::vector<int>{4, 4}));
  EXPECT_EQ(inst.Distance({2, 0}), 0.0);
}

// Two well separated clusters along the first axis.
struct Separable {
  EmbeddingTable table{2};
  Dataset data;
};

Separable MakeSeparable(int per_class, std::uint64_t seed) {
  Separable s;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int i = 0; i < 10; ++i) {
    s.table.Add("n" + std::to_string(i), {-1.0 + noise(rng), noise(rng)});
    s.table.Add("p" + std::to_string(i), {1.0 + noise(rng), noise(rng)});
  }
  s.data.label_names = {"neg", "pos"};
  std::uniform_int_distribution<int> pick(0, 9);
  for (int i = 0; i < 2 * per_class; ++i) {
    Example ex;
    ex.label = i % 2;
    for (int t = 0; t < 5; ++t) ex.tokens.push_back(2 * pick(rng) + ex.label);
    s.data.examples.push_back(ex);
  }
  return s;
}

TEST(TrainLinearVictimTest, SeparableDataGeneralizes) {
  const Separable train = MakeSeparable(40, 1);
  TrainOptions options;
  options.seed = 5;
  const TrainResult r = TrainLinearVictim(train.data, train.table, options);
  EXPECT_GE(r.train_accuracy, 0.95);
  EXPECT_TRUE(r.victim.trained());
  Separable held_out = MakeSeparable(40, 2);
  held_out.table = train.table;
  EXPECT_GE(Accuracy(r.victim, held_out.data, train.table), 0.95);
}

TEST(TrainLinearVictimTest, SingleClassThrows) {
  Separable s = MakeSeparable(5, 1);
  s.data.label_names = {"only"};
  for (auto& ex : s.data.examples) ex.label = 0;
  EXPECT_THROW(TrainLinearVictim(s.data, s.table, {}), InvalidArgument);
}

TEST(TrainLinearVictimTest, ZeroEpochsIsChance) {
  const Separable s = MakeSeparable(20, 1);
  TrainOptions options;
  options.epochs = 0;
  const TrainResult r = TrainLinearVictim(s.data, s.table, options);
  EXPECT_FALSE(r.victim.trained());
  EXPECT_DOUBLE_EQ(r.train_accuracy, 0.5);
}

TEST(TrainLinearVictimTest, DeterministicForSeed) {
  const Separable s = MakeSeparable(20, 1);
  TrainOptions options;
  options.epochs = 20;
  options.seed = 9;
  const auto a = TrainLinearVictim(s.data, s.table, options).victim;
  const auto b = TrainLinearVictim(s.data, s.table, options).victim;
  EXPECT_EQ(a.weights(), b.weights());
}

TEST(LinearVictimTest, SaveLoadRoundTrip) {
  const Separable s = MakeSeparable(20, 1);
  TrainOptions options;
  options.epochs = 10;
  const LinearVictim v = TrainLinearVictim(s.data, s.table, options).victim;
  std::stringstream io;
  v.Save(io);
  const LinearVictim back = LinearVictim::Load(io);
  EXPECT_EQ(back.label_names(), v.label_names());
  EXPECT_EQ(back.weights(), v.weights());
  EXPECT_EQ(back.bias(), v.bias());
  EXPECT_TRUE(back.trained());
}

TEST(LinearVictimTest, RejectsBadHeader) {
  std::istringstream in("not a victim\n");
  EXPECT_THROW(LinearVictim::Load(in), IoFailure);
}

TEST(LinearVictimTest, PredictTiesToLowestClass) {
  const LinearVictim v({"a", "b", "c"}, 2);
  EXPECT_EQ(v.Predict({0.3, -0.1}), 0);
  EXPECT_NEAR(v.Loss({0.3, -0.1}, 2), std::log(3.0), 1e-15);
}

TEST(VictimLossOracleTest, GradientMatchesFiniteDifferences) {
  LinearVictim v({"a", "b", "c"}, 2);
  v.mutable_weights() = {{0.5, -1.0}, {1.5, 0.2}, {-0.3, 0.8}};
  v.mutable_bias() = {0.1, -0.2, 0.05};
  const VictimLossOracle oracle(v, 1);
  ExpectGradientMatches(oracle, {{0.3, 0.1}, {-0.5, 0.7}, {1.0, -0.2}}, 1e-6);
  EXPECT_THROW(VictimLossOracle(v, 3), InvalidArgument);
}

TEST(TokenFeatureTest, UnembeddedTokenThrows) {
  EmbeddingTable t(1);
  t.Add("a", {1.0});
  const std::vector<int> tokens = {0, 4};
  EXPECT_THROW(LinearVictim::TokenFeature(tokens, t), UnembeddedToken);
}

}  // namespace
}  // namespace disco
