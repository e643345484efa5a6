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

#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "disco/errors.h"

namespace disco {
namespace {

constexpr AttackMethod kAllMethods[] = {AttackMethod::kGreedyMarginal,
                                        AttackMethod::kGreedySequential,
                                        AttackMethod::kDisco};

// "good" and "bad" straddle the decision boundary and are each other's only
// neighbour; "plain" is far from both.
struct FlipWorld {
  EmbeddingTable table{2};
  Dataset data;
  LinearVictim victim{{"pos", "neg"}, 2};

  FlipWorld() {
    table.Add("good", {0.1, 0.0});
    table.Add("bad", {-0.1, 0.0});
    table.Add("plain", {0.0, 3.0});
    victim.mutable_weights() = {{10.0, 0.0}, {-10.0, 0.0}};
    victim.set_trained(true);
    data.label_names = {"pos", "neg"};
    data.examples = {{0, {0, 2}}};
  }
};

AttackConfig OneExample(AttackMethod method) {
  AttackConfig c;
  c.method = method;
  c.budget = 1;
  c.samples = 1;
  return c;
}

TEST(RunAttackTest, DecisiveFlipForEveryMethod) {
  const FlipWorld w;
  for (AttackMethod method : kAllMethods) {
    SCOPED_TRACE(MethodName(method));
    const auto results = RunAttack(w.victim, w.table, w.data,
                                   OneExample(method));
    ASSERT_EQ(results.size(), 1u);
    const AttackResult& r = results[0];
    EXPECT_TRUE(r.failure.empty()) << r.failure;
    EXPECT_EQ(r.original_prediction, 0);
    EXPECT_EQ(r.adversarial_prediction, 1);
    EXPECT_EQ(r.adversarial_tokens, (std::vector<int>{1, 2}));
    EXPECT_EQ(r.tokens_changed, 1);
    EXPECT_EQ(r.token_count, 2);
    EXPECT_GT(r.loss_after, r.loss_before);
  }
}

TEST(RunAttackTest, EmptyBallIsIdentity) {
  const FlipWorld w;
  for (AttackMethod method : kAllMethods) {
    AttackConfig c = OneExample(method);
    c.eta_ball = 0.0;
    const AttackResult r = RunAttack(w.victim, w.table, w.data, c)[0];
    EXPECT_EQ(r.adversarial_tokens, r.original_tokens);
    EXPECT_EQ(r.tokens_changed, 0);
  }
}

TEST(RunAttackTest, ZeroBudgetIsIdentity) {
  const FlipWorld w;
  for (AttackMethod method : kAllMethods) {
    AttackConfig c = OneExample(method);
    c.budget = 0;
    const AttackResult r = RunAttack(w.victim, w.table, w.data, c)[0];
    EXPECT_EQ(r.adversarial_tokens, r.original_tokens);
    EXPECT_EQ(r.adversarial_prediction, 0);
  }
}

TEST(RunAttackTest, InvalidConfigThrows) {
  const FlipWorld w;
  AttackConfig c = OneExample(AttackMethod::kDisco);
  c.eta_ball = 2.0;
  EXPECT_THROW(RunAttack(w.victim, w.table, w.data, c), InvalidArgument);
}

TEST(MethodNameTest, RoundTrip) {
  for (AttackMethod method : kAllMethods) {
    EXPECT_EQ(ParseMethod(MethodName(method)), method);
  }
  EXPECT_THROW(ParseMethod("beam"), InvalidArgument);
}

AttackResult Outcome(int label, int before, int after, int changed,
                     int count) {
  AttackResult r;
  r.label = label;
  r.original_prediction = before;
  r.adversarial_prediction = after;
  r.tokens_changed = changed;
  r.token_count = count;
  return r;
}

TEST(ComputeMetricsTest, PerturbationIsMeanFraction) {
  const auto m = ComputeMetrics({Outcome(0, 0, 1, 1, 4), Outcome(1, 1, 1, 1, 10)});
  EXPECT_DOUBLE_EQ(m.perturbation, 0.175);
  EXPECT_DOUBLE_EQ(m.initial_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.adversarial_accuracy, 0.5);
}

TEST(ComputeMetricsTest, NoFlipsAndAllFlips) {
  const auto none = ComputeMetrics({Outcome(0, 0, 0, 0, 5), Outcome(1, 0, 0, 0, 5)});
  EXPECT_DOUBLE_EQ(none.initial_accuracy, none.adversarial_accuracy);
  EXPECT_EQ(none.perturbation, 0.0);
  const auto all = ComputeMetrics({Outcome(0, 0, 1, 2, 5), Outcome(1, 1, 0, 1, 5)});
  EXPECT_EQ(all.adversarial_accuracy, 0.0);
  EXPECT_THROW(ComputeMetrics({}), EmptyResults);
}

class SyntheticAttackTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticCorpusConfig cc;
    cc.num_examples = 80;
    cc.seed = 11;
    corpus_ = GenerateSyntheticCorpus(cc);
    TrainOptions options;
    options.seed = 11;
    victim_ = TrainLinearVictim(corpus_.dataset, corpus_.table, options).victim;
  }

  MethodReport Run(AttackMethod method, int budget) const {
    AttackConfig c;
    c.method = method;
    c.budget = budget;
    c.samples = 20;
    c.seed = 3;
    MethodReport report;
    report.method = method;
    report.budget = budget;
    report.results = RunAttack(victim_, corpus_.table, corpus_.dataset, c);
    report.metrics = ComputeMetrics(report.results);
    return report;
  }

  SyntheticCorpus corpus_;
  LinearVictim victim_;
};

TEST_F(SyntheticAttackTest, CorpusShape) {
  EXPECT_EQ(corpus_.table.size(), 50);
  EXPECT_EQ(corpus_.dataset.size(), 80);
  EXPECT_FALSE(corpus_.lexicon.synonyms.empty());
  corpus_.dataset.Validate(corpus_.table.size());
  corpus_.lexicon.Validate(corpus_.table.size());
}

TEST_F(SyntheticAttackTest, BudgetRespected) {
  for (AttackMethod method : kAllMethods) {
    for (int budget : {1, 2}) {
      for (const auto& r : Run(method, budget).results) {
        EXPECT_LE(r.tokens_changed, budget) << MethodName(method);
        EXPECT_EQ(r.tokens_changed, ChangedPositions(r.adversarial_index));
      }
    }
  }
}

TEST_F(SyntheticAttackTest, ReportJsonRoundTrip) {
  const std::vector<MethodReport> reports = {
      Run(AttackMethod::kDisco, 2), Run(AttackMethod::kGreedySequential, 2)};
  std::stringstream io;
  WriteReportJson(io, reports);
  const auto back = ReadReportJson(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].method, AttackMethod::kGreedySequential);
  EXPECT_EQ(back[0].results.size(), reports[0].results.size());
  EXPECT_EQ(back[0].results[3].adversarial_tokens,
            reports[0].results[3].adversarial_tokens);
  EXPECT_DOUBLE_EQ(back[0].metrics.adversarial_accuracy,
                   reports[0].metrics.adversarial_accuracy);
  std::stringstream again;
  WriteReportJson(again, back);
  std::stringstream first;
  WriteReportJson(first, reports);
  EXPECT_EQ(again.str(), first.str());
}

TEST_F(SyntheticAttackTest, RepeatedRunsAreByteIdentical) {
  std::stringstream a, b;
  WriteReportJson(a, {Run(AttackMethod::kDisco, 3),
                      Run(AttackMethod::kGreedyMarginal, 3)});
  WriteReportJson(b, {Run(AttackMethod::kDisco, 3),
                      Run(AttackMethod::kGreedyMarginal, 3)});
  EXPECT_EQ(a.str(), b.str());
}

TEST_F(SyntheticAttackTest, TableHasBothBlocks) {
  std::ostringstream out;
  WriteReportTable(out, {Run(AttackMethod::kDisco, 2),
                         Run(AttackMethod::kGreedySequential, 2)});
  const std::string table = out.str();
  EXPECT_NE(table.find("Continuous Relaxation Approach"), std::string::npos);
  EXPECT_NE(table.find("Greedy Approach"), std::string::npos);
  EXPECT_NE(table.find("Adversarial Acc.(%)"), std::string::npos);
  EXPECT_NE(table.find("synthetic [disco, m=2]"), std::string::npos);
  EXPECT_LT(table.find("Continuous Relaxation Approach"),
            table.find("Greedy Approach"));
}

TEST(MethodReportTest, RowLabels) {
  MethodReport r;
  r.method = AttackMethod::kGreedySequential;
  r.budget = 3;
  EXPECT_EQ(r.RowLabel(), "synthetic [greedy-sequential, m=3]");
  r.budgeted = false;
  EXPECT_EQ(r.RowLabel(), "synthetic [greedy-sequential, unbudgeted]");
}

}  // namespace
}  // namespace disco
