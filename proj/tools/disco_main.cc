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

// Command-line entry point: corpus generation, counter-fitting, candidate
// lookup, victim training, attacks and the verification suites.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "disco/counterfit.h"
#include "disco/dataset.h"
#include "disco/embedding.h"
#include "disco/errors.h"
#include "disco/harness.h"
#include "disco/models.h"
#include "disco/verify.h"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFailed = 2;

std::string Terms(const disco::CounterfitTerms& t) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "total %.6g (antonym %.6g, synonym %.6g, "
                "topology %.6g)", t.total, t.antonym, t.synonym, t.topology);
  return buf;
}

struct GenArgs {
  std::string out_dir;
  disco::SyntheticCorpusConfig corpus;
  int train = 200;
  int test = 100;
};

int RunGenData(const GenArgs& args) {
  disco::SyntheticCorpusConfig config = args.corpus;
  config.num_examples = args.train + args.test;
  const disco::SyntheticCorpus corpus = disco::GenerateSyntheticCorpus(config);
  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path dir(args.out_dir);
  corpus.table.SaveFile((dir / "embeddings.txt").string());
  {
    std::ofstream out(dir / "lexicon.txt");
    disco::SaveLexicon(out, corpus.lexicon, corpus.table);
  }
  disco::Dataset train, test;
  train.label_names = test.label_names = corpus.dataset.label_names;
  for (int i = 0; i < corpus.dataset.size(); ++i) {
    (i < args.train ? train : test).examples.push_back(
        corpus.dataset.examples[i]);
  }
  for (const auto& [name, part] :
       {std::pair{"train.tsv", &train}, std::pair{"test.tsv", &test}}) {
    std::ofstream out(dir / name);
    if (!out) throw disco::IoFailure("cannot write " + (dir / name).string());
    disco::SaveDatasetTsv(out, *part, corpus.table);
  }
  std::cout << "wrote " << corpus.table.size() << " tokens, "
            << train.size() << " train and " << test.size()
            << " test examples, " << corpus.lexicon.synonyms.size()
            << " synonym pairs to " << args.out_dir << "\n";
  return kOk;
}

struct CounterfitArgs {
  std::string embeddings, lexicon, out;
  disco::CounterFitConfig config;
  std::uint64_t seed = 0;
};

int RunCounterfit(const CounterfitArgs& args) {
  const auto table = disco::EmbeddingTable::LoadFile(args.embeddings);
  const auto lexicon = disco::LoadLexiconFile(args.lexicon, table);
  const auto result = disco::CounterfitOptimize(table.vectors(), lexicon,
                                                args.config, args.seed);
  std::cout << "before: " << Terms(result.trace.front()) << "\n"
            << "after:  " << Terms(result.trace.back()) << "\n"
            << "iterations " << result.trace.size() - 1
            << (result.converged ? " (converged)" : "") << "\n";
  table.WithVectors(result.vectors).SaveFile(args.out);
  return kOk;
}

struct CandidateArgs {
  std::string embeddings;
  std::vector<std::string> tokens;
  int neighbors = 5;
  double eta_ball = 0.25;
};

int RunCandidates(const CandidateArgs& args) {
  const auto table = disco::EmbeddingTable::LoadFile(args.embeddings);
  for (const auto& token : args.tokens) {
    const auto slots = disco::KnnCandidates(table, table.Id(token),
                                            args.neighbors, args.eta_ball);
    std::cout << token << ":";
    for (std::size_t j = 1; j < slots.size(); ++j) {
      std::cout << ' ' << table.token(slots[j].token);
    }
    std::cout << "\n";
  }
  return kOk;
}

struct TrainArgs {
  std::string embeddings, data, out;
  disco::TrainOptions options;
};

int RunTrain(const TrainArgs& args) {
  const auto table = disco::EmbeddingTable::LoadFile(args.embeddings);
  const auto data = disco::LoadDatasetFile(args.data, table);
  const auto result = disco::TrainLinearVictim(data, table, args.options);
  result.victim.SaveFile(args.out);
  std::printf("train accuracy %.2f%%, mean loss %.4g\n",
              100.0 * result.train_accuracy, result.final_loss);
  return kOk;
}

struct AttackArgs {
  std::string embeddings, data, victim, space, out, trace_dir;
  std::string dataset_name = "synthetic";
  std::vector<std::string> methods = {"disco"};
  bool unbudgeted = false;
  std::string mode = "practical";
  std::optional<double> lambda;
  disco::AttackConfig config;
};

int RunAttackCommand(AttackArgs args) {
  const auto table = disco::EmbeddingTable::LoadFile(args.embeddings);
  std::optional<disco::EmbeddingTable> space;
  if (!args.space.empty()) space = disco::EmbeddingTable::LoadFile(args.space);
  const auto victim = disco::LinearVictim::LoadFile(args.victim);
  const auto data =
      disco::LoadDatasetFile(args.data, table, &victim.label_names());
  args.config.relax.mode = disco::ParseMode(args.mode);
  args.config.relax.seed = args.config.seed;
  args.config.lambda = args.lambda;
  args.config.trace_dir = args.trace_dir;

  std::vector<disco::MethodReport> reports;
  auto run = [&](disco::AttackMethod method, bool budgeted) {
    disco::AttackConfig config = args.config;
    config.method = method;
    config.budgeted = budgeted;
    const auto start = std::chrono::steady_clock::now();
    disco::MethodReport report;
    report.dataset = args.dataset_name;
    report.method = method;
    report.budgeted = budgeted;
    report.budget = config.budget;
    report.results = disco::RunAttack(victim, table, data, config,
                                      space ? &*space : nullptr);
    report.metrics = disco::ComputeMetrics(report.results);
    report.metrics.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    reports.push_back(std::move(report));
  };
  for (const auto& name : args.methods) {
    const disco::AttackMethod method = disco::ParseMethod(name);
    run(method, true);
    if (args.unbudgeted && method != disco::AttackMethod::kDisco) {
      run(method, false);
    }
  }
  disco::WriteReportTable(std::cout, reports);
  if (!args.out.empty()) disco::WriteReport(reports, args.out);
  return kOk;
}

struct VerifyArgs {
  std::vector<std::string> suites;
  std::uint64_t seed = 20261016;
  bool list = false;
};

int RunVerify(const VerifyArgs& args) {
  if (args.list) {
    for (const auto& name : disco::SuiteNames()) std::cout << name << "\n";
    return kOk;
  }
  bool ok = true;
  for (const auto& r : disco::RunSuites(args.suites, args.seed)) {
    std::cout << disco::FormatSuite(r) << std::endl;
    ok &= r.passed;
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial word-substitution toolkit: counter-fitting, "
               "candidate retrieval, greedy and relaxed attacks."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "TOML/INI file with option values; flags take precedence");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a planted corpus");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")
      ->required();
  gen_cmd->add_option("--vocab", gen.corpus.vocab_size, "Vocabulary size");
  gen_cmd->add_option("--classes", gen.corpus.num_classes, "Classes");
  gen_cmd->add_option("--dim", gen.corpus.dimension, "Embedding dimension");
  gen_cmd->add_option("--train", gen.train, "Training examples");
  gen_cmd->add_option("--test", gen.test, "Test examples");
  gen_cmd->add_option("--min-length", gen.corpus.min_length);
  gen_cmd->add_option("--max-length", gen.corpus.max_length);
  gen_cmd->add_option("--polar", gen.corpus.polar_per_document,
                      "Class-indicative tokens per document");
  gen_cmd->add_option("--seed", gen.corpus.seed);

  CounterfitArgs cf;
  auto* cf_cmd = app.add_subcommand("counterfit", "Retrofit an embedding file");
  cf_cmd->add_option("--embeddings", cf.embeddings)->required();
  cf_cmd->add_option("--lexicon", cf.lexicon)->required();
  cf_cmd->add_option("--out", cf.out)->required();
  cf_cmd->add_option("--delta", cf.config.delta, "Antonym margin");
  cf_cmd->add_option("--gamma", cf.config.gamma, "Synonym margin");
  cf_cmd->add_option("--k1", cf.config.k1);
  cf_cmd->add_option("--k2", cf.config.k2);
  cf_cmd->add_option("--k3", cf.config.k3);
  cf_cmd->add_option("--neighbors", cf.config.neighbors,
                     "Topology neighbourhood size");
  cf_cmd->add_option("--step", cf.config.step);
  cf_cmd->add_option("--iters", cf.config.iterations);
  cf_cmd->add_option("--seed", cf.seed);

  CandidateArgs cand;
  auto* cand_cmd =
      app.add_subcommand("candidates", "List replacement candidates");
  cand_cmd->add_option("--embeddings", cand.embeddings)->required();
  cand_cmd->add_option("--token", cand.tokens)->required();
  cand_cmd->add_option("--neighbors", cand.neighbors);
  cand_cmd->add_option("--eta-ball", cand.eta_ball)
      ->check(CLI::Range(0.0, 1.0));

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train-victim", "Train the softmax victim");
  train_cmd->add_option("--embeddings", train.embeddings)->required();
  train_cmd->add_option("--data", train.data)->required();
  train_cmd->add_option("--out", train.out)->required();
  train_cmd->add_option("--epochs", train.options.epochs);
  train_cmd->add_option("--rate", train.options.rate);
  train_cmd->add_option("--batch-size", train.options.batch_size);
  train_cmd->add_option("--seed", train.options.seed);

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "Attack sampled examples");
  attack_cmd->add_option("--embeddings", attack.embeddings)->required();
  attack_cmd->add_option("--data", attack.data)->required();
  attack_cmd->add_option("--victim", attack.victim)->required();
  attack_cmd->add_option("--space", attack.space,
                         "Embeddings used for neighbour retrieval");
  attack_cmd
      ->add_option("--method", attack.methods,
                   "greedy-marginal, greedy-sequential, disco (comma list)")
      ->delimiter(',');
  attack_cmd->add_flag("--unbudgeted", attack.unbudgeted,
                       "Also report greedy rows without the budget");
  attack_cmd->add_option("--budget", attack.config.budget);
  attack_cmd->add_option("--neighbors", attack.config.neighbors);
  attack_cmd->add_option("--eta-ball", attack.config.eta_ball)
      ->check(CLI::Range(0.0, 1.0));
  attack_cmd->add_option("--p", attack.config.relax.p);
  attack_cmd->add_option("--lambda", attack.lambda,
                         "L1 weight; derived from the clean loss if unset");
  attack_cmd->add_option("--eta", attack.config.relax.eta, "Step size");
  attack_cmd->add_option("--iters", attack.config.relax.max_iters);
  attack_cmd->add_option("--mode", attack.mode)
      ->check(CLI::IsMember({"theorem", "practical"}));
  attack_cmd->add_option("--samples", attack.config.samples);
  attack_cmd->add_option("--seed", attack.config.seed);
  attack_cmd->add_option("--out", attack.out,
                         "Report directory (report.json, table.txt)");
  attack_cmd->add_option("--trace-dir", attack.trace_dir,
                         "Write per-example optimizer traces here");
  attack_cmd->add_option("--dataset-name", attack.dataset_name);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the property suites");
  verify_cmd->add_option("--suite", verify.suites, "Suite names (default all)");
  verify_cmd->add_option("--seed", verify.seed);
  verify_cmd->add_flag("--list", verify.list, "List suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return RunGenData(gen);
    if (*cf_cmd) return RunCounterfit(cf);
    if (*cand_cmd) return RunCandidates(cand);
    if (*train_cmd) return RunTrain(train);
    if (*attack_cmd) return RunAttackCommand(attack);
    if (*verify_cmd) return RunVerify(verify);
  } catch (const disco::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
