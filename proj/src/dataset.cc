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

#include "disco/dataset.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "disco/errors.h"

namespace disco {

void Dataset::Validate(int vocab_size) const {
  if (examples.empty()) throw InvalidArgument("dataset is empty");
  if (label_names.empty()) throw InvalidArgument("dataset has no labels");
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    if (ex.label < 0 || ex.label >= num_classes()) {
      throw InvalidArgument("example " + std::to_string(i) +
                            " has an out-of-range label");
    }
    if (ex.tokens.empty()) {
      throw InvalidArgument("example " + std::to_string(i) + " is empty");
    }
    for (int t : ex.tokens) {
      if (t < 0 || t >= vocab_size) {
        throw InvalidArgument("example " + std::to_string(i) +
                              " references an unknown token id");
      }
    }
  }
}

namespace {

struct RawLine {
  std::string label;
  std::vector<std::string> tokens;
  int line_no;
};

}  // namespace

Dataset LoadDatasetTsv(std::istream& in, const EmbeddingTable& vocabulary,
                       const std::vector<std::string>* label_names) {
  std::vector<RawLine> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IoFailure("dataset line " + std::to_string(line_no) +
                      " has no tab separator");
    }
    RawLine r{line.substr(0, tab), {}, line_no};
    std::istringstream words(line.substr(tab + 1));
    std::string w;
    while (words >> w) r.tokens.push_back(w);
    raw.push_back(std::move(r));
  }

  Dataset dataset;
  if (label_names != nullptr) {
    dataset.label_names = *label_names;
  } else {
    std::set<std::string> distinct;
    for (const auto& r : raw) distinct.insert(r.label);
    dataset.label_names.assign(distinct.begin(), distinct.end());
  }
  std::map<std::string, int> label_id;
  for (int i = 0; i < dataset.num_classes(); ++i) {
    label_id[dataset.label_names[i]] = i;
  }
  for (const auto& r : raw) {
    auto it = label_id.find(r.label);
    if (it == label_id.end()) {
      throw IoFailure("unknown label '" + r.label + "' on dataset line " +
                      std::to_string(r.line_no));
    }
    Example ex{it->second, {}};
    for (const auto& w : r.tokens) {
      auto id = vocabulary.Find(w);
      if (!id) {
        throw UnembeddedToken("token '" + w + "' on dataset line " +
                              std::to_string(r.line_no) +
                              " has no embedding");
      }
      ex.tokens.push_back(*id);
    }
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

Dataset LoadDatasetFile(const std::string& path,
                        const EmbeddingTable& vocabulary,
                        const std::vector<std::string>* label_names) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  return LoadDatasetTsv(in, vocabulary, label_names);
}

void SaveDatasetTsv(std::ostream& out, const Dataset& dataset,
                    const EmbeddingTable& vocabulary) {
  for (const auto& ex : dataset.examples) {
    out << dataset.label_names.at(ex.label) << '\t';
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << vocabulary.token(ex.tokens[i]);
    }
    out << '\n';
  }
}

std::vector<int> SampleExamples(const Dataset& dataset, int count,
                                std::uint64_t seed) {
  if (count < 0 || count > dataset.size()) {
    throw InvalidArgument("sample size must be in [0, dataset size]");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> by_class(std::max(dataset.num_classes(), 1));
  for (int i = 0; i < dataset.size(); ++i) {
    by_class.at(dataset.examples[i].label).push_back(i);
  }
  for (auto& ids : by_class) std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<int> chosen;
  std::vector<std::size_t> next(by_class.size(), 0);
  while (static_cast<int>(chosen.size()) < count) {
    for (std::size_t c = 0;
         c < by_class.size() && static_cast<int>(chosen.size()) < count; ++c) {
      if (next[c] < by_class[c].size()) chosen.push_back(by_class[c][next[c]++]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace disco
