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

#ifndef DISCO_DATASET_H_
#define DISCO_DATASET_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "disco/embedding.h"

namespace disco {

struct Example {
  int label = 0;
  std::vector<int> tokens;
};

struct Dataset {
  std::vector<Example> examples;
  std::vector<std::string> label_names;

  int num_classes() const { return static_cast<int>(label_names.size()); }
  int size() const { return static_cast<int>(examples.size()); }

  // Nonempty, labels in range, sequences nonempty, token ids below
  // vocab_size. Throws InvalidArgument.
  void Validate(int vocab_size) const;
};

// `label<TAB>space separated tokens` per line. Labels are mapped through
// `label_names` when given, otherwise ids follow the sorted distinct labels.
// Unknown tokens throw UnembeddedToken.
Dataset LoadDatasetTsv(std::istream& in, const EmbeddingTable& vocabulary,
                       const std::vector<std::string>* label_names = nullptr);
Dataset LoadDatasetFile(const std::string& path,
                        const EmbeddingTable& vocabulary,
                        const std::vector<std::string>* label_names = nullptr);
void SaveDatasetTsv(std::ostream& out, const Dataset& dataset,
                    const EmbeddingTable& vocabulary);

// Draws `count` distinct example ids without replacement, spread across
// classes as evenly as class sizes allow. Result is sorted.
std::vector<int> SampleExamples(const Dataset& dataset, int count,
                                std::uint64_t seed);

}  // namespace disco

#endif  // DISCO_DATASET_H_
