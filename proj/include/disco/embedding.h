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

#ifndef DISCO_EMBEDDING_H_
#define DISCO_EMBEDDING_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "disco/types.h"

namespace disco {

// Token ids are assigned in insertion order. All vectors share one dimension.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dimension) : dimension_(dimension) {}

  // Throws InvalidArgument on duplicates, dimension mismatch or non-finite
  // entries.
  int Add(const std::string& token, Vector vector);

  int size() const { return static_cast<int>(tokens_.size()); }
  int dimension() const { return dimension_; }
  const std::string& token(int id) const { return tokens_.at(id); }
  const Vector& vector(int id) const { return vectors_.at(id); }
  const std::vector<Vector>& vectors() const { return vectors_; }

  std::optional<int> Find(const std::string& token) const;
  // Throws UnknownToken.
  int Id(const std::string& token) const;

  // Same vocabulary with replacement vectors.
  EmbeddingTable WithVectors(std::vector<Vector> vectors) const;

  // One token per line: `token v1 ... vd`, whitespace separated.
  static EmbeddingTable Load(std::istream& in);
  static EmbeddingTable LoadFile(const std::string& path);
  void Save(std::ostream& out) const;
  void SaveFile(const std::string& path) const;

 private:
  int dimension_ = 0;
  std::vector<std::string> tokens_;
  std::vector<Vector> vectors_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace disco

#endif  // DISCO_EMBEDDING_H_
