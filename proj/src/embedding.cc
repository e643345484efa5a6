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

#include "disco/embedding.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "disco/errors.h"

namespace disco {

int EmbeddingTable::Add(const std::string& token, Vector vector) {
  if (token.empty()) throw InvalidArgument("empty token");
  if (ids_.count(token) != 0) {
    throw InvalidArgument("duplicate token '" + token + "'");
  }
  if (dimension_ == 0) dimension_ = static_cast<int>(vector.size());
  if (static_cast<int>(vector.size()) != dimension_ || dimension_ == 0) {
    throw InvalidArgument("embedding for '" + token + "' has dimension " +
                          std::to_string(vector.size()) + ", expected " +
                          std::to_string(dimension_));
  }
  for (double x : vector) {
    if (!std::isfinite(x)) {
      throw InvalidArgument("non-finite embedding entry for '" + token + "'");
    }
  }
  const int id = size();
  tokens_.push_back(token);
  vectors_.push_back(std::move(vector));
  ids_.emplace(token, id);
  return id;
}

std::optional<int> EmbeddingTable::Find(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int EmbeddingTable::Id(const std::string& token) const {
  auto id = Find(token);
  if (!id) throw UnknownToken("unknown token '" + token + "'");
  return *id;
}

EmbeddingTable EmbeddingTable::WithVectors(std::vector<Vector> vectors) const {
  if (vectors.size() != vectors_.size()) {
    throw InvalidArgument("replacement vectors do not match the vocabulary");
  }
  EmbeddingTable out(dimension_);
  for (int i = 0; i < size(); ++i) out.Add(tokens_[i], std::move(vectors[i]));
  return out;
}

EmbeddingTable EmbeddingTable::Load(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    Vector v;
    std::string value;
    while (fields >> value) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(value, &used));
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw IoFailure("bad number '" + value + "' on embedding line " +
                        std::to_string(line_no));
      }
    }
    try {
      table.Add(token, std::move(v));
    } catch (const InvalidArgument& e) {
      throw IoFailure("embedding line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return table;
}

EmbeddingTable EmbeddingTable::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  return Load(in);
}

void EmbeddingTable::Save(std::ostream& out) const {
  char buf[32];
  for (int i = 0; i < size(); ++i) {
    out << tokens_[i];
    for (double x : vectors_[i]) {
      std::snprintf(buf, sizeof(buf), " %.17g", x);
      out << buf;
    }
    out << '\n';
  }
}

void EmbeddingTable::SaveFile(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  Save(out);
  if (!out) throw IoFailure("write failed for " + path);
}

}  // namespace disco
