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

#include "disco/candidate_set.h"

#include <string>

#include "disco/errors.h"

namespace disco {

std::vector<int> CandidateSet::GroupSizes() const {
  std::vector<int> sizes;
  sizes.reserve(positions.size());
  for (const auto& slots : positions) {
    sizes.push_back(static_cast<int>(slots.size()));
  }
  return sizes;
}

Embeddings CandidateSet::Select(const TransformationIndex& index) const {
  if (index.size() != positions.size()) {
    throw ShapeError("transformation index length does not match positions");
  }
  Embeddings out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.push_back(positions[i].at(index[i]).embedding);
  }
  return out;
}

Embeddings CandidateSet::Original() const {
  return Select(TransformationIndex(positions.size(), 0));
}

std::vector<int> CandidateSet::SelectTokens(
    const TransformationIndex& index) const {
  if (index.size() != positions.size()) {
    throw ShapeError("transformation index length does not match positions");
  }
  std::vector<int> out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.push_back(positions[i].at(index[i]).token);
  }
  return out;
}

void CandidateSet::Validate() const {
  if (positions.empty()) throw ShapeError("candidate set has no positions");
  std::size_t dim = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i].empty()) {
      throw ShapeError("position " + std::to_string(i) + " has no slots");
    }
    for (const auto& c : positions[i]) {
      if (dim == 0) dim = c.embedding.size();
      if (c.embedding.size() != dim || dim == 0) {
        throw ShapeError("candidate embedding dimension mismatch at position " +
                         std::to_string(i));
      }
    }
  }
}

}  // namespace disco
