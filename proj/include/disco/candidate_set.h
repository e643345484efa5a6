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

#ifndef DISCO_CANDIDATE_SET_H_
#define DISCO_CANDIDATE_SET_H_

#include <vector>

#include "disco/types.h"

namespace disco {

struct Candidate {
  int token = -1;
  Vector embedding;
};

// Replacement candidates per position. Slot 0 of every position holds the
// original token.
struct CandidateSet {
  std::vector<std::vector<Candidate>> positions;

  int num_positions() const { return static_cast<int>(positions.size()); }

  // Number of slots (original included) per position.
  std::vector<int> GroupSizes() const;

  // Embeddings selected by `index`; index[i] picks a slot of position i.
  Embeddings Select(const TransformationIndex& index) const;

  Embeddings Original() const;

  // Tokens selected by `index`.
  std::vector<int> SelectTokens(const TransformationIndex& index) const;

  // Throws ShapeError when a position is empty or dimensions disagree.
  void Validate() const;
};

}  // namespace disco

#endif  // DISCO_CANDIDATE_SET_H_
