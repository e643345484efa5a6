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

#ifndef DISCO_TYPES_H_
#define DISCO_TYPES_H_

#include <vector>

namespace disco {

using Vector = std::vector<double>;

// A sequence of n input vectors, each of the model's embedding dimension.
using Embeddings = std::vector<Vector>;

// Per-position candidate choice. Entry 0 keeps the original token.
using TransformationIndex = std::vector<int>;

// Number of positions whose choice differs from the original (slot 0).
inline int ChangedPositions(const TransformationIndex& index) {
  int changed = 0;
  for (int j : index) changed += (j != 0);
  return changed;
}

}  // namespace disco

#endif  // DISCO_TYPES_H_
