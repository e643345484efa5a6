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

#ifndef DISCO_ORACLE_H_
#define DISCO_ORACLE_H_

#include "disco/types.h"

namespace disco {

// A scalar score of a sequence of input embeddings, differentiable in the
// inputs. Attacks maximize the score. Evaluation must be reentrant.
class DifferentiableOracle {
 public:
  virtual ~DifferentiableOracle() = default;

  // Embedding dimension expected at every position.
  virtual int dimension() const = 0;

  virtual double Score(const Embeddings& inputs) const = 0;

  // Returns the score and writes d(score)/d(inputs) into `gradient`, which is
  // resized to match `inputs`.
  virtual double ScoreAndGradient(const Embeddings& inputs,
                                  Embeddings* gradient) const = 0;
};

}  // namespace disco

#endif  // DISCO_ORACLE_H_
