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

#ifndef DISCO_ERRORS_H_
#define DISCO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace disco {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DISCO_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

DISCO_DEFINE_ERROR(InvalidArgument);
DISCO_DEFINE_ERROR(ElementAlreadyPresent);
DISCO_DEFINE_ERROR(InfeasibleStart);
DISCO_DEFINE_ERROR(GroundSetTooLarge);
DISCO_DEFINE_ERROR(DegenerateGroup);
DISCO_DEFINE_ERROR(DimensionMismatch);
DISCO_DEFINE_ERROR(ShapeError);
DISCO_DEFINE_ERROR(NonFiniteObjective);
DISCO_DEFINE_ERROR(UnembeddedToken);
DISCO_DEFINE_ERROR(UnknownToken);
DISCO_DEFINE_ERROR(EmptyResults);
DISCO_DEFINE_ERROR(IoFailure);

#undef DISCO_DEFINE_ERROR

}  // namespace disco

#endif  // DISCO_ERRORS_H_
