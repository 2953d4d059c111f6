// Copyright 2026 The ContestLab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONTESTLAB_ERRORS_H_
#define CONTESTLAB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace contestlab {

// Base class for every error raised by the library. `exit_code()` is the
// process status the command-line tool reports for the error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int exit_code = 1)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

#define CONTESTLAB_DEFINE_ERROR(Name, code)                               \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(#Name ": " + what, code) {} \
  }

// Feedback policy validation.
CONTESTLAB_DEFINE_ERROR(GapError, 3);
CONTESTLAB_DEFINE_ERROR(OverlapError, 3);
CONTESTLAB_DEFINE_ERROR(OpenInfimumError, 3);
CONTESTLAB_DEFINE_ERROR(InvalidCellError, 3);
CONTESTLAB_DEFINE_ERROR(SignalPolicyMismatch, 3);

CONTESTLAB_DEFINE_ERROR(OutOfBudget, 4);
CONTESTLAB_DEFINE_ERROR(EmptySupport, 4);

// Verifier grid.
CONTESTLAB_DEFINE_ERROR(SupportOverflow, 5);
CONTESTLAB_DEFINE_ERROR(OffGrid, 5);

CONTESTLAB_DEFINE_ERROR(UnbalancedConfig, 6);

// Statistics.
CONTESTLAB_DEFINE_ERROR(DegenerateSample, 7);
CONTESTLAB_DEFINE_ERROR(RankDeficient, 7);
CONTESTLAB_DEFINE_ERROR(InsufficientData, 7);

// Data files and command lines.
CONTESTLAB_DEFINE_ERROR(SchemaError, 8);
CONTESTLAB_DEFINE_ERROR(ParseError, 2);

#undef CONTESTLAB_DEFINE_ERROR

}  // namespace contestlab

#endif  // CONTESTLAB_ERRORS_H_
