// Copyright 2026 The avsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AVSEP_ERRORS_H_
#define AVSEP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace avsep {

// All library errors carry a stable kind() name so the CLI can emit
// machine-readable error lines and map kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define AVSEP_DEFINE_ERROR(NAME)                                         \
  class NAME : public Error {                                            \
   public:                                                               \
    explicit NAME(const std::string& m) : Error(#NAME, m) {}             \
  }

AVSEP_DEFINE_ERROR(ConfigError);
AVSEP_DEFINE_ERROR(StateError);
AVSEP_DEFINE_ERROR(IoError);
AVSEP_DEFINE_ERROR(ShapeError);
AVSEP_DEFINE_ERROR(ZeroEnergyError);
AVSEP_DEFINE_ERROR(DurationOutOfRange);
AVSEP_DEFINE_ERROR(AlreadyCropped);
AVSEP_DEFINE_ERROR(VariantConstraintError);
AVSEP_DEFINE_ERROR(CheckpointError);
AVSEP_DEFINE_ERROR(LabelError);
AVSEP_DEFINE_ERROR(InputTooShort);
AVSEP_DEFINE_ERROR(DegenerateVariance);
AVSEP_DEFINE_ERROR(SingleClusterError);
AVSEP_DEFINE_ERROR(PesqUnavailable);

#undef AVSEP_DEFINE_ERROR

}  // namespace avsep

#endif  // AVSEP_ERRORS_H_
