// Copyright 2026 The Stabilis Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stabilis {

enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kIoError,
  kNonPositiveDepth,
  kNonOrthonormalRotation,
  kNonManifoldBoundary,
  kNotWatertight,
  kDegenerateMesh,
  kDimensionMismatch,
  kEmptyInput,
  kEmptyContacts,
  kGridMismatch,
  kDivergedNaN,
  kUnpairedFiles,
};

std::string_view to_string(ErrorCode code);

// Numerical failures map to CLI exit code 3; everything else is a
// validation failure (exit code 2).
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stabilis
