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

#include "stabilis/error.hpp"

namespace stabilis {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kNonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorCode::kNonManifoldBoundary: return "NonManifoldBoundary";
    case ErrorCode::kNotWatertight: return "NotWatertight";
    case ErrorCode::kDegenerateMesh: return "DegenerateMesh";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyContacts: return "EmptyContacts";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kDivergedNaN: return "DivergedNaN";
    case ErrorCode::kUnpairedFiles: return "UnpairedFiles";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  return code == ErrorCode::kDivergedNaN ||
         code == ErrorCode::kNonPositiveDepth;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace stabilis
