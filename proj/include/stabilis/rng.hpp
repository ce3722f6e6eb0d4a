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

#include <cstdint>

namespace stabilis {

/// Counter-based generator: value(i) = SplitMix64 finalizer applied to
/// key + (i + 1) * 0x9E3779B97F4A7C15, with key = finalizer(seed). Any draw
/// can be computed independently, so results do not depend on evaluation
/// order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const noexcept;

  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
};

}  // namespace stabilis
