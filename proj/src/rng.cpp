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

#include "stabilis/rng.hpp"

namespace stabilis {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
}

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) noexcept : key_(mix(seed + kGamma)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  return mix(key_ + (counter + 1) * kGamma);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace stabilis
