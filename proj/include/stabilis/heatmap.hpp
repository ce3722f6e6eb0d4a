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

#include <filesystem>
#include <vector>

#include "stabilis/geometry.hpp"
#include "stabilis/stability.hpp"

namespace stabilis {

/// Regular in-plane grid of relative pressure. Cell (ix, iy) covers
/// [origin + (ix, iy) * cell, origin + (ix + 1, iy + 1) * cell) in the
/// ground frame's tangent coordinates; values are row-major in iy.
struct PressureGrid {
  Vec2 origin = Vec2::Zero();
  double cell = 0.01;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  double at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * nx + ix];
  }
};

/// Sums per-sample pressure into cells of the gravity-projected samples.
/// The origin snaps to a multiple of `cell`, so grids built in the same frame
/// with the same cell size are always index-aligned.
PressureGrid pressure_heatmap(const GroundFrame& frame, const Points3& samples,
                              const PressureField& field, double cell = 0.01);

/// `x,y,pressure` rows at cell centres, iy-major.
void write_heatmap_csv(const std::filesystem::path& path, const PressureGrid& grid);
/// 8-bit binary PGM scaled to the grid maximum; top row is the largest iy.
void write_heatmap_pgm(const std::filesystem::path& path, const PressureGrid& grid);

}  // namespace stabilis
