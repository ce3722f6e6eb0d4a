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

#include "stabilis/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "stabilis/error.hpp"

namespace stabilis {

PressureGrid pressure_heatmap(const GroundFrame& frame, const Points3& samples,
                              const PressureField& field, double cell) {
  if (!(cell > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cell must be > 0");
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no samples");
  if (field.rho.size() != samples.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one pressure per sample");
  }
  Points2 q(samples.size());
  long long x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    q[i] = frame.to_plane(samples[i]);
    const auto cx = static_cast<long long>(std::floor(q[i].x() / cell));
    const auto cy = static_cast<long long>(std::floor(q[i].y() / cell));
    if (i == 0) {
      x0 = x1 = cx;
      y0 = y1 = cy;
    }
    x0 = std::min(x0, cx);
    x1 = std::max(x1, cx);
    y0 = std::min(y0, cy);
    y1 = std::max(y1, cy);
  }
  PressureGrid grid;
  grid.cell = cell;
  grid.origin = Vec2(static_cast<double>(x0) * cell, static_cast<double>(y0) * cell);
  grid.nx = static_cast<int>(x1 - x0 + 1);
  grid.ny = static_cast<int>(y1 - y0 + 1);
  grid.values.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto ix = static_cast<int>(static_cast<long long>(std::floor(q[i].x() / cell)) - x0);
    const auto iy = static_cast<int>(static_cast<long long>(std::floor(q[i].y() / cell)) - y0);
    grid.at(ix, iy) += field.rho[i];
  }
  return grid;
}

void write_heatmap_csv(const std::filesystem::path& path, const PressureGrid& grid) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "x,y,pressure\n";
  char buf[96];
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.origin.x() + (ix + 0.5) * grid.cell;
      const double y = grid.origin.y() + (iy + 0.5) * grid.cell;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, y, grid.at(ix, iy));
      out << buf;
    }
  }
}

void write_heatmap_pgm(const std::filesystem::path& path, const PressureGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "P5\n" << grid.nx << ' ' << grid.ny << "\n255\n";
  const double peak =
      grid.values.empty() ? 0.0 : *std::max_element(grid.values.begin(), grid.values.end());
  for (int iy = grid.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double v = peak > 0.0 ? grid.at(ix, iy) / peak : 0.0;
      const auto byte = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      out.put(static_cast<char>(byte));
    }
  }
}

}  // namespace stabilis
