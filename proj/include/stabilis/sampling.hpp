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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "stabilis/geometry.hpp"

namespace stabilis {

/// Sparse barycentric regressor from mesh vertices to surface samples.
/// Row i has exactly three entries: the vertices of its source face and the
/// barycentric weights of the sample. Rows are convex combinations.
class SurfaceRegressor {
 public:
  SurfaceRegressor() = default;
  SurfaceRegressor(std::size_t num_vertices,
                   std::vector<std::array<int, 3>> columns,
                   std::vector<std::array<double, 3>> weights,
                   std::vector<int> source_faces, std::vector<int> part_labels);

  std::size_t num_samples() const noexcept { return columns_.size(); }
  std::size_t num_vertices() const noexcept { return num_vertices_; }
  const std::vector<std::array<int, 3>>& columns() const noexcept {
    return columns_;
  }
  const std::vector<std::array<double, 3>>& weights() const noexcept {
    return weights_;
  }
  const std::vector<int>& source_faces() const noexcept { return source_faces_; }
  /// Part label of each sample's source face, -1 when the mesh is unlabelled.
  const std::vector<int>& part_labels() const noexcept { return part_labels_; }

  /// V_U = W V. Throws kDimensionMismatch.
  Points3 apply(const Points3& vertices) const;
  /// W^T G: pulls per-sample gradients back to per-vertex gradients.
  Points3 transpose_apply(const Points3& sample_grads) const;

  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix() const;

 private:
  std::size_t num_vertices_ = 0;
  std::vector<std::array<int, 3>> columns_;
  std::vector<std::array<double, 3>> weights_;
  std::vector<int> source_faces_;
  std::vector<int> part_labels_;
};

struct SamplingOptions {
  /// Mirror planes through the origin (0 = x, 1 = y, 2 = z). When set, every
  /// draw is replicated under the generated mirror group, so the mesh must be
  /// symmetric (vertex positions and faces) under each listed mirror.
  std::vector<int> mirror_axes;
};

/// Area-weighted face choice plus triangle point picking. Sample k consumes
/// RNG counters 3k, 3k+1, 3k+2 (face, r1, r2). With a mirror group of order
/// m, n must be divisible by m and n / m draws are made.
SurfaceRegressor sample_surface(const Mesh& mesh, std::size_t n,
                                std::uint64_t seed,
                                const SamplingOptions& options = {});

Points3 apply_regressor(const SurfaceRegressor& reg, const Points3& vertices);

/// FNV-1a over mesh positions/faces, n, seed and mirror axes.
std::uint64_t regressor_cache_key(const Mesh& mesh, std::size_t n,
                                  std::uint64_t seed,
                                  const SamplingOptions& options = {});

/// File layout: 8-byte magic "STBLSW01", little-endian (u32 row, u32 col,
/// f64 weight) triplets in row order, then the u64 cache key.
void write_regressor(const std::filesystem::path& path,
                     const SurfaceRegressor& reg, std::uint64_t key);
/// Returns nullopt when the stored key differs from `expected_key`.
/// Source faces and labels are recovered from `mesh`.
std::optional<SurfaceRegressor> read_regressor(
    const std::filesystem::path& path, const Mesh& mesh,
    std::uint64_t expected_key);

/// Reads the cache when it is valid, otherwise samples and rewrites it.
SurfaceRegressor load_or_sample(const Mesh& mesh, std::size_t n,
                                std::uint64_t seed,
                                const SamplingOptions& options,
                                const std::filesystem::path& cache_path);

}  // namespace stabilis
