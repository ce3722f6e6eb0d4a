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

#include "stabilis/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "stabilis/error.hpp"
#include "stabilis/rng.hpp"

namespace stabilis {
namespace {

constexpr char kMagic[8] = {'S', 'T', 'B', 'L', 'S', 'W', '0', '1'};

std::array<int, 3> sorted(const Face& f) {
  std::array<int, 3> s = f;
  std::sort(s.begin(), s.end());
  return s;
}

std::map<std::array<int, 3>, int> face_index(const Mesh& mesh) {
  std::map<std::array<int, 3>, int> index;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    index.emplace(sorted(mesh.faces()[f]), static_cast<int>(f));
  }
  return index;
}

int label_of(const Mesh& mesh, int face) {
  return mesh.face_parts() ? (*mesh.face_parts())[face] : -1;
}

// Vertex permutation for each element of the mirror group.
std::vector<std::vector<int>> mirror_group(const Mesh& mesh,
                                           const std::vector<int>& axes) {
  for (int a : axes) {
    if (a < 0 || a > 2) {
      throw Error(ErrorCode::kInvalidArgument, "mirror axis must be 0, 1 or 2");
    }
  }
  std::map<std::array<double, 3>, int> by_position;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& p = mesh.vertices()[v];
    // +0.0 folds negative zero.
    by_position.emplace(std::array<double, 3>{p.x() + 0.0, p.y() + 0.0,
                                              p.z() + 0.0},
                        static_cast<int>(v));
  }
  const std::size_t order = std::size_t{1} << axes.size();
  std::vector<std::vector<int>> group;
  for (std::size_t g = 0; g < order; ++g) {
    std::vector<int> perm(mesh.num_vertices());
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      Vec3 p = mesh.vertices()[v];
      for (std::size_t k = 0; k < axes.size(); ++k) {
        if (g & (std::size_t{1} << k)) p[axes[k]] = -p[axes[k]];
      }
      auto it = by_position.find({p.x() + 0.0, p.y() + 0.0, p.z() + 0.0});
      if (it == by_position.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "mesh is not mirror-symmetric at vertex " +
                        std::to_string(v));
      }
      perm[v] = it->second;
    }
    group.push_back(std::move(perm));
  }
  return group;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

SurfaceRegressor::SurfaceRegressor(std::size_t num_vertices,
                                   std::vector<std::array<int, 3>> columns,
                                   std::vector<std::array<double, 3>> weights,
                                   std::vector<int> source_faces,
                                   std::vector<int> part_labels)
    : num_vertices_(num_vertices),
      columns_(std::move(columns)),
      weights_(std::move(weights)),
      source_faces_(std::move(source_faces)),
      part_labels_(std::move(part_labels)) {
  const std::size_t n = columns_.size();
  if (weights_.size() != n || source_faces_.size() != n ||
      part_labels_.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "regressor arrays have inconsistent lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (columns_[i][k] < 0 ||
          static_cast<std::size_t>(columns_[i][k]) >= num_vertices_) {
        throw Error(ErrorCode::kInvalidArgument,
                    "regressor column out of range in row " +
                        std::to_string(i));
      }
      if (!(weights_[i][k] >= 0.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "negative barycentric weight in row " + std::to_string(i));
      }
      sum += weights_[i][k];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw Error(ErrorCode::kInvalidArgument,
                  "barycentric weights do not sum to 1 in row " +
                      std::to_string(i));
    }
  }
}

Points3 SurfaceRegressor::apply(const Points3& vertices) const {
  if (vertices.size() != num_vertices_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "regressor expects " + std::to_string(num_vertices_) +
                    " vertices, got " + std::to_string(vertices.size()));
  }
  Points3 out(columns_.size());
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    const auto& w = weights_[i];
    out[i] = w[0] * vertices[c[0]] + w[1] * vertices[c[1]] + w[2] * vertices[c[2]];
  }
  return out;
}

Points3 SurfaceRegressor::transpose_apply(const Points3& sample_grads) const {
  if (sample_grads.size() != columns_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected one gradient per sample");
  }
  Points3 out(num_vertices_, Vec3::Zero());
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      out[columns_[i][k]] += weights_[i][k] * sample_grads[i];
    }
  }
  return out;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> SurfaceRegressor::matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(columns_.size() * 3);
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      triplets.emplace_back(static_cast<int>(i), columns_[i][k], weights_[i][k]);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> w(
      static_cast<Eigen::Index>(columns_.size()),
      static_cast<Eigen::Index>(num_vertices_));
  // Duplicate (row, col) pairs cannot occur: faces have distinct vertices.
  w.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

SurfaceRegressor sample_surface(const Mesh& mesh, std::size_t n,
                                std::uint64_t seed,
                                const SamplingOptions& options) {
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one sample");
  }
  std::vector<double> cdf(mesh.num_faces());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    total += mesh.face_area(f);
    cdf[f] = total;
  }
  if (!(total >= 1e-12)) {
    throw Error(ErrorCode::kDegenerateMesh, "total surface area below 1e-12");
  }

  std::vector<std::vector<int>> group;
  std::map<std::array<int, 3>, int> faces_by_vertices;
  if (!options.mirror_axes.empty()) {
    group = mirror_group(mesh, options.mirror_axes);
    faces_by_vertices = face_index(mesh);
  }
  const std::size_t order = group.empty() ? 1 : group.size();
  if (n % order != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample count must be a multiple of the mirror group order " +
                    std::to_string(order));
  }

  const CounterRng rng(seed);
  std::vector<std::array<int, 3>> columns;
  std::vector<std::array<double, 3>> weights;
  std::vector<int> source;
  std::vector<int> labels;
  columns.reserve(n);
  weights.reserve(n);
  source.reserve(n);
  labels.reserve(n);
  for (std::size_t d = 0; d < n / order; ++d) {
    const double r0 = rng.uniform(3 * d);
    const double r1 = rng.uniform(3 * d + 1);
    const double r2 = rng.uniform(3 * d + 2);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r0 * total);
    const int f = static_cast<int>(
        std::min<std::ptrdiff_t>(it - cdf.begin(),
                                 static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const double s1 = std::sqrt(r1);
    const std::array<double, 3> w = {1.0 - s1, s1 * (1.0 - r2), s1 * r2};
    const Face& face = mesh.faces()[f];
    if (group.empty()) {
      columns.push_back(face);
      weights.push_back(w);
      source.push_back(f);
      labels.push_back(label_of(mesh, f));
      continue;
    }
    for (const auto& perm : group) {
      const Face image = {perm[face[0]], perm[face[1]], perm[face[2]]};
      const auto hit = faces_by_vertices.find(sorted(image));
      if (hit == faces_by_vertices.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "mirror image of face " + std::to_string(f) +
                        " is not a face");
      }
      columns.push_back(image);
      weights.push_back(w);
      source.push_back(hit->second);
      labels.push_back(label_of(mesh, hit->second));
    }
  }
  return SurfaceRegressor(mesh.num_vertices(), std::move(columns),
                          std::move(weights), std::move(source),
                          std::move(labels));
}

Points3 apply_regressor(const SurfaceRegressor& reg, const Points3& vertices) {
  return reg.apply(vertices);
}

std::uint64_t regressor_cache_key(const Mesh& mesh, std::size_t n,
                                  std::uint64_t seed,
                                  const SamplingOptions& options) {
  std::uint64_t h = kFnvOffset;
  for (const auto& v : mesh.vertices()) fnv(h, v.data(), 3 * sizeof(double));
  for (const auto& f : mesh.faces()) fnv(h, f.data(), 3 * sizeof(int));
  const std::uint64_t n64 = n;
  fnv(h, &n64, sizeof(n64));
  fnv(h, &seed, sizeof(seed));
  for (int a : options.mirror_axes) fnv(h, &a, sizeof(a));
  return h;
}

void write_regressor(const std::filesystem::path& path,
                     const SurfaceRegressor& reg, std::uint64_t key) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  for (std::size_t i = 0; i < reg.num_samples(); ++i) {
    for (int k = 0; k < 3; ++k) {
      put_u32(out, static_cast<std::uint32_t>(i));
      put_u32(out, static_cast<std::uint32_t>(reg.columns()[i][k]));
      put_f64(out, reg.weights()[i][k]);
    }
  }
  out.write(reinterpret_cast<const char*>(&key), sizeof(key));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::optional<SurfaceRegressor> read_regressor(
    const std::filesystem::path& path, const Mesh& mesh,
    std::uint64_t expected_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  constexpr std::size_t kTriplet = 16;
  if (bytes.size() < sizeof(kMagic) + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0 ||
      (bytes.size() - sizeof(kMagic) - 8) % (3 * kTriplet) != 0) {
    throw Error(ErrorCode::kParseError, "malformed regressor file " +
                                            path.string());
  }
  std::uint64_t key = 0;
  std::memcpy(&key, bytes.data() + bytes.size() - 8, 8);
  if (key != expected_key) return std::nullopt;

  const std::size_t rows = (bytes.size() - sizeof(kMagic) - 8) / (3 * kTriplet);
  const auto index = face_index(mesh);
  std::vector<std::array<int, 3>> columns(rows);
  std::vector<std::array<double, 3>> weights(rows);
  std::vector<int> source(rows);
  std::vector<int> labels(rows);
  const char* p = bytes.data() + sizeof(kMagic);
  for (std::size_t i = 0; i < rows; ++i) {
    for (int k = 0; k < 3; ++k, p += kTriplet) {
      std::uint32_t row = 0, col = 0;
      std::memcpy(&row, p, 4);
      std::memcpy(&col, p + 4, 4);
      std::memcpy(&weights[i][k], p + 8, 8);
      if (row != i) {
        throw Error(ErrorCode::kParseError, "regressor rows out of order");
      }
      columns[i][k] = static_cast<int>(col);
    }
    const auto hit = index.find(sorted(columns[i]));
    if (hit == index.end()) {
      throw Error(ErrorCode::kParseError,
                  "regressor row " + std::to_string(i) +
                      " does not match a mesh face");
    }
    source[i] = hit->second;
    labels[i] = label_of(mesh, hit->second);
  }
  return SurfaceRegressor(mesh.num_vertices(), std::move(columns),
                          std::move(weights), std::move(source),
                          std::move(labels));
}

SurfaceRegressor load_or_sample(const Mesh& mesh, std::size_t n,
                                std::uint64_t seed,
                                const SamplingOptions& options,
                                const std::filesystem::path& cache_path) {
  const std::uint64_t key = regressor_cache_key(mesh, n, seed, options);
  if (std::filesystem::exists(cache_path)) {
    try {
      if (auto cached = read_regressor(cache_path, mesh, key)) return *cached;
    } catch (const Error&) {
      // Corrupt cache entries are regenerated below.
    }
  }
  SurfaceRegressor reg = sample_surface(mesh, n, seed, options);
  write_regressor(cache_path, reg, key);
  return reg;
}

}  // namespace stabilis
