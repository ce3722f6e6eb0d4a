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

#include "stabilis/volumetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "stabilis/error.hpp"

namespace stabilis {
namespace {

constexpr double kMinPartVolume = 1e-12;

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::vector<int> referenced_vertices(const std::vector<Face>& faces,
                                     const std::vector<int>& subset,
                                     std::size_t n_vertices) {
  std::vector<char> used(n_vertices, 0);
  for (int f : subset) {
    for (int v : faces[f]) used[v] = 1;
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (used[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

Vec3 centroid_of(const Points3& vertices, const std::vector<int>& ids) {
  Vec3 c = Vec3::Zero();
  for (int v : ids) c += vertices[v];
  return c / static_cast<double>(ids.size());
}

double tetra_sum(const Mesh& mesh, const Vec3& center) {
  double total = 0.0;
  for (const auto& f : mesh.faces()) {
    const Vec3 a = mesh.vertices()[f[0]] - center;
    const Vec3 b = mesh.vertices()[f[1]] - center;
    const Vec3 c = mesh.vertices()[f[2]] - center;
    total += a.dot(b.cross(c));
  }
  return total / 6.0;
}

std::string part_tag(int part) { return "part " + std::to_string(part) + ": "; }

}  // namespace

PartSegmentation::PartSegmentation(const Mesh& mesh, int n_parts,
                                   std::vector<int> face_labels)
    : n_parts_(n_parts), labels_(std::move(face_labels)) {
  if (n_parts_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_parts must be positive");
  }
  if (labels_.size() != mesh.num_faces()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "segmentation has " + std::to_string(labels_.size()) +
                    " labels for " + std::to_string(mesh.num_faces()) +
                    " faces");
  }
  faces_by_part_.assign(n_parts_, {});
  for (std::size_t f = 0; f < labels_.size(); ++f) {
    const int p = labels_[f];
    if (p < 0 || p >= n_parts_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "face " + std::to_string(f) + " has label " +
                      std::to_string(p) + " outside [0, " +
                      std::to_string(n_parts_) + ")");
    }
    faces_by_part_[p].push_back(static_cast<int>(f));
  }
  for (int p = 0; p < n_parts_; ++p) {
    if (faces_by_part_[p].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "part " + std::to_string(p) + " has no faces");
    }
  }
  // A vertex is a boundary vertex iff its incident faces carry >1 label.
  const std::size_t nv = mesh.num_vertices();
  std::vector<int> first(nv, -1);
  std::vector<char> mixed(nv, 0);
  for (std::size_t f = 0; f < labels_.size(); ++f) {
    for (int v : mesh.faces()[f]) {
      if (first[v] < 0) {
        first[v] = labels_[f];
      } else if (first[v] != labels_[f]) {
        mixed[v] = 1;
      }
    }
  }
  boundary_.assign(n_parts_, {});
  for (int p = 0; p < n_parts_; ++p) {
    for (int v : referenced_vertices(mesh.faces(), faces_by_part_[p], nv)) {
      if (mixed[v]) boundary_[p].push_back(v);
    }
  }
}

PartSegmentation PartSegmentation::from_mesh(const Mesh& mesh) {
  if (!mesh.face_parts()) {
    throw Error(ErrorCode::kInvalidArgument, "mesh has no face part labels");
  }
  const auto& labels = *mesh.face_parts();
  const int n = labels.empty()
                    ? 0
                    : *std::max_element(labels.begin(), labels.end()) + 1;
  return PartSegmentation(mesh, n, labels);
}

const std::vector<int>& PartSegmentation::part_faces(int part) const {
  if (part < 0 || part >= n_parts_) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown part " + std::to_string(part));
  }
  return faces_by_part_[part];
}

const std::vector<int>& PartSegmentation::boundary_vertices(int part) const {
  part_faces(part);
  return boundary_[part];
}

ClosedPart close_part(const Mesh& mesh, const PartSegmentation& seg, int part) {
  if (seg.num_faces() != mesh.num_faces()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "segmentation does not match mesh face count");
  }
  const auto& ids = seg.part_faces(part);
  const auto& faces = mesh.faces();

  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(ids.size() * 3);
  for (int f : ids) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k];
      const int b = faces[f][(k + 1) % 3];
      if (++directed[edge_key(a, b)] > 1) {
        throw Error(ErrorCode::kNonManifoldBoundary,
                    part_tag(part) + "edge (" + std::to_string(a) + ", " +
                        std::to_string(b) +
                        ") is used twice with the same orientation");
      }
    }
  }

  // Boundary edge a -> b: its reverse is not among the part's faces.
  std::unordered_map<int, int> next;
  std::vector<int> starts;
  for (int f : ids) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k];
      const int b = faces[f][(k + 1) % 3];
      if (directed.count(edge_key(b, a))) continue;
      if (!next.emplace(a, b).second) {
        throw Error(ErrorCode::kNonManifoldBoundary,
                    part_tag(part) + "boundary is pinched at vertex " +
                        std::to_string(a));
      }
      starts.push_back(a);
    }
  }

  ClosedPart out;
  out.part = part;
  out.num_original_vertices = mesh.num_vertices();
  out.part_vertices = referenced_vertices(faces, ids, mesh.num_vertices());

  std::unordered_map<int, char> visited;
  for (int s : starts) {
    if (visited.count(s)) continue;
    std::vector<int> loop;
    int v = s;
    while (!visited.count(v)) {
      visited.emplace(v, 1);
      loop.push_back(v);
      auto it = next.find(v);
      if (it == next.end()) {
        throw Error(ErrorCode::kNonManifoldBoundary,
                    part_tag(part) + "open boundary chain at vertex " +
                        std::to_string(v));
      }
      v = it->second;
    }
    if (v != s) {
      throw Error(ErrorCode::kNonManifoldBoundary,
                  part_tag(part) + "boundary loops share vertex " +
                      std::to_string(v));
    }
    out.loops.push_back(std::move(loop));
  }

  Points3 vertices = mesh.vertices();
  std::vector<Face> closed;
  closed.reserve(ids.size() + starts.size());
  for (int f : ids) closed.push_back(faces[f]);
  for (const auto& loop : out.loops) {
    const int apex = static_cast<int>(vertices.size());
    vertices.push_back(centroid_of(mesh.vertices(), loop));
    for (std::size_t k = 0; k < loop.size(); ++k) {
      const int a = loop[k];
      const int b = loop[(k + 1) % loop.size()];
      closed.push_back({b, a, apex});
    }
  }
  std::vector<int> labels(closed.size(), part);
  out.mesh = Mesh::trusted(std::move(vertices), std::move(closed),
                           std::move(labels));
  return out;
}

bool is_watertight(const Mesh& mesh) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.num_faces() * 3);
  for (const auto& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      if (++directed[edge_key(f[k], f[(k + 1) % 3])] > 1) return false;
    }
  }
  for (const auto& [key, count] : directed) {
    const auto a = static_cast<int>(key >> 32);
    const auto b = static_cast<int>(key & 0xffffffffu);
    if (!directed.count(edge_key(b, a))) return false;
  }
  return !mesh.faces().empty();
}

double signed_volume(const Mesh& mesh) {
  if (!is_watertight(mesh)) {
    throw Error(ErrorCode::kNotWatertight, "mesh is not watertight");
  }
  std::vector<int> all(mesh.num_faces());
  for (std::size_t f = 0; f < all.size(); ++f) all[f] = static_cast<int>(f);
  const auto used = referenced_vertices(mesh.faces(), all, mesh.num_vertices());
  return tetra_sum(mesh, centroid_of(mesh.vertices(), used));
}

namespace {

double closed_part_volume(const ClosedPart& cp, const Points3& original) {
  if (!is_watertight(cp.mesh)) {
    throw Error(ErrorCode::kNotWatertight,
                part_tag(cp.part) + "closed part is not watertight");
  }
  const double v = tetra_sum(cp.mesh, centroid_of(original, cp.part_vertices));
  if (!(std::abs(v) >= kMinPartVolume)) {
    throw Error(ErrorCode::kNotWatertight,
                part_tag(cp.part) + "closed part encloses no volume");
  }
  return v;
}

}  // namespace

PartVolumes part_volumes(const Mesh& mesh, const PartSegmentation& seg) {
  PartVolumes out;
  out.per_part.reserve(seg.n_parts());
  for (int p = 0; p < seg.n_parts(); ++p) {
    const ClosedPart cp = close_part(mesh, seg, p);
    out.per_part.push_back(closed_part_volume(cp, mesh.vertices()));
    out.total += out.per_part.back();
  }
  return out;
}

PartVolumesWithGrad part_volumes_with_gradient(const Mesh& mesh,
                                               const PartSegmentation& seg) {
  PartVolumesWithGrad out;
  const std::size_t nv = mesh.num_vertices();
  for (int p = 0; p < seg.n_parts(); ++p) {
    const ClosedPart cp = close_part(mesh, seg, p);
    const double v = closed_part_volume(cp, mesh.vertices());
    out.volumes.per_part.push_back(v);
    out.volumes.total += v;

    // The enclosed volume of a closed surface does not depend on the
    // centring point, so only the per-face cross products contribute.
    const Vec3 center = centroid_of(mesh.vertices(), cp.part_vertices);
    const Points3& cv = cp.mesh.vertices();
    Points3 grad(cv.size(), Vec3::Zero());
    for (const auto& f : cp.mesh.faces()) {
      const Vec3 a = cv[f[0]] - center;
      const Vec3 b = cv[f[1]] - center;
      const Vec3 c = cv[f[2]] - center;
      grad[f[0]] += b.cross(c) / 6.0;
      grad[f[1]] += c.cross(a) / 6.0;
      grad[f[2]] += a.cross(b) / 6.0;
    }
    Points3 folded(grad.begin(), grad.begin() + static_cast<long>(nv));
    for (std::size_t l = 0; l < cp.loops.size(); ++l) {
      const Vec3& g_apex = grad[nv + l];
      const double share = 1.0 / static_cast<double>(cp.loops[l].size());
      for (int j : cp.loops[l]) folded[j] += share * g_apex;
    }
    out.gradients.push_back(std::move(folded));
  }
  return out;
}

}  // namespace stabilis
