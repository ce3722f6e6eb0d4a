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

#include <vector>

#include "stabilis/geometry.hpp"

namespace stabilis {

/// Fixed per-face part labelling of a template mesh.
///
/// Boundary vertices of part P are the vertices touched by faces of P and by
/// faces of at least one other part. They are derived on construction.
class PartSegmentation {
 public:
  PartSegmentation(const Mesh& mesh, int n_parts, std::vector<int> face_labels);
  /// Uses mesh.face_parts(); n_parts = max label + 1.
  static PartSegmentation from_mesh(const Mesh& mesh);

  int n_parts() const noexcept { return n_parts_; }
  const std::vector<int>& face_labels() const noexcept { return labels_; }
  const std::vector<int>& part_faces(int part) const;
  const std::vector<int>& boundary_vertices(int part) const;
  std::size_t num_faces() const noexcept { return labels_.size(); }

 private:
  int n_parts_;
  std::vector<int> labels_;
  std::vector<std::vector<int>> faces_by_part_;
  std::vector<std::vector<int>> boundary_;
};

/// A part made watertight by fanning every boundary loop to its own apex.
struct ClosedPart {
  int part = 0;
  /// Original vertices followed by one apex per loop; faces are the part's
  /// faces followed by the cap fans.
  Mesh mesh;
  /// Boundary loops as ordered original vertex indices.
  std::vector<std::vector<int>> loops;
  /// Distinct original vertices referenced by the part's faces.
  std::vector<int> part_vertices;
  std::size_t num_original_vertices = 0;
};

ClosedPart close_part(const Mesh& mesh, const PartSegmentation& seg, int part);

/// True iff every directed edge appears exactly once and its reverse exists.
bool is_watertight(const Mesh& mesh);

/// Signed enclosed volume (positive for outward orientation). Vertices are
/// centred at the centroid of the referenced vertices before summing the
/// origin tetrahedra. Throws kNotWatertight.
double signed_volume(const Mesh& mesh);

struct PartVolumes {
  std::vector<double> per_part;
  double total = 0.0;
};

struct PartVolumesWithGrad {
  PartVolumes volumes;
  /// gradients[p][j] = d volume_p / d vertex_j, dense over mesh vertices.
  std::vector<Points3> gradients;
};

/// Close, centre at the part centroid, fill with origin tetrahedra.
/// Parts with |volume| < 1e-12 m^3 raise kNotWatertight.
PartVolumes part_volumes(const Mesh& mesh, const PartSegmentation& seg);
PartVolumesWithGrad part_volumes_with_gradient(const Mesh& mesh,
                                               const PartSegmentation& seg);

}  // namespace stabilis
