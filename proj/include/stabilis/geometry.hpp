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
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace stabilis {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Points2 = std::vector<Vec2>;
using Points3 = std::vector<Vec3>;
using Face = std::array<int, 3>;

/// Triangle mesh with optional per-face part labels.
///
/// Construction validates indices, label count and rejects faces with
/// (near-)zero area. Instances are immutable; `with_vertices` produces a mesh
/// with the same topology and new positions (e.g. after posing) without
/// re-running the degeneracy check.
class Mesh {
 public:
  static constexpr double kMinFaceArea = 1e-16;  // m^2

  Mesh() = default;
  Mesh(Points3 vertices, std::vector<Face> faces,
       std::optional<std::vector<int>> face_parts = std::nullopt);

  // Skips the degenerate-face check; used for derived meshes (closed parts)
  // whose caps may legitimately be thin.
  static Mesh trusted(Points3 vertices, std::vector<Face> faces,
                      std::optional<std::vector<int>> face_parts = std::nullopt);

  const Points3& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const std::optional<std::vector<int>>& face_parts() const noexcept {
    return face_parts_;
  }
  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_faces() const noexcept { return faces_.size(); }

  Mesh with_vertices(Points3 vertices) const;

  double face_area(std::size_t f) const;
  Vec3 face_centroid(std::size_t f) const;

 private:
  struct TrustedTag {};
  Mesh(TrustedTag, Points3 vertices, std::vector<Face> faces,
       std::optional<std::vector<int>> face_parts);
  void check_topology() const;

  Points3 vertices_;
  std::vector<Face> faces_;
  std::optional<std::vector<int>> face_parts_;
};

/// Ground plane with a unit up-normal. Gravity acts along -up_normal.
///
/// The in-plane tangent basis is derived deterministically: the first tangent
/// is the coordinate axis least aligned with the normal, orthogonalized
/// against it; the second is normal x first. For up = +z this gives (x, y).
class GroundFrame {
 public:
  GroundFrame();
  GroundFrame(const Vec3& point_on_plane, const Vec3& up_normal);

  const Vec3& point_on_plane() const noexcept { return point_; }
  const Vec3& up_normal() const noexcept { return normal_; }
  const Vec3& tangent_u() const noexcept { return tangent_u_; }
  const Vec3& tangent_v() const noexcept { return tangent_v_; }

  /// In-plane 2D coordinates of the gravity projection of `u`.
  Vec2 to_plane(const Vec3& u) const;
  /// 3D point on the plane with the given in-plane coordinates.
  Vec3 from_plane(const Vec2& q) const;

 private:
  Vec3 point_;
  Vec3 normal_;
  Vec3 tangent_u_;
  Vec3 tangent_v_;
};

/// Signed height; negative below the ground.
double height(const GroundFrame& frame, const Vec3& u);
Vec3 gravity_project(const GroundFrame& frame, const Vec3& u);

enum class CameraModel { kWeakPerspective, kFullPerspective };

struct Camera {
  CameraModel model = CameraModel::kFullPerspective;
  double fx = 1000.0;
  double fy = 1000.0;
  double ox = 0.0;
  double oy = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  // Weak-perspective only.
  double scale = 1.0;
  Vec2 weak_translation = Vec2::Zero();

  // Throws kNonOrthonormalRotation / kInvalidArgument.
  void validate() const;
};

/// Full perspective: pinhole with perspective divide on R X + t.
/// Weak perspective: (fx s (Xc_x + tx) + ox, fy s (Xc_y + ty) + oy), Xc = R X.
Vec2 project_point(const Camera& cam, const Vec3& point);

/// Same as project_point, also writing d(pixel)/d(point).
Vec2 project_point(const Camera& cam, const Vec3& point,
                   Eigen::Matrix<double, 2, 3>& jacobian);

bool is_orthonormal(const Mat3& rotation, double tol = 1e-8);

/// Maps camera-frame vertices to world: v_w = R^T v + (t_world - t_camera).
Mesh world_from_camera(const Mesh& mesh, const Mat3& rotation,
                       const Vec3& world_translation,
                       const Vec3& camera_translation = Vec3::Zero());
/// Inverse of world_from_camera.
Mesh camera_from_world(const Mesh& mesh, const Mat3& rotation,
                       const Vec3& world_translation,
                       const Vec3& camera_translation = Vec3::Zero());

}  // namespace stabilis
