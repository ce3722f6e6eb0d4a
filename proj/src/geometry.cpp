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

#include "stabilis/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "stabilis/error.hpp"

namespace stabilis {

Mesh::Mesh(Points3 vertices, std::vector<Face> faces,
           std::optional<std::vector<int>> face_parts)
    : vertices_(std::move(vertices)),
      faces_(std::move(faces)),
      face_parts_(std::move(face_parts)) {
  check_topology();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (!(face_area(f) > kMinFaceArea)) {
      throw Error(ErrorCode::kDegenerateMesh,
                  "face " + std::to_string(f) + " has zero area");
    }
  }
}

Mesh::Mesh(TrustedTag, Points3 vertices, std::vector<Face> faces,
           std::optional<std::vector<int>> face_parts)
    : vertices_(std::move(vertices)),
      faces_(std::move(faces)),
      face_parts_(std::move(face_parts)) {
  check_topology();
}

Mesh Mesh::trusted(Points3 vertices, std::vector<Face> faces,
                   std::optional<std::vector<int>> face_parts) {
  return Mesh(TrustedTag{}, std::move(vertices), std::move(faces),
              std::move(face_parts));
}

void Mesh::check_topology() const {
  const auto n = static_cast<long long>(vertices_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (int idx : faces_[f]) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "face " + std::to_string(f) + " references vertex " +
                        std::to_string(idx) + " of " + std::to_string(n));
      }
    }
  }
  for (const auto& v : vertices_) {
    if (!v.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite vertex position");
    }
  }
  if (face_parts_ && face_parts_->size() != faces_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "face_parts has " + std::to_string(face_parts_->size()) +
                    " entries for " + std::to_string(faces_.size()) + " faces");
  }
}

Mesh Mesh::with_vertices(Points3 vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(vertices_.size()) +
                    " vertices, got " + std::to_string(vertices.size()));
  }
  return Mesh(TrustedTag{}, std::move(vertices), faces_, face_parts_);
}

double Mesh::face_area(std::size_t f) const {
  const Face& t = faces_[f];
  const Vec3& a = vertices_[t[0]];
  return 0.5 * (vertices_[t[1]] - a).cross(vertices_[t[2]] - a).norm();
}

Vec3 Mesh::face_centroid(std::size_t f) const {
  const Face& t = faces_[f];
  return (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
}

GroundFrame::GroundFrame() : GroundFrame(Vec3::Zero(), Vec3::UnitZ()) {}

GroundFrame::GroundFrame(const Vec3& point_on_plane, const Vec3& up_normal)
    : point_(point_on_plane) {
  const double n = up_normal.norm();
  if (!point_on_plane.allFinite() || !std::isfinite(n) || n < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument,
                "ground frame needs a finite point and non-zero normal");
  }
  normal_ = up_normal / n;
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(normal_[k]) < std::abs(normal_[axis])) axis = k;
  }
  Vec3 e = Vec3::Unit(axis);
  tangent_u_ = (e - normal_.dot(e) * normal_).normalized();
  tangent_v_ = normal_.cross(tangent_u_);
}

Vec2 GroundFrame::to_plane(const Vec3& u) const {
  const Vec3 d = u - point_;
  return {tangent_u_.dot(d), tangent_v_.dot(d)};
}

Vec3 GroundFrame::from_plane(const Vec2& q) const {
  return point_ + q.x() * tangent_u_ + q.y() * tangent_v_;
}

double height(const GroundFrame& frame, const Vec3& u) {
  return frame.up_normal().dot(u - frame.point_on_plane());
}

Vec3 gravity_project(const GroundFrame& frame, const Vec3& u) {
  return u - height(frame, u) * frame.up_normal();
}

bool is_orthonormal(const Mat3& rotation, double tol) {
  if (!rotation.allFinite()) return false;
  return (rotation.transpose() * rotation - Mat3::Identity())
             .cwiseAbs()
             .maxCoeff() <= tol;
}

void Camera::validate() const {
  if (!is_orthonormal(rotation)) {
    throw Error(ErrorCode::kNonOrthonormalRotation,
                "camera rotation is not orthonormal");
  }
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (model == CameraModel::kWeakPerspective && !(scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "weak-perspective scale must be positive");
  }
}

Vec2 project_point(const Camera& cam, const Vec3& point) {
  Eigen::Matrix<double, 2, 3> unused;
  return project_point(cam, point, unused);
}

Vec2 project_point(const Camera& cam, const Vec3& point,
                   Eigen::Matrix<double, 2, 3>& jacobian) {
  if (cam.model == CameraModel::kWeakPerspective) {
    const Vec3 xc = cam.rotation * point;
    jacobian.row(0) = cam.fx * cam.scale * cam.rotation.row(0);
    jacobian.row(1) = cam.fy * cam.scale * cam.rotation.row(1);
    return {cam.fx * cam.scale * (xc.x() + cam.weak_translation.x()) + cam.ox,
            cam.fy * cam.scale * (xc.y() + cam.weak_translation.y()) + cam.oy};
  }
  const Vec3 xc = cam.rotation * point + cam.translation;
  const double z = xc.z();
  if (!(z > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "camera-frame depth " + std::to_string(z) + " <= 0");
  }
  Eigen::Matrix<double, 2, 3> dproj;
  dproj << cam.fx / z, 0.0, -cam.fx * xc.x() / (z * z),  //
      0.0, cam.fy / z, -cam.fy * xc.y() / (z * z);
  jacobian = dproj * cam.rotation;
  return {cam.fx * xc.x() / z + cam.ox, cam.fy * xc.y() / z + cam.oy};
}

Mesh world_from_camera(const Mesh& mesh, const Mat3& rotation,
                       const Vec3& world_translation,
                       const Vec3& camera_translation) {
  if (!is_orthonormal(rotation)) {
    throw Error(ErrorCode::kNonOrthonormalRotation,
                "camera-to-world rotation is not orthonormal");
  }
  const Vec3 offset = world_translation - camera_translation;
  Points3 out;
  out.reserve(mesh.num_vertices());
  for (const auto& v : mesh.vertices()) {
    out.push_back(rotation.transpose() * v + offset);
  }
  return mesh.with_vertices(std::move(out));
}

Mesh camera_from_world(const Mesh& mesh, const Mat3& rotation,
                       const Vec3& world_translation,
                       const Vec3& camera_translation) {
  if (!is_orthonormal(rotation)) {
    throw Error(ErrorCode::kNonOrthonormalRotation,
                "camera-to-world rotation is not orthonormal");
  }
  const Vec3 offset = world_translation - camera_translation;
  Points3 out;
  out.reserve(mesh.num_vertices());
  for (const auto& v : mesh.vertices()) {
    out.push_back(rotation * (v - offset));
  }
  return mesh.with_vertices(std::move(out));
}

}  // namespace stabilis
