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

#include "stabilis/stability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stabilis/error.hpp"

namespace stabilis {
namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double segment_distance(const Vec2& q, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (q - (a + t * ab)).norm();
}

}  // namespace

Vec3 com_part(const Points3& samples, const PartVolumes& volumes,
              const std::vector<int>& labels) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no samples");
  if (labels.size() != samples.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one part label per sample");
  }
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int p = labels[i];
    if (p < 0 || p >= static_cast<int>(volumes.per_part.size())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample " + std::to_string(i) + " has unknown part " +
                      std::to_string(p));
    }
    const double v = volumes.per_part[p];
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "part " + std::to_string(p) + " has non-positive volume");
    }
    num += v * samples[i];
    den += v;
  }
  return num / den;
}

Vec3 com_naive(const Points3& vertices) {
  if (vertices.empty()) throw Error(ErrorCode::kEmptyInput, "no vertices");
  Vec3 sum = Vec3::Zero();
  for (const auto& v : vertices) sum += v;
  return sum / static_cast<double>(vertices.size());
}

Vec3 com_naive_uniform(const Points3& samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no samples");
  return com_naive(samples);
}

Vec3 com_trig(const Mesh& mesh) {
  if (mesh.num_faces() == 0) throw Error(ErrorCode::kEmptyInput, "no faces");
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const double a = mesh.face_area(f);
    num += a * mesh.face_centroid(f);
    den += a;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::kDegenerateMesh, "zero total area");
  return num / den;
}

double pressure_value(double h, const PressureParams& params) {
  return h < 0.0 ? 1.0 - params.alpha * h : std::exp(-params.gamma * h);
}

double pressure_slope(double h, const PressureParams& params) {
  return h < 0.0 ? -params.alpha : -params.gamma * std::exp(-params.gamma * h);
}

PressureField pressure(const GroundFrame& frame, const Points3& samples,
                       const PressureParams& params) {
  if (!(params.alpha >= 0.0) || !(params.gamma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "pressure alpha and gamma must be non-negative");
  }
  PressureField field;
  field.params = params;
  field.rho.reserve(samples.size());
  for (const auto& s : samples) {
    field.rho.push_back(pressure_value(height(frame, s), params));
  }
  return field;
}

Vec3 cop(const PressureField& field, const Points3& samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no samples");
  if (field.rho.size() != samples.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one pressure per sample");
  }
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    num += field.rho[i] * samples[i];
    den += field.rho[i];
  }
  return num / den;
}

Points2 convex_hull(Points2 points) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;

  Points2 hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

HullKind hull_kind(const Points2& hull) {
  switch (hull.size()) {
    case 0: return HullKind::kEmpty;
    case 1: return HullKind::kPoint;
    case 2: return HullKind::kSegment;
    default: return HullKind::kPolygon;
  }
}

double polygon_area(const Points2& hull) {
  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * twice;
}

bool point_in_hull(const Vec2& q, const Points2& hull, double tol) {
  switch (hull_kind(hull)) {
    case HullKind::kEmpty: return false;
    case HullKind::kPoint: return (q - hull[0]).norm() <= tol;
    case HullKind::kSegment: return segment_distance(q, hull[0], hull[1]) <= tol;
    case HullKind::kPolygon: break;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, q) / (b - a).norm() < -tol) return false;
  }
  return true;
}

BaseOfSupport base_of_support(const GroundFrame& frame, const Points3& samples,
                              double tau) {
  if (!(tau > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "contact threshold must be > 0");
  }
  BaseOfSupport bos;
  bos.tau = tau;
  for (const auto& s : samples) {
    if (std::abs(height(frame, s)) < tau) bos.contacts.push_back(frame.to_plane(s));
  }
  bos.hull = convex_hull(bos.contacts);
  bos.kind = hull_kind(bos.hull);
  return bos;
}

bool is_stable(const Vec3& com, const BaseOfSupport& bos,
               const GroundFrame& frame) {
  return point_in_hull(frame.to_plane(com), bos.hull);
}

}  // namespace stabilis
