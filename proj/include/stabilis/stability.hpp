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
#include "stabilis/volumetrics.hpp"

namespace stabilis {

/// Part-volume weighted mean of surface samples; `labels[i]` indexes
/// `volumes.per_part`. Throws kEmptyInput, kInvalidArgument for
/// non-positive volumes or bad labels.
Vec3 com_part(const Points3& samples, const PartVolumes& volumes,
              const std::vector<int>& labels);

/// Mean vertex position.
Vec3 com_naive(const Points3& vertices);
/// Mean of uniformly sampled surface points.
Vec3 com_naive_uniform(const Points3& samples);
/// Area-weighted mean of face centroids.
Vec3 com_trig(const Mesh& mesh);

struct PressureParams {
  double alpha = 100.0;  // penetration stiffness, 1/m
  double gamma = 10.0;   // decay rate above ground, 1/m
};

/// rho(h) = 1 - alpha h below ground, exp(-gamma h) at or above it.
double pressure_value(double h, const PressureParams& params);
/// d rho / d h; the h >= 0 branch is used at h = 0.
double pressure_slope(double h, const PressureParams& params);

struct PressureField {
  std::vector<double> rho;
  PressureParams params;
};

PressureField pressure(const GroundFrame& frame, const Points3& samples,
                       const PressureParams& params);

/// Pressure-weighted mean of samples.
Vec3 cop(const PressureField& field, const Points3& samples);

enum class HullKind { kEmpty, kPoint, kSegment, kPolygon };

/// Andrew's monotone chain. Counter-clockwise, collinear points dropped;
/// degenerate inputs give 0, 1 or 2 vertices.
Points2 convex_hull(Points2 points);
HullKind hull_kind(const Points2& hull);
double polygon_area(const Points2& hull);

/// Boundary-inclusive: half-plane distances >= -tol for polygons, distance
/// <= tol for points and segments; always false for an empty hull.
bool point_in_hull(const Vec2& q, const Points2& hull, double tol = 1e-9);

struct BaseOfSupport {
  double tau = 0.10;
  /// In-plane coordinates (frame tangent basis) of contact samples.
  Points2 contacts;
  Points2 hull;
  HullKind kind = HullKind::kEmpty;
};

/// Contacts are samples with |h| < tau, gravity-projected into the plane.
BaseOfSupport base_of_support(const GroundFrame& frame, const Points3& samples,
                              double tau = 0.10);

bool is_stable(const Vec3& com, const BaseOfSupport& bos,
               const GroundFrame& frame);

}  // namespace stabilis
