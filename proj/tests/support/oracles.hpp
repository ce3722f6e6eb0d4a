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

#include <cstdint>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include <Eigen/Core>

#include "stabilis/error.hpp"
#include "stabilis/geometry.hpp"
#include "stabilis/losses.hpp"
#include "stabilis/sampling.hpp"

namespace stabilis::testing {

/// Runs `f` and returns the code of the stabilis::Error it throws; records a
/// test failure when nothing is thrown.
template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no stabilis::Error thrown";
  return ErrorCode::kInvalidArgument;
}

// ---- Mesh generators -------------------------------------------------------

/// Axis-aligned cube [0, size]^3 + offset, 12 outward triangles. Labels: the
/// two faces of each side share a label when `split_x` is false; with
/// `split_x` true the cube is cut at x = size/2 into two labelled halves.
Mesh unit_cube(double size = 1.0, const Vec3& offset = Vec3::Zero());
/// Cube [0,1]^3 built from two half boxes, labels 0 (x < 0.5) and 1.
Mesh split_cube();
Mesh icosphere(int subdivisions, double radius = 1.0);
Mesh regular_tetrahedron();
/// Closed cylinder along z with `rings` height bands; faces with centroid
/// z < h/2 get label 0, others label 1 (caps included).
Mesh cylinder(double radius, double height, int segments, int rings);

/// Cube centred at `offset` with each face fanned around its centre, so the
/// triangulation is mirror symmetric about every axis through the centre.
Mesh fanned_cube(double size = 1.0, const Vec3& offset = Vec3::Zero());

// ---- Volume / CoM oracles --------------------------------------------------

struct MonteCarloResult {
  double volume = 0.0;
  Vec3 centroid = Vec3::Zero();
  std::size_t inside = 0;
};

/// Uniform rejection sampling in the bounding box with a +z ray-parity
/// point-in-mesh test.
MonteCarloResult monte_carlo_volume(const Mesh& mesh, std::size_t n, std::uint64_t seed);

/// Per-part close/centre/fill written independently of the library.
std::vector<double> straight_line_part_volumes(const Mesh& mesh,
                                               const std::vector<int>& labels,
                                               int n_parts);

// ---- Loss oracles ----------------------------------------------------------

/// Samples from the regressor rows, written out without the library's
/// sparse apply.
Points3 straight_line_samples(const SurfaceRegressor& reg, const Points3& vertices);
/// || g(m) - g(s) || from first principles (CoM from part volumes, Eq. 2
/// pressure, weighted means, 2D distance in the plane).
double straight_line_stability(const Mesh& mesh, const std::vector<int>& labels,
                               int n_parts, const SurfaceRegressor& reg,
                               const Vec3& plane_point, const Vec3& up,
                               double alpha, double gamma);
double straight_line_ground(const Points3& samples, const Vec3& plane_point,
                            const Vec3& up, const LossConfig& cfg);

// ---- Hull oracle -----------------------------------------------------------

/// Independent monotone chain + orientation test with `tol` slack.
bool oracle_point_in_hull(const Vec2& q, std::vector<Vec2> pts, double tol = 1e-9);

// ---- Finite differences ----------------------------------------------------

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6);
/// max_i |a_i - b_i| / max(||a||_inf, ||b||_inf); zero when both vanish.
double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric);

Eigen::VectorXd flatten(const Points3& pts);
Points3 unflatten(const Eigen::VectorXd& x);

/// Random small mesh: a closed, jittered icosphere with `n_parts` labels by
/// longitude sector.
Mesh jittered_sphere(std::uint64_t seed, int n_parts = 3, double jitter = 0.05);

}  // namespace stabilis::testing
