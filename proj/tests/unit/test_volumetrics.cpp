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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stabilis/toy_body.hpp"
#include "stabilis/volumetrics.hpp"

namespace stabilis {
namespace {

using testing::error_code_of;

Mesh cube_without_top() {
  const Mesh cube = testing::unit_cube();
  std::vector<Face> faces(cube.faces().begin(), cube.faces().end());
  faces.erase(faces.begin() + 2, faces.begin() + 4);  // z = 1 side
  return Mesh(cube.vertices(), faces, std::vector<int>(faces.size(), 0));
}

TEST(ClosePart, FansSquareHole) {
  const Mesh open = cube_without_top();
  EXPECT_FALSE(is_watertight(open));
  const PartSegmentation seg = PartSegmentation::from_mesh(open);
  const ClosedPart cp = close_part(open, seg, 0);
  ASSERT_EQ(cp.loops.size(), 1u);
  EXPECT_EQ(cp.loops[0].size(), 4u);
  EXPECT_TRUE(is_watertight(cp.mesh));
  EXPECT_EQ(cp.mesh.num_vertices(), 9u);
  EXPECT_TRUE(cp.mesh.vertices().back().isApprox(Vec3(0.5, 0.5, 1.0)));
  EXPECT_NEAR(signed_volume(cp.mesh), 1.0, 1e-12);
}

TEST(ClosePart, ClosedPartUnchanged) {
  const Mesh cube = testing::unit_cube();
  const PartSegmentation seg = PartSegmentation::from_mesh(cube);
  EXPECT_TRUE(seg.boundary_vertices(0).empty());
  const ClosedPart cp = close_part(cube, seg, 0);
  EXPECT_TRUE(cp.loops.empty());
  EXPECT_EQ(cp.mesh.vertices(), cube.vertices());
  EXPECT_EQ(cp.mesh.faces(), cube.faces());
}

TEST(ClosePart, CylinderHalvesSumToAnalyticVolume) {
  const double r = 0.4, h = 1.2;
  const Mesh cyl = testing::cylinder(r, h, 64, 4);
  const PartSegmentation seg = PartSegmentation::from_mesh(cyl);
  double sum = 0.0;
  for (int p = 0; p < 2; ++p) {
    const ClosedPart cp = close_part(cyl, seg, p);
    EXPECT_TRUE(is_watertight(cp.mesh)) << "part " << p;
    sum += signed_volume(cp.mesh);
  }
  // The oracle is the inscribed 64-gon prism, which is what the mesh encloses.
  const double polygon = 0.5 * 64 * r * r * std::sin(2 * std::numbers::pi / 64);
  EXPECT_NEAR(sum / (polygon * h), 1.0, 1e-6);
  EXPECT_NEAR(sum / (std::numbers::pi * r * r * h), 1.0, 2e-3);
}

TEST(ClosePart, RejectsNonManifoldBoundary) {
  // Two triangles sharing only a vertex form a bow-tie boundary.
  const Points3 v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  const Mesh bowtie(v, {{0, 1, 2}, {0, 3, 4}}, std::vector<int>{0, 0});
  const PartSegmentation seg = PartSegmentation::from_mesh(bowtie);
  EXPECT_EQ(error_code_of([&] { close_part(bowtie, seg, 0); }),
            ErrorCode::kNonManifoldBoundary);
}

TEST(SignedVolume, Examples) {
  EXPECT_NEAR(signed_volume(testing::unit_cube()), 1.0, 1e-12);
  const double sphere = signed_volume(testing::icosphere(4));
  EXPECT_NEAR(sphere / (4.0 / 3.0 * std::numbers::pi), 1.0, 5e-3);
  EXPECT_NEAR(signed_volume(testing::unit_cube(1.0, Vec3(100, -50, 7))), 1.0, 1e-9);
}

TEST(SignedVolume, RequiresWatertight) {
  EXPECT_EQ(error_code_of([] { signed_volume(cube_without_top()); }),
            ErrorCode::kNotWatertight);
}

TEST(SignedVolume, TetrahedronClosedForm) {
  // Edge length 2*sqrt(2): V = a^3 / (6 sqrt 2) = 8/3.
  EXPECT_NEAR(signed_volume(testing::regular_tetrahedron()), 8.0 / 3.0, 1e-12);
}

TEST(PartVolumes, SplitCubeHalves) {
  const Mesh cube = testing::split_cube();
  const PartVolumes pv = part_volumes(cube, PartSegmentation::from_mesh(cube));
  ASSERT_EQ(pv.per_part.size(), 2u);
  EXPECT_NEAR(pv.per_part[0], 0.5, 1e-12);
  EXPECT_NEAR(pv.per_part[1], 0.5, 1e-12);
  EXPECT_NEAR(pv.total, 1.0, 1e-12);
}

TEST(PartVolumes, FlatPartIsRejected) {
  const Points3 v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const Mesh flat(v, {{0, 1, 2}, {0, 2, 3}}, std::vector<int>{0, 0});
  EXPECT_EQ(error_code_of([&] { part_volumes(flat, PartSegmentation::from_mesh(flat)); }),
            ErrorCode::kNotWatertight);
}

TEST(PartVolumes, ToyBodyMatchesMonteCarlo) {
  const ToyBody body = ToyBody::build();
  const PartVolumes pv = part_volumes(body.template_mesh(), body.segmentation());
  ASSERT_EQ(pv.per_part.size(), 10u);
  for (double v : pv.per_part) EXPECT_GT(v, 0.0);
  const auto mc = testing::monte_carlo_volume(body.template_mesh(), 1'000'000, 1234);
  EXPECT_NEAR(pv.total / mc.volume, 1.0, 0.01);
  EXPECT_NEAR(pv.total / signed_volume(body.template_mesh()), 1.0, 1e-6);
}

TEST(PartVolumes, MatchesStraightLineOracle) {
  const ToyBody body = ToyBody::build();
  const Mesh& mesh = body.template_mesh();
  const auto oracle = testing::straight_line_part_volumes(
      mesh, body.segmentation().face_labels(), body.segmentation().n_parts());
  const PartVolumes pv = part_volumes(mesh, body.segmentation());
  for (std::size_t p = 0; p < oracle.size(); ++p) {
    EXPECT_NEAR(pv.per_part[p], oracle[p], 1e-12 * std::abs(oracle[p]) + 1e-15);
  }
}

TEST(PartVolumes, RigidAndScaleInvariance) {
  const Mesh cyl = testing::cylinder(0.3, 0.9, 24, 4);
  const PartSegmentation seg = PartSegmentation::from_mesh(cyl);
  const PartVolumes base = part_volumes(cyl, seg);
  const Mat3 r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  Points3 moved, scaled;
  for (const Vec3& p : cyl.vertices()) {
    moved.push_back(r * p + Vec3(4, -2, 9));
    scaled.push_back(1.7 * p);
  }
  const PartVolumes m = part_volumes(cyl.with_vertices(moved), seg);
  const PartVolumes s = part_volumes(cyl.with_vertices(scaled), seg);
  for (int p = 0; p < 2; ++p) {
    EXPECT_NEAR(m.per_part[p] / base.per_part[p], 1.0, 1e-9);
    EXPECT_NEAR(s.per_part[p] / base.per_part[p], std::pow(1.7, 3), 1e-9);
  }
  EXPECT_NEAR(base.total / signed_volume(cyl), 1.0, 1e-6);
}

TEST(PartVolumes, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Mesh mesh = testing::jittered_sphere(seed);
    const PartSegmentation seg = PartSegmentation::from_mesh(mesh);
    const PartVolumesWithGrad g = part_volumes_with_gradient(mesh, seg);
    for (int p = 0; p < seg.n_parts(); ++p) {
      auto f = [&](const Eigen::VectorXd& x) {
        return part_volumes(mesh.with_vertices(testing::unflatten(x)), seg).per_part[p];
      };
      const Eigen::VectorXd fd =
          testing::central_difference(f, testing::flatten(mesh.vertices()));
      EXPECT_LT(testing::max_relative_error(testing::flatten(g.gradients[p]), fd), 1e-5)
          << "seed " << seed << " part " << p;
    }
  }
}

TEST(PartSegmentation, BoundaryVerticesAndValidation) {
  const Mesh cube = testing::split_cube();
  const PartSegmentation seg = PartSegmentation::from_mesh(cube);
  // The x = 0.5 cut ring has 4 vertices and is shared by both parts.
  EXPECT_EQ(seg.boundary_vertices(0).size(), 4u);
  EXPECT_EQ(seg.boundary_vertices(0), seg.boundary_vertices(1));
  for (int v : seg.boundary_vertices(0)) EXPECT_DOUBLE_EQ(cube.vertices()[v].x(), 0.5);

  EXPECT_EQ(error_code_of([&] { PartSegmentation(cube, 2, std::vector<int>(19, 0)); }),
            ErrorCode::kDimensionMismatch);
  std::vector<int> missing(cube.num_faces(), 0);
  EXPECT_EQ(error_code_of([&] { PartSegmentation(cube, 2, missing); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace stabilis
