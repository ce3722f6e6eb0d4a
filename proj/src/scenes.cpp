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

#include "stabilis/scenes.hpp"

#include <cmath>
#include <numbers>

#include "stabilis/rng.hpp"
#include "stabilis/rotation.hpp"

namespace stabilis::scenes {

Camera front_camera() {
  Camera cam;
  cam.model = CameraModel::kFullPerspective;
  cam.fx = cam.fy = 1000.0;
  cam.ox = cam.oy = 500.0;
  cam.rotation << 1.0, 0.0, 0.0,  //
      0.0, 0.0, -1.0,             //
      0.0, 1.0, 0.0;
  cam.translation = Vec3(0.0, 0.5, 3.0);
  return cam;
}

GroundFrame flat_ground() { return GroundFrame(Vec3::Zero(), Vec3::UnitZ()); }

BodyPose rotate_about_line(const ToyBody& body, const BodyPose& pose,
                           const Vec3& pivot, const Vec3& axis, double angle) {
  const Mat3 r = rotation_from_axis_angle(axis.normalized() * angle);
  const Mat3 rb = rotation_from_axis_angle(pose.root_rotation);
  const Vec3 j0 = body.joints()[0].rest_position;
  // y = R (Rb (X - J0) + J0 + t - pivot) + pivot
  BodyPose out = pose;
  out.root_rotation = axis_angle_from_rotation(r * rb);
  out.root_translation = r * (j0 + pose.root_translation - pivot) + pivot - j0;
  return out;
}

BodyPose lean_forward(const ToyBody& body, double angle) {
  double toe = 0.0;
  for (const Vec3& v : body.template_mesh().vertices()) toe = std::min(toe, v.y());
  return rotate_about_line(body, body.rest_pose(), Vec3(0.0, toe, 0.0), Vec3::UnitX(),
                           angle);
}

KeypointTargets project_targets(const ToyBody& body, const BodyPose& pose,
                                const Camera& camera) {
  const PosedBody posed = body.pose(pose, false);
  KeypointTargets t;
  for (const Vec3& k : posed.keypoints) {
    t.points.push_back(project_point(camera, k));
    t.confidence.push_back(1.0);
  }
  return t;
}

double lean_angle_for_gap(const ToyBody& body, const SurfaceRegressor& reg,
                          const LossConfig& cfg, double gap) {
  const GroundFrame ground = flat_ground();
  auto loss_at = [&](double a) {
    return stability_loss(pose_mesh(body, lean_forward(body, a)), body.segmentation(),
                          reg, ground, cfg)
        .value;
  };
  double lo = 0.0;
  double hi = std::numbers::pi / 3.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (loss_at(mid) < gap ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

Vec3 random_unit(const CounterRng& rng, std::uint64_t& counter) {
  const double z = 2.0 * rng.uniform(counter++) - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform(counter++);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(s * std::cos(phi), s * std::sin(phi), z);
}

}  // namespace

BodyPose random_pose(const ToyBody& body, std::uint64_t seed, double max_angle) {
  const CounterRng rng(seed);
  std::uint64_t counter = 0;
  BodyPose p = body.rest_pose();
  for (Vec3& w : p.joint_rotations) {
    const Vec3 axis = random_unit(rng, counter);
    w = axis * (max_angle * rng.uniform(counter++));
  }
  return p;
}

BodyPose perturb_pose(const BodyPose& pose, std::uint64_t seed, double angle) {
  const CounterRng rng(seed);
  std::uint64_t counter = 0;
  auto perturb = [&](const Vec3& w) {
    const Mat3 d = rotation_from_axis_angle(random_unit(rng, counter) * angle);
    return axis_angle_from_rotation(d * rotation_from_axis_angle(w));
  };
  BodyPose out = pose;
  out.root_rotation = perturb(pose.root_rotation);
  for (Vec3& w : out.joint_rotations) w = perturb(w);
  return out;
}

namespace {

FitProblem base_problem(const ToyBody& body) {
  FitProblem p;
  p.body.resolution = 2;
  p.camera = front_camera();
  p.ground = flat_ground();
  p.loss = LossConfig::optimization();
  p.init = body.rest_pose();
  p.num_samples = kSamples;
  p.seed = kSeed;
  return p;
}

}  // namespace

FitProblem hovering_problem(const ToyBody& body) {
  FitProblem p = base_problem(body);
  p.targets = project_targets(body, body.rest_pose(), p.camera);
  p.init.root_translation = Vec3(0.0, 0.0, 0.10);
  return p;
}

FitProblem leaning_problem(const ToyBody& body, const SurfaceRegressor& reg) {
  FitProblem p = base_problem(body);
  p.targets = project_targets(body, body.rest_pose(), p.camera);
  p.init = lean_forward(body, lean_angle_for_gap(body, reg, p.loss, 0.15));
  return p;
}

FitProblem pose_recovery_problem(const ToyBody& body) {
  FitProblem p = base_problem(body);
  const BodyPose truth = random_pose(body, 11, 0.5);
  p.targets = project_targets(body, truth, p.camera);
  p.init = perturb_pose(truth, 12, 5.0 * std::numbers::pi / 180.0);
  p.loss.stability_weight = 0.0;
  p.loss.ground_weight = 0.0;
  p.init.root_translation = truth.root_translation;
  return p;
}

}  // namespace stabilis::scenes
