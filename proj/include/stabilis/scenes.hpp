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

#include "stabilis/fitting.hpp"
#include "stabilis/geometry.hpp"
#include "stabilis/toy_body.hpp"

namespace stabilis::scenes {

/// Full-perspective camera 3 m in front of the body (on -y), looking at +y,
/// image y pointing down, 1000 px focal length, 1000x1000 image.
Camera front_camera();
GroundFrame flat_ground();

/// Rigid rotation of `pose` about the line through `pivot` along `axis`.
BodyPose rotate_about_line(const ToyBody& body, const BodyPose& pose,
                           const Vec3& pivot, const Vec3& axis, double angle);

/// Rotation about the front toe edge (y = -foot half depth, z = 0) that
/// leans the body toward -y.
BodyPose lean_forward(const ToyBody& body, double angle);

/// Exact projections of the pose's keypoints, confidence 1.
KeypointTargets project_targets(const ToyBody& body, const BodyPose& pose,
                                const Camera& camera);

/// Lean angle whose in-plane CoM-CoP gap equals `gap` (bisection).
double lean_angle_for_gap(const ToyBody& body, const SurfaceRegressor& reg,
                          const LossConfig& cfg, double gap);

/// Seeded non-rest pose with joint rotations up to `max_angle` radians.
BodyPose random_pose(const ToyBody& body, std::uint64_t seed, double max_angle);
/// Composes every joint rotation (and the root rotation) with a rotation of
/// exactly `angle` radians about a seeded random axis.
BodyPose perturb_pose(const BodyPose& pose, std::uint64_t seed, double angle);

inline constexpr std::size_t kSamples = 2000;
inline constexpr std::uint64_t kSeed = 7;

/// Standing body lifted 10 cm, targets from the standing pose.
FitProblem hovering_problem(const ToyBody& body);
/// Body leaned so the CoM projects 15 cm from the CoP, upright targets.
FitProblem leaning_problem(const ToyBody& body, const SurfaceRegressor& reg);
/// Keypoint-only recovery of a known pose from a 5 degree perturbation.
FitProblem pose_recovery_problem(const ToyBody& body);

}  // namespace stabilis::scenes
