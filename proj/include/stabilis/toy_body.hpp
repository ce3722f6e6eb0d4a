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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stabilis/geometry.hpp"
#include "stabilis/sampling.hpp"
#include "stabilis/volumetrics.hpp"

namespace stabilis {

struct Joint {
  std::string name;
  int parent = -1;
  Vec3 rest_position = Vec3::Zero();
};

/// A point rigidly attached to one joint (joint centres and end sites).
struct Keypoint {
  std::string name;
  int joint = 0;
  Vec3 rest_position = Vec3::Zero();
};

struct SkinInfluence {
  int joint = 0;
  double weight = 0.0;
};

/// Pose parameters: root rotation (axis-angle) and translation, plus an
/// axis-angle rotation for every non-root joint.
struct BodyPose {
  Vec3 root_rotation = Vec3::Zero();
  Vec3 root_translation = Vec3::Zero();
  std::vector<Vec3> joint_rotations;

  /// Parameter layout: [root_rotation(3), root_translation(3),
  /// joint_rotations[0](3), ...].
  Eigen::VectorXd to_vector() const;
  static BodyPose from_vector(const Eigen::VectorXd& params);
};

struct PosedBody {
  Mesh mesh;
  Points3 keypoints;
  Points3 joint_positions;
  /// d(vertex coordinates)/d(params): 3 N_V x P (row 3j + c), empty unless
  /// requested. Same layout for keypoints.
  Eigen::MatrixXd vertex_jacobian;
  Eigen::MatrixXd keypoint_jacobian;
};

struct ToyBodyOptions {
  /// Grid cells per 4 cm. 2 gives ~1.8k vertices, 1 gives ~460.
  int resolution = 2;
};

/// Linear-blend-skinned articulated body about 1 m tall, built from a box
/// torso and square tubes, standing on z = 0 facing -y.
///
/// Ten parts: head, torso, then upper/lower arm and upper/lower leg for each
/// side. The mesh is watertight and symmetric under x -> -x and y -> -y.
class ToyBody {
 public:
  enum Part : int {
    kHead = 0,
    kTorso,
    kLeftUpperArm,
    kLeftLowerArm,
    kRightUpperArm,
    kRightLowerArm,
    kLeftUpperLeg,
    kLeftLowerLeg,
    kRightUpperLeg,
    kRightLowerLeg,
    kNumParts
  };

  static ToyBody build(const ToyBodyOptions& options = {});

  const Mesh& template_mesh() const noexcept { return mesh_; }
  const std::vector<Joint>& joints() const noexcept { return joints_; }
  const std::vector<Keypoint>& keypoints() const noexcept { return keypoints_; }
  const std::vector<std::array<SkinInfluence, 2>>& skin() const noexcept {
    return skin_;
  }
  const PartSegmentation& segmentation() const noexcept { return segmentation_; }

  std::size_t num_joints() const noexcept { return joints_.size(); }
  std::size_t num_params() const noexcept { return 3 * (joints_.size() + 1); }
  BodyPose rest_pose() const;
  /// Mirror planes the template is symmetric under (x and y).
  static std::vector<int> mirror_axes() { return {0, 1}; }
  /// Symmetric area-uniform samples on the template.
  SurfaceRegressor sample(std::size_t n, std::uint64_t seed) const;

  PosedBody pose(const BodyPose& pose, bool with_jacobian = false) const;

 private:
  ToyBody(Mesh mesh, std::vector<Joint> joints, std::vector<Keypoint> keypoints,
          std::vector<std::array<SkinInfluence, 2>> skin);

  Mesh mesh_;
  std::vector<Joint> joints_;
  std::vector<Keypoint> keypoints_;
  std::vector<std::array<SkinInfluence, 2>> skin_;
  PartSegmentation segmentation_;
};

/// Forward kinematics + LBS of the template.
Mesh pose_mesh(const ToyBody& body, const BodyPose& pose);

}  // namespace stabilis
