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

// Regenerates the synthetic scenes under data/fixtures.
//
//   make_fixtures <output dir>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "stabilis/error.hpp"
#include "stabilis/io.hpp"
#include "stabilis/mesh_io.hpp"
#include "stabilis/scenes.hpp"

namespace fs = std::filesystem;
using namespace stabilis;

namespace {

void write_toy_mesh(const fs::path& path, const ToyBody& body, const BodyPose& pose) {
  fs::create_directories(path.parent_path());
  write_obj(path, pose_mesh(body, pose));
}

void write_joints(const fs::path& path, const ToyBody& body, const BodyPose& pose) {
  io::Json j;
  j["joints"] = io::to_json(body.pose(pose).joint_positions);
  io::write_json(path, j);
}

void write_problem(const fs::path& path, const FitProblem& p) {
  fs::create_directories(path.parent_path());
  io::write_json(path, io::to_json(p, "optimization"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output dir>\n";
    return 2;
  }
  try {
    const fs::path out = argv[1];
    fs::create_directories(out);
    const ToyBody body = ToyBody::build();
    const SurfaceRegressor reg = body.sample(scenes::kSamples, scenes::kSeed);
    const LossConfig cfg = LossConfig::regression();

    io::write_json(out / "ground.json", io::to_json(scenes::flat_ground()));
    io::write_json(out / "camera.json", io::to_json(scenes::front_camera()));
    io::write_json(out / "toy_seg.json",
                   io::segmentation_to_json(ToyBody::kNumParts,
                                            body.segmentation().face_labels()));

    const double lean = scenes::lean_angle_for_gap(body, reg, cfg, 0.15);
    write_toy_mesh(out / "standing" / "mesh.obj", body, body.rest_pose());
    write_toy_mesh(out / "leaning" / "mesh.obj", body, scenes::lean_forward(body, lean));
    write_toy_mesh(out / "tilted" / "mesh.obj", body,
                   scenes::lean_forward(body, std::numbers::pi / 4.0));

    write_problem(out / "fit" / "hovering.json", scenes::hovering_problem(body));
    write_problem(out / "fit" / "leaning.json", scenes::leaning_problem(body, reg));
    write_problem(out / "fit" / "pose_recovery.json", scenes::pose_recovery_problem(body));
    FitProblem kp_only = scenes::hovering_problem(body);
    kp_only.loss.stability_weight = 0.0;
    kp_only.loss.ground_weight = 0.0;
    write_problem(out / "fit" / "keypoint_only.json", kp_only);

    // Evaluation set: frame_002's prediction leans over, the rest are stable.
    BodyPose arms = body.rest_pose();
    arms.joint_rotations[3] = Vec3(0.0, 0.6, 0.0);   // left shoulder
    arms.joint_rotations[5] = Vec3(0.0, -0.6, 0.0);  // right shoulder
    const BodyPose frames_ref[3] = {body.rest_pose(), arms, body.rest_pose()};
    const BodyPose frames_pred[3] = {body.rest_pose(), arms,
                                     scenes::lean_forward(body, lean)};
    for (int i = 0; i < 3; ++i) {
      const std::string stem = "frame_00" + std::to_string(i);
      write_toy_mesh(out / "eval" / "ref" / (stem + ".obj"), body, frames_ref[i]);
      write_joints(out / "eval" / "ref" / (stem + ".joints.json"), body, frames_ref[i]);
      write_toy_mesh(out / "eval" / "pred" / (stem + ".obj"), body, frames_pred[i]);
      write_joints(out / "eval" / "pred" / (stem + ".joints.json"), body, frames_pred[i]);
    }
    std::cout << "lean angle " << lean << " rad\n";
  } catch (const Error& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
