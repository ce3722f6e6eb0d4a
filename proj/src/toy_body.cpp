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

#include "stabilis/toy_body.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "stabilis/error.hpp"
#include "stabilis/rotation.hpp"

namespace stabilis {
namespace {

enum JointId : int {
  kPelvis = 0,
  kSpine,
  kNeck,
  kHeadJoint,
  kLeftShoulder,
  kLeftElbow,
  kRightShoulder,
  kRightElbow,
  kLeftHip,
  kLeftKnee,
  kRightHip,
  kRightKnee,
  kNumJoints
};

using Skin = std::array<SkinInfluence, 2>;

Skin rigid(int joint) { return {SkinInfluence{joint, 1.0}, SkinInfluence{joint, 0.0}}; }
Skin blend(int a, int b, double wb) {
  return {SkinInfluence{a, 1.0 - wb}, SkinInfluence{b, wb}};
}

class MeshBuilder {
 public:
  int vertex(const Vec3& p, const Skin& skin) {
    // +0.0 folds -0.0 so mirrored lattice points share one key.
    const std::array<double, 3> key{p.x() + 0.0, p.y() + 0.0, p.z() + 0.0};
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(vertices_.size()));
    if (inserted) {
      vertices_.push_back(p);
      skin_.push_back(skin);
    }
    return it->second;
  }

  // Corners in cyclic order. The diagonal passes through the corner whose
  // (|x|, |y|, z) image is lexicographically smallest, which keeps the
  // triangulation invariant under the x and y mirrors.
  void quad(const std::array<int, 4>& c, const Vec3& outward, int part) {
    int best = 0;
    for (int k = 1; k < 4; ++k) {
      if (image(c[k]) < image(c[best])) best = k;
    }
    if (best % 2 == 0) {
      triangle(c[0], c[1], c[2], outward, part);
      triangle(c[0], c[2], c[3], outward, part);
    } else {
      triangle(c[1], c[2], c[3], outward, part);
      triangle(c[1], c[3], c[0], outward, part);
    }
  }

  Points3 take_vertices() { return std::move(vertices_); }
  std::vector<Face> take_faces() { return std::move(faces_); }
  std::vector<int> take_parts() { return std::move(parts_); }
  std::vector<Skin> take_skin() { return std::move(skin_); }

 private:
  std::array<double, 3> image(int v) const {
    const Vec3& p = vertices_[v];
    return {std::abs(p.x()), std::abs(p.y()), p.z()};
  }

  void triangle(int a, int b, int c, const Vec3& outward, int part) {
    const Vec3 n = (vertices_[b] - vertices_[a]).cross(vertices_[c] - vertices_[a]);
    if (n.dot(outward) < 0.0) std::swap(b, c);
    faces_.push_back({a, b, c});
    parts_.push_back(part);
  }

  std::map<std::array<double, 3>, int> index_;
  Points3 vertices_;
  std::vector<Skin> skin_;
  std::vector<Face> faces_;
  std::vector<int> parts_;
};

struct Rect {
  int b0, b1, c0, c1;
  bool contains_cell(int ib, int ic) const {
    return ib >= b0 && ib < b1 && ic >= c0 && ic < c1;
  }
};

struct Tube {
  int axis;   // extension axis
  int b_axis;
  int c_axis;
  Rect rect;  // lattice cross-section
  double s0;  // start coordinate along axis (on the torso face)
  double s1;  // end coordinate
  int sections;
  std::function<Skin(int ring)> ring_skin;
  std::function<int(int section)> section_part;
  Skin cap_skin;
  int cap_part;
};

Vec3 compose(int axis, double s, int b_axis, double b, int c_axis, double c) {
  Vec3 p;
  p[axis] = s;
  p[b_axis] = b;
  p[c_axis] = c;
  return p;
}

void add_tube(MeshBuilder& mb, const Tube& t, double cell) {
  std::vector<std::pair<int, int>> ring;  // (ib, ic) around the rectangle
  for (int ib = t.rect.b0; ib < t.rect.b1; ++ib) ring.emplace_back(ib, t.rect.c0);
  for (int ic = t.rect.c0; ic < t.rect.c1; ++ic) ring.emplace_back(t.rect.b1, ic);
  for (int ib = t.rect.b1; ib > t.rect.b0; --ib) ring.emplace_back(ib, t.rect.c1);
  for (int ic = t.rect.c1; ic > t.rect.c0; --ic) ring.emplace_back(t.rect.b0, ic);

  auto s_at = [&](int k) { return t.s0 + (t.s1 - t.s0) * k / t.sections; };
  const double bc = 0.5 * (t.rect.b0 + t.rect.b1) * cell;
  const double cc = 0.5 * (t.rect.c0 + t.rect.c1) * cell;
  const double dir = t.s1 > t.s0 ? 1.0 : -1.0;

  std::vector<std::vector<int>> ids(t.sections + 1);
  for (int k = 0; k <= t.sections; ++k) {
    for (const auto& [ib, ic] : ring) {
      ids[k].push_back(mb.vertex(
          compose(t.axis, s_at(k), t.b_axis, ib * cell, t.c_axis, ic * cell),
          t.ring_skin(k)));
    }
  }
  const std::size_t m = ring.size();
  for (int k = 0; k < t.sections; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t jn = (j + 1) % m;
      const double mb_ = 0.5 * (ring[j].first + ring[jn].first) * cell - bc;
      const double mc_ = 0.5 * (ring[j].second + ring[jn].second) * cell - cc;
      const Vec3 outward = compose(t.axis, 0.0, t.b_axis, mb_, t.c_axis, mc_);
      mb.quad({ids[k][j], ids[k][jn], ids[k + 1][jn], ids[k + 1][j]}, outward,
              t.section_part(k));
    }
  }
  const double s_end = s_at(t.sections);
  Vec3 cap_out = Vec3::Zero();
  cap_out[t.axis] = dir;
  for (int ib = t.rect.b0; ib < t.rect.b1; ++ib) {
    for (int ic = t.rect.c0; ic < t.rect.c1; ++ic) {
      std::array<int, 4> q;
      const int db[4] = {0, 1, 1, 0};
      const int dc[4] = {0, 0, 1, 1};
      for (int k = 0; k < 4; ++k) {
        q[k] = mb.vertex(compose(t.axis, s_end, t.b_axis, (ib + db[k]) * cell,
                                 t.c_axis, (ic + dc[k]) * cell),
                         t.cap_skin);
      }
      mb.quad(q, cap_out, t.cap_part);
    }
  }
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

std::vector<Joint> make_joints() {
  return {
      {"pelvis", -1, Vec3(0.0, 0.0, 0.44)},
      {"spine", kPelvis, Vec3(0.0, 0.0, 0.62)},
      {"neck", kSpine, Vec3(0.0, 0.0, 0.80)},
      {"head", kNeck, Vec3(0.0, 0.0, 0.88)},
      {"left_shoulder", kSpine, Vec3(0.16, 0.0, 0.72)},
      {"left_elbow", kLeftShoulder, Vec3(0.34, 0.0, 0.72)},
      {"right_shoulder", kSpine, Vec3(-0.16, 0.0, 0.72)},
      {"right_elbow", kRightShoulder, Vec3(-0.34, 0.0, 0.72)},
      {"left_hip", kPelvis, Vec3(0.08, 0.0, 0.44)},
      {"left_knee", kLeftHip, Vec3(0.08, 0.0, 0.22)},
      {"right_hip", kPelvis, Vec3(-0.08, 0.0, 0.44)},
      {"right_knee", kRightHip, Vec3(-0.08, 0.0, 0.22)},
  };
}

std::vector<Keypoint> make_keypoints(const std::vector<Joint>& joints) {
  std::vector<Keypoint> kp;
  for (std::size_t j = 0; j < joints.size(); ++j) {
    kp.push_back({joints[j].name, static_cast<int>(j), joints[j].rest_position});
  }
  kp.push_back({"head_top", kHeadJoint, Vec3(0.0, 0.0, 1.0)});
  kp.push_back({"left_wrist", kLeftElbow, Vec3(0.52, 0.0, 0.72)});
  kp.push_back({"right_wrist", kRightElbow, Vec3(-0.52, 0.0, 0.72)});
  kp.push_back({"left_ankle", kLeftKnee, Vec3(0.08, 0.0, 0.02)});
  kp.push_back({"right_ankle", kRightKnee, Vec3(-0.08, 0.0, 0.02)});
  return kp;
}

}  // namespace

Eigen::VectorXd BodyPose::to_vector() const {
  Eigen::VectorXd v(6 + 3 * joint_rotations.size());
  v.segment<3>(0) = root_rotation;
  v.segment<3>(3) = root_translation;
  for (std::size_t j = 0; j < joint_rotations.size(); ++j) {
    v.segment<3>(6 + 3 * j) = joint_rotations[j];
  }
  return v;
}

BodyPose BodyPose::from_vector(const Eigen::VectorXd& params) {
  if (params.size() < 6 || params.size() % 3 != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pose vector length " + std::to_string(params.size()) +
                    " is not 6 + 3k");
  }
  BodyPose p;
  p.root_rotation = params.segment<3>(0);
  p.root_translation = params.segment<3>(3);
  const Eigen::Index nj = (params.size() - 6) / 3;
  p.joint_rotations.resize(nj);
  for (Eigen::Index j = 0; j < nj; ++j) p.joint_rotations[j] = params.segment<3>(6 + 3 * j);
  return p;
}

ToyBody::ToyBody(Mesh mesh, std::vector<Joint> joints,
                 std::vector<Keypoint> keypoints, std::vector<Skin> skin)
    : mesh_(std::move(mesh)),
      joints_(std::move(joints)),
      keypoints_(std::move(keypoints)),
      skin_(std::move(skin)),
      segmentation_(PartSegmentation::from_mesh(mesh_)) {}

ToyBody ToyBody::build(const ToyBodyOptions& options) {
  const int r = options.resolution;
  if (r < 1 || r > 8) {
    throw Error(ErrorCode::kInvalidArgument,
                "toy body resolution must be in [1, 8], got " + std::to_string(r));
  }
  const double cell = 0.04 / r;
  MeshBuilder mb;

  auto torso_skin = [](const Vec3& p) {
    return blend(kPelvis, kSpine, smoothstep((p.z() - 0.50) / 0.20));
  };

  // Torso box faces with port holes. Lattice ranges per axis.
  const int lo[3] = {-4 * r, -2 * r, 11 * r};
  const int hi[3] = {4 * r, 2 * r, 20 * r};
  for (int axis = 0; axis < 3; ++axis) {
    const int b_axis = (axis + 1) % 3;
    const int c_axis = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      const int ia = side == 0 ? lo[axis] : hi[axis];
      std::vector<Rect> holes;
      if (axis == 2 && side == 0) {  // hips; b = x, c = y
        holes.push_back({r, 3 * r, -r, r});
        holes.push_back({-3 * r, -r, -r, r});
      } else if (axis == 2 && side == 1) {  // neck
        holes.push_back({-r, r, -r, r});
      } else if (axis == 0) {  // shoulders; b = y, c = z
        holes.push_back({-r, r, 17 * r, 19 * r});
      }
      Vec3 outward = Vec3::Zero();
      outward[axis] = side == 0 ? -1.0 : 1.0;
      for (int ib = lo[b_axis]; ib < hi[b_axis]; ++ib) {
        for (int ic = lo[c_axis]; ic < hi[c_axis]; ++ic) {
          if (std::any_of(holes.begin(), holes.end(),
                          [&](const Rect& h) { return h.contains_cell(ib, ic); })) {
            continue;
          }
          std::array<int, 4> q;
          const int db[4] = {0, 1, 1, 0};
          const int dc[4] = {0, 0, 1, 1};
          for (int k = 0; k < 4; ++k) {
            const Vec3 p = compose(axis, ia * cell, b_axis, (ib + db[k]) * cell,
                                   c_axis, (ic + dc[k]) * cell);
            q[k] = mb.vertex(p, torso_skin(p));
          }
          mb.quad(q, outward, kTorso);
        }
      }
    }
  }

  auto limb = [&](int axis, int b_axis, int c_axis, Rect rect, double s0,
                  double s1, int upper_joint, int lower_joint, int upper_part,
                  int lower_part) {
    const int sections = 4 * r;
    const int mid = sections / 2;
    Tube t{axis,
           b_axis,
           c_axis,
           rect,
           s0,
           s1,
           sections,
           [=](int k) {
             if (k < mid) return rigid(upper_joint);
             if (k == mid) return blend(upper_joint, lower_joint, 0.5);
             return rigid(lower_joint);
           },
           [=](int k) { return k < mid ? upper_part : lower_part; },
           rigid(lower_joint),
           lower_part};
    add_tube(mb, t, cell);
  };

  const double hip_z = 11 * r * cell;
  const double shoulder_x = 4 * r * cell;
  limb(2, 0, 1, {r, 3 * r, -r, r}, hip_z, 0.0, kLeftHip, kLeftKnee, kLeftUpperLeg,
       kLeftLowerLeg);
  limb(2, 0, 1, {-3 * r, -r, -r, r}, hip_z, 0.0, kRightHip, kRightKnee,
       kRightUpperLeg, kRightLowerLeg);
  limb(0, 1, 2, {-r, r, 17 * r, 19 * r}, shoulder_x, 0.52, kLeftShoulder,
       kLeftElbow, kLeftUpperArm, kLeftLowerArm);
  limb(0, 1, 2, {-r, r, 17 * r, 19 * r}, -shoulder_x, -0.52, kRightShoulder,
       kRightElbow, kRightUpperArm, kRightLowerArm);

  Tube head{2,
            0,
            1,
            {-r, r, -r, r},
            20 * r * cell,
            1.0,
            5,
            [](int k) {
              if (k < 2) return rigid(kNeck);
              if (k == 2) return blend(kNeck, kHeadJoint, 0.5);
              return rigid(kHeadJoint);
            },
            [](int) { return static_cast<int>(kHead); },
            rigid(kHeadJoint),
            kHead};
  add_tube(mb, head, cell);

  std::vector<Skin> skin = mb.take_skin();
  Mesh mesh(mb.take_vertices(), mb.take_faces(), mb.take_parts());
  std::vector<Joint> joints = make_joints();
  std::vector<Keypoint> keypoints = make_keypoints(joints);
  return ToyBody(std::move(mesh), std::move(joints), std::move(keypoints),
                 std::move(skin));
}

BodyPose ToyBody::rest_pose() const {
  BodyPose p;
  p.joint_rotations.assign(joints_.size() - 1, Vec3::Zero());
  return p;
}

SurfaceRegressor ToyBody::sample(std::size_t n, std::uint64_t seed) const {
  SamplingOptions opts;
  opts.mirror_axes = mirror_axes();
  return sample_surface(mesh_, n, seed, opts);
}

PosedBody ToyBody::pose(const BodyPose& pose, bool with_jacobian) const {
  const std::size_t nj = joints_.size();
  if (pose.joint_rotations.size() + 1 != nj) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pose has " + std::to_string(pose.joint_rotations.size()) +
                    " joint rotations, body has " + std::to_string(nj - 1) +
                    " non-root joints");
  }
  std::vector<Mat3> local(nj), global(nj);
  Points3 origin(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    const Vec3& w = j == 0 ? pose.root_rotation : pose.joint_rotations[j - 1];
    if (!w.allFinite()) throw Error(ErrorCode::kDivergedNaN, "non-finite pose");
    local[j] = rotation_from_axis_angle(w);
    const int parent = joints_[j].parent;
    if (parent < 0) {
      global[j] = local[j];
      origin[j] = joints_[j].rest_position + pose.root_translation;
    } else {
      global[j] = global[parent] * local[j];
      origin[j] = origin[parent] + global[parent] * (joints_[j].rest_position -
                                                     joints_[parent].rest_position);
    }
  }

  // D[j][k] maps (y - origin_j) to dy/dtheta_jk.
  std::vector<std::array<Mat3, 3>> dmat(nj);
  if (with_jacobian) {
    for (std::size_t j = 0; j < nj; ++j) {
      const Vec3& w = j == 0 ? pose.root_rotation : pose.joint_rotations[j - 1];
      const auto dr = rotation_derivatives(w, local[j]);
      const int parent = joints_[j].parent;
      const Mat3 qp = parent < 0 ? Mat3::Identity() : global[parent];
      for (int k = 0; k < 3; ++k) {
        dmat[j][k] = qp * dr[k] * local[j].transpose() * qp.transpose();
      }
    }
  }
  const Eigen::Index np = static_cast<Eigen::Index>(num_params());
  auto column = [](std::size_t joint, int k) {
    return static_cast<Eigen::Index>(joint == 0 ? k : 6 + 3 * (joint - 1) + k);
  };

  auto accumulate = [&](Eigen::MatrixXd& jac, Eigen::Index row, int joint,
                        double weight, const Vec3& y_joint) {
    for (int a = joint; a > 0; a = joints_[a].parent) {
      const Vec3 rel = y_joint - origin[a];
      for (int k = 0; k < 3; ++k) {
        jac.block<3, 1>(row, column(a, k)) += weight * (dmat[a][k] * rel);
      }
    }
  };
  auto finish_root = [&](Eigen::MatrixXd& jac, Eigen::Index row, const Vec3& y) {
    const Vec3 rel = y - origin[0];
    for (int k = 0; k < 3; ++k) jac.block<3, 1>(row, k) += dmat[0][k] * rel;
    jac.block<3, 3>(row, 3) += Mat3::Identity();
  };

  PosedBody out;
  const Points3& rest = mesh_.vertices();
  Points3 posed(rest.size());
  if (with_jacobian) out.vertex_jacobian = Eigen::MatrixXd::Zero(3 * rest.size(), np);
  for (std::size_t v = 0; v < rest.size(); ++v) {
    Vec3 y = Vec3::Zero();
    for (const SkinInfluence& s : skin_[v]) {
      if (s.weight == 0.0) continue;
      const Vec3 yj = global[s.joint] * (rest[v] - joints_[s.joint].rest_position) +
                      origin[s.joint];
      y += s.weight * yj;
      if (with_jacobian) accumulate(out.vertex_jacobian, 3 * v, s.joint, s.weight, yj);
    }
    if (with_jacobian) finish_root(out.vertex_jacobian, 3 * v, y);
    posed[v] = y;
  }
  out.mesh = mesh_.with_vertices(std::move(posed));

  out.keypoints.resize(keypoints_.size());
  if (with_jacobian) {
    out.keypoint_jacobian = Eigen::MatrixXd::Zero(3 * keypoints_.size(), np);
  }
  for (std::size_t i = 0; i < keypoints_.size(); ++i) {
    const Keypoint& kp = keypoints_[i];
    const Vec3 y = global[kp.joint] * (kp.rest_position - joints_[kp.joint].rest_position) +
                   origin[kp.joint];
    out.keypoints[i] = y;
    if (with_jacobian) {
      accumulate(out.keypoint_jacobian, 3 * i, kp.joint, 1.0, y);
      finish_root(out.keypoint_jacobian, 3 * i, y);
    }
  }
  out.joint_positions = origin;
  return out;
}

Mesh pose_mesh(const ToyBody& body, const BodyPose& pose) {
  return body.pose(pose, false).mesh;
}

}  // namespace stabilis
