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

#include <optional>
#include <vector>

#include "stabilis/geometry.hpp"
#include "stabilis/heatmap.hpp"
#include "stabilis/sampling.hpp"
#include "stabilis/volumetrics.hpp"

namespace stabilis {

struct BoseLpOptions {
  double tolerance = 1e-6;  // m
  int max_iterations = 1000;
};

struct BoseLpResult {
  bool inside = false;
  /// Distance between the target and the best convex combination found.
  double distance = 0.0;
  /// Simplex weights over the contacts.
  std::vector<double> weights;
  int iterations = 0;
};

/// min_a || C a - target ||  s.t.  a >= 0, sum a = 1, by fully-corrective
/// Frank-Wolfe (Wolfe's min-norm-point corrections on the active set). Stops
/// early once a separating direction proves the distance exceeds the
/// tolerance. Throws kEmptyContacts.
BoseLpResult solve_bose_lp(const Vec2& target, const Points2& contacts,
                           const BoseLpOptions& options = {});
bool bose_lp(const Vec2& target, const Points2& contacts,
             const BoseLpOptions& options = {});

/// 1 when the part-weighted CoM projects into the base of support, else 0
/// (including when there are no contacts).
int bose_metric(const Mesh& mesh, const PartSegmentation& seg,
                const SurfaceRegressor& reg, const GroundFrame& frame,
                double tau = 0.10);

/// IoU of cells with value >= threshold (and > 0) over the union of both
/// grids. Grids must share the cell size and have origins on a common
/// lattice; otherwise kGridMismatch. Two empty maps give 1.
double pressure_iou(const PressureGrid& pred, const PressureGrid& ref,
                    double threshold);

/// Best IoU over `num_thresholds` log-spaced thresholds spanning the nonzero
/// range of `ref`.
double pressure_iou_sweep(const PressureGrid& pred, const PressureGrid& ref,
                          int num_thresholds = 32);

struct JointErrors {
  double mpjpe = 0.0;     // mm
  double pa_mpjpe = 0.0;  // mm
  double pve = 0.0;       // mm
};

/// Mean distance in mm after translating `pred` so point `root` coincides.
double mpjpe(const Points3& pred, const Points3& ref, int root = 0);
/// Mean distance in mm after the optimal similarity transform (Umeyama).
double pa_mpjpe(const Points3& pred, const Points3& ref);
/// Similarity transform (s, R, t) minimizing sum || s R p + t - q ||^2.
struct Similarity {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};
Similarity procrustes(const Points3& pred, const Points3& ref);

/// Joints are root-aligned at `root` (the pelvis for the toy skeleton); the
/// vertex error uses the same root offset. Throws kDimensionMismatch.
JointErrors joint_errors(const Points3& pred_joints, const Points3& ref_joints,
                         const Points3& pred_vertices, const Points3& ref_vertices,
                         int root = 0);

/// One evaluated frame. Optional fields are absent when the inputs needed to
/// compute them are missing.
struct EvalRecord {
  std::string name;
  int bose_pred = 0;
  int bose_ref = 0;
  double com_error_mm = 0.0;
  double cop_error_mm = 0.0;
  double pressure_iou = 0.0;
  std::optional<double> mpjpe_mm;
  std::optional<double> pa_mpjpe_mm;
  std::optional<double> pve_mm;
};

}  // namespace stabilis
