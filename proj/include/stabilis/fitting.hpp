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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stabilis/analysis.hpp"
#include "stabilis/error.hpp"
#include "stabilis/geometry.hpp"
#include "stabilis/losses.hpp"
#include "stabilis/sampling.hpp"
#include "stabilis/toy_body.hpp"

namespace stabilis {

struct KeypointTargets {
  Points2 points;                  // pixels
  std::vector<double> confidence;  // in [0, 1]
};

/// Scalar with its gradient with respect to the body parameter vector.
struct ParamLoss {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// sigma^2 e / (sigma^2 + e) for a squared residual e.
double geman_mcclure(double squared_residual, double sigma);
double geman_mcclure_slope(double squared_residual, double sigma);

/// sum_k c_k GM(|| pi(X_k) - x_k ||^2) over the body keypoints. `posed` must
/// carry a keypoint Jacobian when gradients are wanted. Throws
/// kNonPositiveDepth, kDimensionMismatch.
ParamLoss keypoint_energy(const PosedBody& posed, const Camera& camera,
                          const KeypointTargets& targets, double sigma = 100.0,
                          bool with_grad = true);
ParamLoss keypoint_energy(const ToyBody& body, const BodyPose& pose,
                          const Camera& camera, const KeypointTargets& targets,
                          double sigma = 100.0);

struct OptimizerSettings {
  /// Length of the first trial step in parameter space.
  double initial_step = 1e-2;
  int max_iterations = 500;
  /// Stage ends once (E_prev - E) / |E_prev| drops below this.
  double tolerance = 1e-8;
  /// Keypoint-only iterations before the IP terms are switched on.
  int warmup_iterations = 100;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct FitProblem {
  ToyBodyOptions body;
  KeypointTargets targets;
  Camera camera;
  GroundFrame ground;
  LossConfig loss = LossConfig::optimization();
  BodyPose init;
  OptimizerSettings optimizer;
  double robust_scale = 100.0;  // px
  std::size_t num_samples = 2000;
  std::uint64_t seed = 0;
  double tau = 0.10;

  /// Throws kInvalidArgument / kDimensionMismatch.
  void validate(const ToyBody& body) const;
};

struct FitEnergy {
  double total = 0.0;
  double keypoint = 0.0;
  double stability = 0.0;  // unweighted
  double ground = 0.0;     // unweighted
  Eigen::VectorXd grad;    // empty unless requested
};

/// E = E_J2D + lambda_s L_stability + lambda_g L_ground as a function of the
/// body parameter vector.
class FitObjective {
 public:
  FitObjective(const ToyBody& body, const FitProblem& problem,
               const SurfaceRegressor& reg);

  FitEnergy evaluate(const Eigen::VectorXd& params, bool include_ip,
                     bool with_grad) const;
  bool has_ip_terms() const noexcept;

 private:
  const ToyBody& body_;
  const FitProblem& problem_;
  const SurfaceRegressor& reg_;
};

struct TraceEntry {
  int iteration = 0;
  int stage = 0;  // 0 = keypoint warm-up, 1 = full energy
  double energy = 0.0;
  double keypoint = 0.0;
  double stability = 0.0;
  double ground = 0.0;
  double step = 0.0;
};

struct FitResult {
  BodyPose initial;
  BodyPose final_pose;
  Mesh final_mesh;
  Points3 final_keypoints;
  std::vector<TraceEntry> trace;
  StabilityReport before;
  StabilityReport after;
  int iterations = 0;
  std::string stop_reason;
};

/// Raised when an iterate has a non-finite energy or gradient.
class FitDiverged : public Error {
 public:
  FitDiverged(const std::string& what, std::vector<TraceEntry> trace);
  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

/// Indices of samples lying on the template's foot soles (z = 0).
std::vector<int> sole_samples(const ToyBody& body, const SurfaceRegressor& reg);

/// Gradient descent with Armijo backtracking. The trial step is the
/// Barzilai-Borwein step from the previous iteration. With any IP weight
/// non-zero the run is staged: a keypoint-only warm-up, then the full energy.
FitResult fit(const FitProblem& problem);
FitResult fit(const ToyBody& body, const FitProblem& problem,
              const SurfaceRegressor& reg);

}  // namespace stabilis
