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

#include "stabilis/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace stabilis {

double geman_mcclure(double e, double sigma) {
  const double s2 = sigma * sigma;
  return s2 * e / (s2 + e);
}

double geman_mcclure_slope(double e, double sigma) {
  const double s2 = sigma * sigma;
  const double d = s2 + e;
  return s2 * s2 / (d * d);
}

ParamLoss keypoint_energy(const PosedBody& posed, const Camera& camera,
                          const KeypointTargets& targets, double sigma,
                          bool with_grad) {
  const std::size_t k = posed.keypoints.size();
  if (targets.points.size() != k || targets.confidence.size() != k) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(k) + " keypoint targets, got " +
                    std::to_string(targets.points.size()) + " points / " +
                    std::to_string(targets.confidence.size()) + " confidences");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "robust scale must be positive");
  ParamLoss out;
  const Eigen::Index np = posed.keypoint_jacobian.cols();
  if (with_grad) {
    if (posed.keypoint_jacobian.rows() != static_cast<Eigen::Index>(3 * k)) {
      throw Error(ErrorCode::kInvalidArgument, "posed body carries no keypoint Jacobian");
    }
    out.grad = Eigen::VectorXd::Zero(np);
  }
  Eigen::Matrix<double, 2, 3> jp;
  for (std::size_t i = 0; i < k; ++i) {
    const double c = targets.confidence[i];
    if (c == 0.0) continue;
    const Vec2 px = project_point(camera, posed.keypoints[i], jp);
    const Vec2 r = px - targets.points[i];
    const double e = r.squaredNorm();
    out.value += c * geman_mcclure(e, sigma);
    if (with_grad) {
      const Eigen::RowVector3d dpoint =
          c * geman_mcclure_slope(e, sigma) * 2.0 * r.transpose() * jp;
      out.grad.noalias() +=
          (dpoint * posed.keypoint_jacobian.middleRows(3 * i, 3)).transpose();
    }
  }
  return out;
}

ParamLoss keypoint_energy(const ToyBody& body, const BodyPose& pose,
                          const Camera& camera, const KeypointTargets& targets,
                          double sigma) {
  return keypoint_energy(body.pose(pose, true), camera, targets, sigma, true);
}

void FitProblem::validate(const ToyBody& body) const {
  camera.validate();
  loss.validate();
  const std::size_t k = body.keypoints().size();
  if (targets.points.size() != k || targets.confidence.size() != k) {
    throw Error(ErrorCode::kDimensionMismatch,
                "fit problem needs " + std::to_string(k) + " keypoints and confidences");
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double c = targets.confidence[i];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "confidence " + std::to_string(i) + " outside [0, 1]");
    }
    if (!targets.points[i].allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite keypoint target");
    }
  }
  if (init.joint_rotations.size() + 1 != body.num_joints()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial pose has wrong joint count");
  }
  const OptimizerSettings& o = optimizer;
  if (!(o.initial_step > 0.0) || o.max_iterations < 0 || !(o.tolerance >= 0.0) ||
      o.warmup_iterations < 0 || !(o.armijo > 0.0 && o.armijo < 1.0) ||
      !(o.backtrack > 0.0 && o.backtrack < 1.0) || o.max_backtracks < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid optimizer settings");
  }
  if (!(robust_scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "robust scale must be positive");
  if (num_samples == 0) throw Error(ErrorCode::kInvalidArgument, "num_samples must be positive");
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
}

FitObjective::FitObjective(const ToyBody& body, const FitProblem& problem,
                           const SurfaceRegressor& reg)
    : body_(body), problem_(problem), reg_(reg) {}

bool FitObjective::has_ip_terms() const noexcept {
  return problem_.loss.stability_weight != 0.0 || problem_.loss.ground_weight != 0.0;
}

FitEnergy FitObjective::evaluate(const Eigen::VectorXd& params, bool include_ip,
                                 bool with_grad) const {
  const PosedBody posed = body_.pose(BodyPose::from_vector(params), with_grad);
  const ParamLoss kp = keypoint_energy(posed, problem_.camera, problem_.targets,
                                       problem_.robust_scale, with_grad);
  FitEnergy e;
  e.keypoint = kp.value;
  e.total = kp.value;
  if (with_grad) e.grad = kp.grad;
  if (!include_ip || !has_ip_terms()) return e;

  const LossConfig& cfg = problem_.loss;
  Points3 vgrad(posed.mesh.num_vertices(), Vec3::Zero());
  if (cfg.stability_weight != 0.0) {
    const LossValueWithGrad s =
        stability_loss(posed.mesh, body_.segmentation(), reg_, problem_.ground, cfg);
    e.stability = s.value;
    e.total += cfg.stability_weight * s.value;
    for (std::size_t v = 0; v < vgrad.size(); ++v) vgrad[v] += cfg.stability_weight * s.grad[v];
  }
  if (cfg.ground_weight != 0.0) {
    const LossValueWithGrad g = ground_loss(posed.mesh, reg_, problem_.ground, cfg);
    e.ground = g.value;
    e.total += cfg.ground_weight * g.value;
    for (std::size_t v = 0; v < vgrad.size(); ++v) vgrad[v] += cfg.ground_weight * g.grad[v];
  }
  if (with_grad) {
    const Eigen::Map<const Eigen::VectorXd> flat(vgrad.front().data(),
                                                 static_cast<Eigen::Index>(3 * vgrad.size()));
    e.grad.noalias() += posed.vertex_jacobian.transpose() * flat;
  }
  return e;
}

FitDiverged::FitDiverged(const std::string& what, std::vector<TraceEntry> trace)
    : Error(ErrorCode::kDivergedNaN, what), trace_(std::move(trace)) {}

std::vector<int> sole_samples(const ToyBody& body, const SurfaceRegressor& reg) {
  const Points3 pts = reg.apply(body.template_mesh().vertices());
  std::vector<int> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(pts[i].z()) <= 1e-9) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

bool finite(const FitEnergy& e) {
  return std::isfinite(e.total) && (e.grad.size() == 0 || e.grad.allFinite());
}

struct StageOutcome {
  Eigen::VectorXd x;
  double step;
  std::string stop_reason;
};

// A trial point is rejected when its energy is non-finite or it falls behind
// the camera.
bool try_value(const FitObjective& obj, const Eigen::VectorXd& x, bool ip, double& value) {
  try {
    const FitEnergy e = obj.evaluate(x, ip, false);
    value = e.total;
    return std::isfinite(value);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kNonPositiveDepth) return false;
    throw;
  }
}

StageOutcome run_stage(const FitObjective& obj, Eigen::VectorXd x, int stage,
                       bool ip, int budget, double step,
                       const OptimizerSettings& opt, std::vector<TraceEntry>& trace,
                       int& iteration) {
  FitEnergy cur = obj.evaluate(x, ip, true);
  auto record = [&](const FitEnergy& e, double t) {
    trace.push_back({iteration, stage, e.total, e.keypoint, e.stability, e.ground, t});
  };
  record(cur, 0.0);
  if (!finite(cur)) {
    throw FitDiverged("non-finite energy or gradient at stage start", trace);
  }
  if (step <= 0.0) {
    const double gn = cur.grad.norm();
    step = gn > 0.0 ? opt.initial_step / gn : opt.initial_step;
  }
  for (int k = 0; k < budget; ++k) {
    const double g2 = cur.grad.squaredNorm();
    if (g2 == 0.0) return {x, step, "zero gradient"};
    double t = step;
    bool accepted = false;
    Eigen::VectorXd trial;
    for (int b = 0; b < opt.max_backtracks; ++b, t *= opt.backtrack) {
      trial = x - t * cur.grad;
      double value = 0.0;
      if (try_value(obj, trial, ip, value) && value <= cur.total - opt.armijo * t * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return {x, step, "line search failed"};

    ++iteration;
    FitEnergy next = obj.evaluate(trial, ip, true);
    record(next, t);
    if (!finite(next)) throw FitDiverged("non-finite energy or gradient", trace);

    const Eigen::VectorXd s = trial - x;
    const Eigen::VectorXd y = next.grad - cur.grad;
    const double sy = s.dot(y);
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * t;
    step = std::clamp(step, 1e-20, 1e20);

    const double decrease = cur.total - next.total;
    const double denom = std::abs(cur.total);
    x = std::move(trial);
    cur = std::move(next);
    if (denom == 0.0 || decrease / denom < opt.tolerance) {
      return {x, step, "converged"};
    }
  }
  return {x, step, "max iterations"};
}

}  // namespace

FitResult fit(const ToyBody& body, const FitProblem& problem,
              const SurfaceRegressor& reg) {
  problem.validate(body);
  if (reg.num_vertices() != body.template_mesh().num_vertices()) {
    throw Error(ErrorCode::kDimensionMismatch, "regressor does not match the toy body");
  }
  const FitObjective obj(body, problem, reg);
  const OptimizerSettings& opt = problem.optimizer;
  const std::vector<int> soles = sole_samples(body, reg);

  FitResult result;
  result.initial = problem.init;
  result.before = analyze(pose_mesh(body, problem.init), body.segmentation(), reg,
                          problem.ground, problem.loss, problem.tau, &soles);

  Eigen::VectorXd x = problem.init.to_vector();
  int iteration = 0;
  double step = 0.0;
  std::string reason;
  if (obj.has_ip_terms() && opt.warmup_iterations > 0) {
    const int warm = std::min(opt.warmup_iterations, opt.max_iterations);
    StageOutcome s0 = run_stage(obj, x, 0, false, warm, step, opt, result.trace, iteration);
    x = std::move(s0.x);
    step = s0.step;
    StageOutcome s1 = run_stage(obj, x, 1, true, opt.max_iterations - iteration, step,
                                opt, result.trace, iteration);
    x = std::move(s1.x);
    reason = s1.stop_reason;
  } else {
    const bool ip = obj.has_ip_terms();
    StageOutcome s = run_stage(obj, x, ip ? 1 : 0, ip, opt.max_iterations, step, opt,
                               result.trace, iteration);
    x = std::move(s.x);
    reason = s.stop_reason;
  }

  result.final_pose = BodyPose::from_vector(x);
  const PosedBody posed = body.pose(result.final_pose, false);
  result.final_mesh = posed.mesh;
  result.final_keypoints = posed.keypoints;
  result.after = analyze(result.final_mesh, body.segmentation(), reg, problem.ground,
                         problem.loss, problem.tau, &soles);
  result.iterations = iteration;
  result.stop_reason = reason;
  return result;
}

FitResult fit(const FitProblem& problem) {
  const ToyBody body = ToyBody::build(problem.body);
  const SurfaceRegressor reg = body.sample(problem.num_samples, problem.seed);
  return fit(body, problem, reg);
}

}  // namespace stabilis
