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

#include "stabilis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "stabilis/error.hpp"
#include "stabilis/stability.hpp"

namespace stabilis {

namespace {

// Minimizer of || sum mu_i p_i || over the affine hull of the active points
// (sum mu = 1), via the bordered normal equations.
Eigen::VectorXd affine_minimizer(const Points2& p, const std::vector<std::size_t>& active) {
  const Eigen::Index m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = p[active[i]].dot(p[active[j]]);
    a(i, m) = 1.0;
    a(m, i) = 1.0;
  }
  b(m) = 1.0;
  return a.completeOrthogonalDecomposition().solve(b).head(m);
}

}  // namespace

BoseLpResult solve_bose_lp(const Vec2& target, const Points2& contacts,
                           const BoseLpOptions& options) {
  if (contacts.empty()) throw Error(ErrorCode::kEmptyContacts, "no contact points");
  const std::size_t n = contacts.size();
  const double tol = options.tolerance;

  // Work relative to the target: the objective is the norm of x.
  Points2 p(n);
  double scale2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = contacts[i] - target;
    scale2 = std::max(scale2, p[i].squaredNorm());
  }
  const double eps = 1e-14 * std::max(scale2, 1e-300);

  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (p[i].squaredNorm() < p[start].squaredNorm()) start = i;
  }
  std::vector<std::size_t> active{start};
  std::vector<double> lambda{1.0};
  Vec2 x = p[start];

  BoseLpResult out;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double xn = x.norm();
    if (xn < tol) break;

    // Linear minimization oracle over the simplex: best single contact.
    std::size_t s = 0;
    double s_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = x.dot(p[i]);
      if (g < s_val) {
        s_val = g;
        s = i;
      }
    }
    // x.y >= s_val for every hull point y, so s_val / |x| bounds the distance.
    if (s_val / xn > tol) break;
    if (x.squaredNorm() - s_val <= eps) break;
    if (std::find(active.begin(), active.end(), s) != active.end()) break;
    active.push_back(s);
    lambda.push_back(0.0);

    // Fully-corrective step: move to the affine minimizer of the active set,
    // dropping points whenever the move would leave the simplex.
    for (std::size_t guard = 0; guard <= n + 3; ++guard) {
      const Eigen::VectorXd mu = affine_minimizer(p, active);
      bool interior = true;
      for (Eigen::Index i = 0; i < mu.size(); ++i) interior = interior && mu(i) > 1e-15;
      if (interior) {
        for (std::size_t i = 0; i < active.size(); ++i) lambda[i] = mu(i);
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (mu(i) <= 1e-15 && lambda[i] - mu(i) > 0.0) {
          theta = std::min(theta, lambda[i] / (lambda[i] - mu(i)));
        }
      }
      for (std::size_t i = 0; i < active.size(); ++i) {
        lambda[i] = theta * mu(i) + (1.0 - theta) * lambda[i];
      }
      // Drop the point(s) that hit zero; keep at least one.
      std::size_t worst = 0;
      for (std::size_t i = 1; i < active.size(); ++i) {
        if (lambda[i] < lambda[worst]) worst = i;
      }
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_w;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (i != worst && lambda[i] > 1e-15) {
          keep_idx.push_back(active[i]);
          keep_w.push_back(lambda[i]);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(active[worst]);
        keep_w.push_back(1.0);
      }
      active = std::move(keep_idx);
      lambda = std::move(keep_w);
    }
    double total = 0.0;
    for (double w : lambda) total += w;
    x = Vec2::Zero();
    for (std::size_t i = 0; i < active.size(); ++i) {
      lambda[i] /= total;
      x += lambda[i] * p[active[i]];
    }
  }
  out.iterations = it;
  out.weights.assign(n, 0.0);
  for (std::size_t i = 0; i < active.size(); ++i) out.weights[active[i]] = lambda[i];
  out.distance = x.norm();
  out.inside = out.distance < tol;
  return out;
}

bool bose_lp(const Vec2& target, const Points2& contacts,
             const BoseLpOptions& options) {
  return solve_bose_lp(target, contacts, options).inside;
}

int bose_metric(const Mesh& mesh, const PartSegmentation& seg,
                const SurfaceRegressor& reg, const GroundFrame& frame,
                double tau) {
  if (!(tau > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  }
  const Points3 samples = reg.apply(mesh.vertices());
  const PartVolumes volumes = part_volumes(mesh, seg);
  const Vec3 com = com_part(samples, volumes, reg.part_labels());
  const BaseOfSupport bos = base_of_support(frame, samples, tau);
  if (bos.contacts.empty()) return 0;
  return bose_lp(frame.to_plane(com), bos.contacts) ? 1 : 0;
}

namespace {

long long lattice_offset(double a, double b, double cell) {
  const double k = (a - b) / cell;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-6) {
    throw Error(ErrorCode::kGridMismatch, "grid origins are not on a common lattice");
  }
  return static_cast<long long>(r);
}

void check_grid(const PressureGrid& g, const char* name) {
  if (g.nx < 0 || g.ny < 0 ||
      g.values.size() != static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny)) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " grid has inconsistent dimensions");
  }
}

}  // namespace

double pressure_iou(const PressureGrid& pred, const PressureGrid& ref,
                    double threshold) {
  check_grid(pred, "pred");
  check_grid(ref, "ref");
  if (!(pred.cell > 0.0) ||
      std::abs(pred.cell - ref.cell) > 1e-12 * std::max(pred.cell, ref.cell)) {
    throw Error(ErrorCode::kGridMismatch, "grid cell sizes differ");
  }
  // Shift of ref cells relative to pred cells.
  const long long ox = lattice_offset(ref.origin.x(), pred.origin.x(), pred.cell);
  const long long oy = lattice_offset(ref.origin.y(), pred.origin.y(), pred.cell);

  auto active = [threshold](double v) { return v > 0.0 && v >= threshold; };
  auto ref_active = [&](long long px, long long py) {
    const long long rx = px - ox;
    const long long ry = py - oy;
    if (rx < 0 || ry < 0 || rx >= ref.nx || ry >= ref.ny) return false;
    return active(ref.at(static_cast<int>(rx), static_cast<int>(ry)));
  };

  std::size_t inter = 0;
  std::size_t uni = 0;
  for (int iy = 0; iy < pred.ny; ++iy) {
    for (int ix = 0; ix < pred.nx; ++ix) {
      const bool a = active(pred.at(ix, iy));
      const bool b = ref_active(ix, iy);
      inter += (a && b) ? 1 : 0;
      uni += (a || b) ? 1 : 0;
    }
  }
  // Reference cells outside pred's extent.
  for (int ry = 0; ry < ref.ny; ++ry) {
    for (int rx = 0; rx < ref.nx; ++rx) {
      const long long px = rx + ox;
      const long long py = ry + oy;
      const bool inside_pred = px >= 0 && py >= 0 && px < pred.nx && py < pred.ny;
      if (!inside_pred && active(ref.at(rx, ry))) ++uni;
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double pressure_iou_sweep(const PressureGrid& pred, const PressureGrid& ref,
                          int num_thresholds) {
  if (num_thresholds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_thresholds must be >= 1");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : ref.values) {
    if (v > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == 0.0) return pressure_iou(pred, ref, 0.0);
  double best = 0.0;
  for (int k = 0; k < num_thresholds; ++k) {
    const double t = num_thresholds == 1
                         ? lo
                         : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k /
                                                       (num_thresholds - 1));
    best = std::max(best, pressure_iou(pred, ref, t));
  }
  return best;
}

namespace {

void check_pair(const Points3& a, const Points3& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " count mismatch: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw Error(ErrorCode::kEmptyInput, std::string("no ") + what);
}

double mean_distance_mm(const Points3& a, const Points3& b, const Vec3& shift) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] + shift - b[i]).norm();
  return 1000.0 * sum / static_cast<double>(a.size());
}

}  // namespace

double mpjpe(const Points3& pred, const Points3& ref, int root) {
  check_pair(pred, ref, "joint");
  if (root < 0 || static_cast<std::size_t>(root) >= pred.size()) {
    throw Error(ErrorCode::kInvalidArgument, "root joint out of range");
  }
  return mean_distance_mm(pred, ref, ref[root] - pred[root]);
}

Similarity procrustes(const Points3& pred, const Points3& ref) {
  check_pair(pred, ref, "point");
  const double n = static_cast<double>(pred.size());
  Vec3 mp = Vec3::Zero();
  Vec3 mr = Vec3::Zero();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mp += pred[i];
    mr += ref[i];
  }
  mp /= n;
  mr /= n;
  Mat3 cov = Mat3::Zero();
  double var_p = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Vec3 p = pred[i] - mp;
    cov += (ref[i] - mr) * p.transpose();
    var_p += p.squaredNorm();
  }
  cov /= n;
  var_p /= n;
  Similarity sim;
  if (var_p == 0.0) {
    sim.scale = 0.0;
    sim.translation = mr;
    return sim;
  }
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  sim.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  sim.scale = (svd.singularValues().asDiagonal() * d).trace() / var_p;
  sim.translation = mr - sim.scale * sim.rotation * mp;
  return sim;
}

double pa_mpjpe(const Points3& pred, const Points3& ref) {
  const Similarity sim = procrustes(pred, ref);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += (sim.scale * sim.rotation * pred[i] + sim.translation - ref[i]).norm();
  }
  return 1000.0 * sum / static_cast<double>(pred.size());
}

JointErrors joint_errors(const Points3& pred_joints, const Points3& ref_joints,
                         const Points3& pred_vertices, const Points3& ref_vertices,
                         int root) {
  check_pair(pred_vertices, ref_vertices, "vertex");
  JointErrors e;
  e.mpjpe = mpjpe(pred_joints, ref_joints, root);
  e.pa_mpjpe = pa_mpjpe(pred_joints, ref_joints);
  e.pve = mean_distance_mm(pred_vertices, ref_vertices,
                           ref_joints[root] - pred_joints[root]);
  return e;
}

}  // namespace stabilis
