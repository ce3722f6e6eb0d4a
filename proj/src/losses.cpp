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

#include "stabilis/losses.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "stabilis/error.hpp"

namespace stabilis {
namespace {

double tanh_sq(double h, double amplitude, double scale) {
  const double t = std::tanh(h / scale);
  return amplitude * t * t;
}

double tanh_sq_slope(double h, double amplitude, double scale) {
  const double t = std::tanh(h / scale);
  return 2.0 * amplitude * t * (1.0 - t * t) / scale;
}

void check_regressor(const Mesh& mesh, const SurfaceRegressor& reg) {
  if (reg.num_vertices() != mesh.num_vertices()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "regressor built for " + std::to_string(reg.num_vertices()) +
                    " vertices, mesh has " + std::to_string(mesh.num_vertices()));
  }
  if (reg.num_samples() == 0) {
    throw Error(ErrorCode::kEmptyInput, "regressor has no samples");
  }
}

}  // namespace

LossConfig LossConfig::regression() {
  LossConfig cfg;
  cfg.pressure = {100.0, 10.0};
  cfg.stability_weight = 0.01;
  cfg.ground_weight = 0.01;
  return cfg;
}

LossConfig LossConfig::optimization() {
  LossConfig cfg;
  cfg.pressure = {70.0, 10.0};
  cfg.stability_weight = 10000.0;
  cfg.ground_weight = 10000.0;
  return cfg;
}

LossConfig LossConfig::profile(std::string_view name) {
  if (name == "regression") return regression();
  if (name == "optimization") return optimization();
  throw Error(ErrorCode::kInvalidArgument,
              "unknown loss profile '" + std::string(name) + "'");
}

void LossConfig::validate() const {
  if (!(pull_scale > 0.0) || !(push_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "length scales must be positive");
  }
  if (!(pull_amplitude >= 0.0) || !(push_amplitude >= 0.0) ||
      !(pressure.alpha >= 0.0) || !(pressure.gamma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "amplitudes and pressure rates must be non-negative");
  }
  if (!std::isfinite(stability_weight) || !std::isfinite(ground_weight)) {
    throw Error(ErrorCode::kInvalidArgument, "loss weights must be finite");
  }
}

double pull_loss(double h, const LossConfig& cfg) {
  return tanh_sq(h, cfg.pull_amplitude, cfg.pull_scale);
}
double pull_loss_slope(double h, const LossConfig& cfg) {
  return tanh_sq_slope(h, cfg.pull_amplitude, cfg.pull_scale);
}
double push_loss(double h, const LossConfig& cfg) {
  return tanh_sq(h, cfg.push_amplitude, cfg.push_scale);
}
double push_loss_slope(double h, const LossConfig& cfg) {
  return tanh_sq_slope(h, cfg.push_amplitude, cfg.push_scale);
}

LossValueWithGrad stability_loss(const Mesh& mesh, const PartSegmentation& seg,
                                 const SurfaceRegressor& reg,
                                 const GroundFrame& frame, const LossConfig& cfg) {
  check_regressor(mesh, reg);
  const Points3 samples = reg.apply(mesh.vertices());
  const PartVolumesWithGrad pv = part_volumes_with_gradient(mesh, seg);
  const auto& volume = pv.volumes.per_part;
  const auto& labels = reg.part_labels();
  const int n_parts = seg.n_parts();

  // CoM_part = sum_p V_p S_p / sum_p V_p n_p with S_p the sample sum of p.
  std::vector<Vec3> part_sum(n_parts, Vec3::Zero());
  std::vector<double> part_count(n_parts, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int p = labels[i];
    if (p < 0 || p >= n_parts) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample " + std::to_string(i) + " has no valid part label");
    }
    part_sum[p] += samples[i];
    part_count[p] += 1.0;
  }
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (int p = 0; p < n_parts; ++p) {
    if (!(volume[p] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "part " + std::to_string(p) + " has non-positive volume");
    }
    num += volume[p] * part_sum[p];
    den += volume[p] * part_count[p];
  }
  const Vec3 com = num / den;

  std::vector<double> rho(samples.size());
  std::vector<double> slope(samples.size());
  Vec3 rho_sum_pos = Vec3::Zero();
  double rho_sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double h = height(frame, samples[i]);
    rho[i] = pressure_value(h, cfg.pressure);
    slope[i] = pressure_slope(h, cfg.pressure);
    rho_sum_pos += rho[i] * samples[i];
    rho_sum += rho[i];
  }
  const Vec3 cop_point = rho_sum_pos / rho_sum;

  const Vec3 d = com - cop_point;
  const double du = frame.tangent_u().dot(d);
  const double dv = frame.tangent_v().dot(d);
  LossValueWithGrad out;
  out.value = std::hypot(du, dv);
  out.grad.assign(mesh.num_vertices(), Vec3::Zero());
  if (out.value == 0.0) return out;

  const Vec3 dir = (du * frame.tangent_u() + dv * frame.tangent_v()) / out.value;
  const Vec3& n = frame.up_normal();
  Points3 sample_grad(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double wv = volume[labels[i]] / den;
    sample_grad[i] = wv * dir - (rho[i] * dir + slope[i] * (samples[i] - cop_point).dot(dir) * n) /
                                    rho_sum;
  }
  out.grad = reg.transpose_apply(sample_grad);
  for (int p = 0; p < n_parts; ++p) {
    const double dl_dv = dir.dot(part_sum[p] - part_count[p] * com) / den;
    if (dl_dv == 0.0) continue;
    const Points3& gv = pv.gradients[p];
    for (std::size_t j = 0; j < gv.size(); ++j) out.grad[j] += dl_dv * gv[j];
  }
  return out;
}

GroundLossTerms ground_loss_terms(const Mesh& mesh, const SurfaceRegressor& reg,
                                  const GroundFrame& frame, const LossConfig& cfg) {
  check_regressor(mesh, reg);
  const Points3 samples = reg.apply(mesh.vertices());
  std::vector<double> h(samples.size());
  GroundLossTerms out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    h[i] = height(frame, samples[i]);
    if (h[i] >= 0.0) {
      out.pull += pull_loss(h[i], cfg);
      ++out.num_pull;
    } else {
      out.push += push_loss(h[i], cfg);
      ++out.num_push;
    }
  }
  const double pull_norm = out.num_pull ? 1.0 / static_cast<double>(out.num_pull) : 0.0;
  const double push_norm = out.num_push ? 1.0 / static_cast<double>(out.num_push) : 0.0;
  out.pull *= pull_norm;
  out.push *= push_norm;
  out.total.value = out.pull + out.push;

  Points3 sample_grad(samples.size());
  const Vec3& n = frame.up_normal();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double dh = h[i] >= 0.0 ? pull_norm * pull_loss_slope(h[i], cfg)
                                  : push_norm * push_loss_slope(h[i], cfg);
    sample_grad[i] = dh * n;
  }
  out.total.grad = reg.transpose_apply(sample_grad);
  return out;
}

LossValueWithGrad ground_loss(const Mesh& mesh, const SurfaceRegressor& reg,
                              const GroundFrame& frame, const LossConfig& cfg) {
  return ground_loss_terms(mesh, reg, frame, cfg).total;
}

LossValueWithGrad combine_terms(std::span<const WeightedTerm> terms,
                                std::size_t num_vertices) {
  LossValueWithGrad out;
  out.grad.assign(num_vertices, Vec3::Zero());
  for (const auto& t : terms) {
    if (t.term.grad.size() != num_vertices) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "term gradient has " + std::to_string(t.term.grad.size()) +
                      " rows, expected " + std::to_string(num_vertices));
    }
    out.value += t.weight * t.term.value;
    for (std::size_t j = 0; j < num_vertices; ++j) {
      out.grad[j] += t.weight * t.term.grad[j];
    }
  }
  return out;
}

LossValueWithGrad combined_energy(const Mesh& mesh, const PartSegmentation& seg,
                                  const SurfaceRegressor& reg,
                                  const GroundFrame& frame, const LossConfig& cfg,
                                  std::span<const WeightedTerm> extra_terms) {
  std::vector<WeightedTerm> terms;
  if (cfg.stability_weight != 0.0) {
    terms.push_back({cfg.stability_weight, stability_loss(mesh, seg, reg, frame, cfg)});
  }
  if (cfg.ground_weight != 0.0) {
    terms.push_back({cfg.ground_weight, ground_loss(mesh, reg, frame, cfg)});
  }
  terms.insert(terms.end(), extra_terms.begin(), extra_terms.end());
  return combine_terms(terms, mesh.num_vertices());
}

}  // namespace stabilis
