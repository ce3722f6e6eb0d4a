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

#include <span>
#include <string_view>

#include "stabilis/geometry.hpp"
#include "stabilis/sampling.hpp"
#include "stabilis/stability.hpp"
#include "stabilis/volumetrics.hpp"

namespace stabilis {

struct LossConfig {
  PressureParams pressure;
  double pull_amplitude = 1.0;   // alpha_1
  double pull_scale = 0.15;      // alpha_2, m
  double push_amplitude = 10.0;  // beta_1
  double push_scale = 0.15;      // beta_2, m
  double stability_weight = 0.01;  // lambda_s
  double ground_weight = 0.01;     // lambda_g

  /// Network-regression preset: alpha=100, gamma=10, lambda_s=lambda_g=0.01.
  static LossConfig regression();
  /// Optimization preset: alpha=70, gamma=10, lambda_s=lambda_g=1e4.
  static LossConfig optimization();
  /// "regression" or "optimization"; throws kInvalidArgument otherwise.
  static LossConfig profile(std::string_view name);

  void validate() const;
};

/// Scalar loss with its gradient per mesh vertex.
struct LossValueWithGrad {
  double value = 0.0;
  Points3 grad;
};

double pull_loss(double h, const LossConfig& cfg);
double pull_loss_slope(double h, const LossConfig& cfg);
double push_loss(double h, const LossConfig& cfg);
double push_loss_slope(double h, const LossConfig& cfg);

/// || g(CoM_part) - g(CoP) || measured in the ground tangent basis.
/// Differentiates through the regressor, the part volumes and the pressure
/// weights. The gradient is zero where the two projections coincide.
LossValueWithGrad stability_loss(const Mesh& mesh, const PartSegmentation& seg,
                                 const SurfaceRegressor& reg,
                                 const GroundFrame& frame, const LossConfig& cfg);

struct GroundLossTerms {
  LossValueWithGrad total;
  double pull = 0.0;
  double push = 0.0;
  std::size_t num_pull = 0;
  std::size_t num_push = 0;
};

/// Mean pull loss over samples with h >= 0 plus mean push loss over samples
/// with h < 0; an empty branch contributes zero.
GroundLossTerms ground_loss_terms(const Mesh& mesh, const SurfaceRegressor& reg,
                                  const GroundFrame& frame, const LossConfig& cfg);
LossValueWithGrad ground_loss(const Mesh& mesh, const SurfaceRegressor& reg,
                              const GroundFrame& frame, const LossConfig& cfg);

struct WeightedTerm {
  double weight = 1.0;
  LossValueWithGrad term;
};

/// Sum of weighted terms. Throws kDimensionMismatch on gradient sizes other
/// than `num_vertices`.
LossValueWithGrad combine_terms(std::span<const WeightedTerm> terms,
                                std::size_t num_vertices);

/// lambda_s * stability + lambda_g * ground + sum of extra terms. Terms with
/// zero weight are not evaluated.
LossValueWithGrad combined_energy(const Mesh& mesh, const PartSegmentation& seg,
                                  const SurfaceRegressor& reg,
                                  const GroundFrame& frame, const LossConfig& cfg,
                                  std::span<const WeightedTerm> extra_terms = {});

}  // namespace stabilis
