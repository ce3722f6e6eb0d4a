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
#include "stabilis/losses.hpp"
#include "stabilis/sampling.hpp"
#include "stabilis/stability.hpp"
#include "stabilis/volumetrics.hpp"

namespace stabilis {

/// Everything the stability analysis knows about one posed mesh.
struct StabilityReport {
  double tau = 0.10;
  std::size_t num_samples = 0;
  PartVolumes volumes;

  Vec3 com_part = Vec3::Zero();
  Vec3 com_naive = Vec3::Zero();
  Vec3 com_naive_uniform = Vec3::Zero();
  Vec3 com_trig = Vec3::Zero();
  Vec3 cop = Vec3::Zero();
  /// Gravity projections in the ground tangent basis.
  Vec2 com_plane = Vec2::Zero();
  Vec2 cop_plane = Vec2::Zero();

  BaseOfSupport bos;
  bool is_stable = false;
  int bose = 0;

  double stability_loss = 0.0;
  GroundLossTerms ground;
  /// Mean |h| over the base-of-support contacts (0 without contacts).
  double contact_mean_abs_height = 0.0;
  /// Mean |h| over a caller-chosen sample subset (e.g. foot soles).
  std::optional<double> subset_mean_abs_height;
};

StabilityReport analyze(const Mesh& mesh, const PartSegmentation& seg,
                        const SurfaceRegressor& reg, const GroundFrame& frame,
                        const LossConfig& cfg, double tau = 0.10,
                        const std::vector<int>* height_subset = nullptr);

/// Mean |h| of the listed samples.
double mean_abs_height(const GroundFrame& frame, const Points3& samples,
                       const std::vector<int>& subset);

}  // namespace stabilis
