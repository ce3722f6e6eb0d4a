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

#include "stabilis/analysis.hpp"

#include <cmath>

#include "stabilis/error.hpp"
#include "stabilis/metrics.hpp"

namespace stabilis {

double mean_abs_height(const GroundFrame& frame, const Points3& samples,
                       const std::vector<int>& subset) {
  if (subset.empty()) throw Error(ErrorCode::kEmptyInput, "empty sample subset");
  double sum = 0.0;
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= samples.size()) {
      throw Error(ErrorCode::kInvalidArgument, "sample subset index out of range");
    }
    sum += std::abs(height(frame, samples[i]));
  }
  return sum / static_cast<double>(subset.size());
}

StabilityReport analyze(const Mesh& mesh, const PartSegmentation& seg,
                        const SurfaceRegressor& reg, const GroundFrame& frame,
                        const LossConfig& cfg, double tau,
                        const std::vector<int>* height_subset) {
  cfg.validate();
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  StabilityReport rep;
  rep.tau = tau;
  const Points3 samples = reg.apply(mesh.vertices());
  rep.num_samples = samples.size();
  rep.volumes = part_volumes(mesh, seg);
  rep.com_part = com_part(samples, rep.volumes, reg.part_labels());
  rep.com_naive = com_naive(mesh.vertices());
  rep.com_naive_uniform = com_naive_uniform(samples);
  rep.com_trig = com_trig(mesh);
  const PressureField field = pressure(frame, samples, cfg.pressure);
  rep.cop = cop(field, samples);
  rep.com_plane = frame.to_plane(rep.com_part);
  rep.cop_plane = frame.to_plane(rep.cop);

  rep.bos = base_of_support(frame, samples, tau);
  rep.is_stable = is_stable(rep.com_part, rep.bos, frame);
  rep.bose = rep.bos.contacts.empty() ? 0 : (bose_lp(rep.com_plane, rep.bos.contacts) ? 1 : 0);

  rep.stability_loss = stability_loss(mesh, seg, reg, frame, cfg).value;
  rep.ground = ground_loss_terms(mesh, reg, frame, cfg);
  rep.ground.total.grad.clear();

  if (!rep.bos.contacts.empty()) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const Vec3& s : samples) {
      const double h = height(frame, s);
      if (std::abs(h) < tau) {
        sum += std::abs(h);
        ++count;
      }
    }
    rep.contact_mean_abs_height = sum / static_cast<double>(count);
  }
  if (height_subset != nullptr) {
    rep.subset_mean_abs_height = mean_abs_height(frame, samples, *height_subset);
  }
  return rep;
}

}  // namespace stabilis
