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

#include <array>

#include "stabilis/geometry.hpp"

namespace stabilis {

Mat3 skew(const Vec3& w);
/// Rodrigues' formula.
Mat3 rotation_from_axis_angle(const Vec3& w);
Vec3 axis_angle_from_rotation(const Mat3& r);
/// dR/dw_k for k = 0..2, given R = rotation_from_axis_angle(w).
std::array<Mat3, 3> rotation_derivatives(const Vec3& w, const Mat3& r);

}  // namespace stabilis
