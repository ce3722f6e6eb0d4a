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

#include "stabilis/rotation.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace stabilis {

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return s;
}

Mat3 rotation_from_axis_angle(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-12) return Mat3::Identity() + skew(w);
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

Vec3 axis_angle_from_rotation(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

std::array<Mat3, 3> rotation_derivatives(const Vec3& w, const Mat3& r) {
  std::array<Mat3, 3> d;
  const double theta2 = w.squaredNorm();
  if (theta2 < 1e-16) {
    for (int k = 0; k < 3; ++k) d[k] = skew(Vec3::Unit(k));
    return d;
  }
  // dR/dw_k = (w_k [w]x + [w x (I - R) e_k]x) R / |w|^2
  const Mat3 wx = skew(w);
  const Mat3 i_minus_r = Mat3::Identity() - r;
  for (int k = 0; k < 3; ++k) {
    const Vec3 v = w.cross(i_minus_r.col(k));
    d[k] = (w[k] * wx + skew(v)) * r / theta2;
  }
  return d;
}

}  // namespace stabilis
