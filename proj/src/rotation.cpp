// Copyright 2026 The quadplan Authors
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

#include "quadplan/rotation.hpp"

#include <cmath>

namespace quadplan {

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& v) {
  const double theta = v.norm();
  double scale;
  if (theta < 1e-8) {
    // sin(t/2)/t = 1/2 - t^2/48 + O(t^4)
    scale = 0.5 - theta * theta / 48.0;
  } else {
    scale = std::sin(0.5 * theta) / theta;
  }
  Eigen::Quaterniond q(std::cos(0.5 * theta), scale * v.x(), scale * v.y(), scale * v.z());
  q.normalize();
  return q;
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  // Canonical representative with w >= 0 keeps the angle in [0, pi].
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Eigen::Vector3d im(q.x(), q.y(), q.z());
  const double s = im.norm();
  const double angle = 2.0 * std::atan2(s, q.w());
  if (s < 1e-12) {
    // angle ~ 0: log(q) ~ 2*im/w
    return 2.0 * im / q.w();
  }
  Eigen::Vector3d v = (angle / s) * im;
  if (q.w() < 1e-12) {
    // angle == pi up to rounding: both branches valid, pick the one whose
    // first nonzero component is non-negative.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
  }
  return v;
}

Eigen::Vector3d quat_boxminus(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return quat_log(a * b.conjugate());
}

Eigen::Quaterniond quat_boxplus(const Eigen::Quaterniond& b, const Eigen::Vector3d& v) {
  return (quat_exp(v) * b).normalized();
}

double quat_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return quat_boxminus(a, b).norm();
}

Eigen::Quaterniond quat_from_rpy(double roll, double pitch, double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                            Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                            Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()));
}

Eigen::Vector3d rpy_from_quat(const Eigen::Quaterniond& q_in) {
  const Eigen::Quaterniond q = q_in.normalized();
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  const double roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  double sp = 2.0 * (w * y - z * x);
  sp = std::clamp(sp, -1.0, 1.0);
  const double pitch = std::asin(sp);
  const double yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return {roll, pitch, yaw};
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace quadplan
