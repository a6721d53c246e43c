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

#ifndef QUADPLAN_ROTATION_HPP_
#define QUADPLAN_ROTATION_HPP_

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace quadplan {

/// Exponential map of SO(3): rotation vector -> unit quaternion.
Eigen::Quaterniond quat_exp(const Eigen::Vector3d& v);

/// Logarithmic map of SO(3): unit quaternion -> rotation vector with
/// angle in [0, pi]. At exactly pi the branch is chosen so that the
/// first nonzero component of the result is non-negative.
Eigen::Vector3d quat_log(const Eigen::Quaterniond& q);

/// a boxminus b = log(a * b^-1), the angular displacement taking b to a
/// (applied on the left / in the world frame).
Eigen::Vector3d quat_boxminus(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

/// b boxplus v = exp(v) * b. Inverse of quat_boxminus in its first argument.
Eigen::Quaterniond quat_boxplus(const Eigen::Quaterniond& b, const Eigen::Vector3d& v);

/// Geodesic angle between two orientations, in [0, pi].
double quat_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

/// Quaternion from roll-pitch-yaw (ZYX convention, R = Rz(y)*Ry(p)*Rx(r)).
Eigen::Quaterniond quat_from_rpy(double roll, double pitch, double yaw);

/// Roll-pitch-yaw (ZYX) of a quaternion; pitch clamped to [-pi/2, pi/2].
Eigen::Vector3d rpy_from_quat(const Eigen::Quaterniond& q);

/// Skew-symmetric matrix such that skew(a)*b = a x b.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace quadplan

#endif  // QUADPLAN_ROTATION_HPP_
