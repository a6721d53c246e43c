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

#ifndef QUADPLAN_MODEL_HPP_
#define QUADPLAN_MODEL_HPP_

#include <array>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "quadplan/rotation.hpp"

namespace quadplan {

inline constexpr int kNumLegs = 4;
inline constexpr int kNumJoints = 12;   // 3 per leg: abduction, hip flexion, knee flexion
inline constexpr int kGenVelDim = 18;   // base linear + base angular (world) + joints

enum Leg : int { FL = 0, FR = 1, HL = 2, HR = 3 };
extern const std::array<const char*, kNumLegs> kLegNames;

// Desk-scale quadruped: mass properties, leg geometry, contact limits.
// Legs are 3-DoF chains hanging from the hip offsets: abduction about x,
// hip flexion about y, knee flexion about y (both flexion axes parallel).
struct RobotModel {
  double mass = 2.0;          // kg, total (base + all point masses)
  double gravity = 9.81;      // m/s^2, world z points up
  std::array<Eigen::Vector2d, kNumLegs> hip_offsets;  // x,y of hip in base frame
  double upper_leg_len = 0.16;
  double lower_leg_len = 0.16;
  double nominal_height = 0.24;
  double friction_mu = 0.6;
  double max_leg_reach = 0.35;              // bound on |CoM - endeffector|
  Eigen::Vector2d cop_half_extents{0.0, 0.0};  // point feet by default
  Eigen::Matrix3d base_inertia;
  // Per leg: point masses at the hip, knee and foot points.
  std::array<Eigen::Vector3d, kNumLegs> link_point_masses;
  Eigen::Matrix<double, kNumJoints, 1> joint_lower, joint_upper;
  Eigen::Matrix<double, kNumJoints, 1> nominal_posture;

  static RobotModel desk_default();

  double base_mass() const;
  double link_mass_sum() const;
  /// Ground contact point directly below hip i at zero displacement.
  Eigen::Vector3d nominal_foothold(int leg) const;
  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

struct WholeBodyState {
  Eigen::Vector3d base_pos = Eigen::Vector3d::Zero();
  Eigen::Quaterniond base_quat = Eigen::Quaterniond::Identity();  // w,x,y,z
  Eigen::Matrix<double, kNumJoints, 1> joint_pos = Eigen::Matrix<double, kNumJoints, 1>::Zero();
  Eigen::Vector3d base_lin_vel = Eigen::Vector3d::Zero();  // world frame
  Eigen::Vector3d base_ang_vel = Eigen::Vector3d::Zero();  // world frame
  Eigen::Matrix<double, kNumJoints, 1> joint_vel = Eigen::Matrix<double, kNumJoints, 1>::Zero();

  /// Standing at the nominal posture, base at (0,0,nominal_height).
  static WholeBodyState nominal(const RobotModel& model);

  Eigen::Matrix<double, kGenVelDim, 1> gen_vel() const;
  void set_gen_vel(const Eigen::Matrix<double, kGenVelDim, 1>& v);
  /// Integrate the stored velocity forward: base position by Euler, base
  /// orientation by the exponential map, joints by Euler.
  void integrate(double dt);
};

/// World positions of the four feet.
std::array<Eigen::Vector3d, kNumLegs> forward_kinematics(const RobotModel& model,
                                                         const WholeBodyState& q);

Eigen::Vector3d foot_position(const RobotModel& model, const WholeBodyState& q, int leg);

/// 3x18 map from generalized velocity to world foot linear velocity.
Eigen::Matrix<double, 3, kGenVelDim> foot_jacobian(const RobotModel& model,
                                                   const WholeBodyState& q, int leg);

/// 3x3 joint block of foot_jacobian for one leg.
Eigen::Matrix3d leg_jacobian(const RobotModel& model, const WholeBodyState& q, int leg);

struct ComResult {
  Eigen::Vector3d com;
  Eigen::Matrix<double, 3, kGenVelDim> jacobian;
};

/// Mass-weighted CoM of base plus link point masses, with its Jacobian.
ComResult com_of(const RobotModel& model, const WholeBodyState& q);

/// Joint angles placing foot `leg` at `foot_in_base` (base frame).
/// Knee bends with negative flexion. Throws when out of reach.
Eigen::Vector3d leg_ik(const RobotModel& model, int leg, const Eigen::Vector3d& foot_in_base);

}  // namespace quadplan

#endif  // QUADPLAN_MODEL_HPP_
