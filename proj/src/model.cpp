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

#include "quadplan/model.hpp"

#include <cmath>
#include <stdexcept>

namespace quadplan {

const std::array<const char*, kNumLegs> kLegNames = {"FL", "FR", "HL", "HR"};

namespace {

Eigen::Matrix3d rot_x(double a) {
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

Eigen::Matrix3d rot_y(double a) {
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

// Knee and foot points of one leg expressed in the base frame.
struct LegPoints {
  Eigen::Vector3d hip, knee, foot;
};

LegPoints leg_points_base(const RobotModel& model, const Eigen::Vector3d& q, int leg) {
  LegPoints pts;
  pts.hip = Eigen::Vector3d(model.hip_offsets[leg].x(), model.hip_offsets[leg].y(), 0.0);
  const Eigen::Matrix3d R1 = rot_x(q[0]);
  const Eigen::Vector3d upper = rot_y(q[1]) * Eigen::Vector3d(0, 0, -model.upper_leg_len);
  const Eigen::Vector3d lower = rot_y(q[1] + q[2]) * Eigen::Vector3d(0, 0, -model.lower_leg_len);
  pts.knee = pts.hip + R1 * upper;
  pts.foot = pts.hip + R1 * (upper + lower);
  return pts;
}

// Joint columns of d(point in base)/dq for one leg. Abduction spins the whole
// chain about x through the hip; both flexion joints share the rotated y axis.
Eigen::Matrix3d foot_joint_jacobian_base(const RobotModel& model, const Eigen::Vector3d& q,
                                         int leg) {
  const LegPoints pts = leg_points_base(model, q, leg);
  const Eigen::Matrix3d R1 = rot_x(q[0]);
  const Eigen::Vector3d ax1 = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ax_y = R1 * Eigen::Vector3d::UnitY();
  Eigen::Matrix3d J;
  J.col(0) = ax1.cross(pts.foot - pts.hip);
  J.col(1) = ax_y.cross(pts.foot - pts.hip);
  J.col(2) = ax_y.cross(pts.foot - pts.knee);
  return J;
}

Eigen::Matrix3d knee_joint_jacobian_base(const RobotModel& model, const Eigen::Vector3d& q,
                                         int leg) {
  const LegPoints pts = leg_points_base(model, q, leg);
  const Eigen::Matrix3d R1 = rot_x(q[0]);
  const Eigen::Vector3d ax_y = R1 * Eigen::Vector3d::UnitY();
  Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
  J.col(0) = Eigen::Vector3d::UnitX().cross(pts.knee - pts.hip);
  J.col(1) = ax_y.cross(pts.knee - pts.hip);
  return J;
}

}  // namespace

RobotModel RobotModel::desk_default() {
  RobotModel m;
  m.mass = 2.0;
  m.gravity = 9.81;
  m.hip_offsets[FL] = {0.17, 0.10};
  m.hip_offsets[FR] = {0.17, -0.10};
  m.hip_offsets[HL] = {-0.17, 0.10};
  m.hip_offsets[HR] = {-0.17, -0.10};
  m.upper_leg_len = 0.16;
  m.lower_leg_len = 0.16;
  m.nominal_height = 0.24;
  m.friction_mu = 0.6;
  m.max_leg_reach = 0.35;
  m.cop_half_extents.setZero();
  m.base_inertia = Eigen::Vector3d(0.015, 0.030, 0.040).asDiagonal();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    m.link_point_masses[leg] = {0.075, 0.050, 0.025};  // hip, knee, foot
  }
  // Nominal flexion folds the leg so the foot sits directly below the hip at
  // a height of nominal_height: cos(q2) = h / (L1 + L2).
  const double q2 = std::acos(m.nominal_height / (m.upper_leg_len + m.lower_leg_len));
  for (int leg = 0; leg < kNumLegs; ++leg) {
    m.nominal_posture.segment<3>(3 * leg) = Eigen::Vector3d(0.0, q2, -2.0 * q2);
    m.joint_lower.segment<3>(3 * leg) = Eigen::Vector3d(-0.9, -1.2, -2.7);
    m.joint_upper.segment<3>(3 * leg) = Eigen::Vector3d(0.9, 2.2, 0.0);
  }
  return m;
}

double RobotModel::link_mass_sum() const {
  double s = 0.0;
  for (const auto& leg : link_point_masses) s += leg.sum();
  return s;
}

double RobotModel::base_mass() const { return mass - link_mass_sum(); }

Eigen::Vector3d RobotModel::nominal_foothold(int leg) const {
  return {hip_offsets[leg].x(), hip_offsets[leg].y(), 0.0};
}

void RobotModel::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (!(mass > 0.0)) fail("mass must be positive");
  if (!(friction_mu > 0.0)) fail("friction_mu must be positive");
  if (!(gravity > 0.0)) fail("gravity must be positive");
  if (!(upper_leg_len > 0.0) || !(lower_leg_len > 0.0)) fail("leg lengths must be positive");
  if (!(nominal_height > 0.0) || nominal_height > upper_leg_len + lower_leg_len)
    fail("nominal_height must lie within leg reach");
  if (cop_half_extents.minCoeff() < 0.0) fail("cop_half_extents must be non-negative");
  if (base_mass() <= 0.0) fail("link point masses exceed total mass");
  for (const auto& leg : link_point_masses)
    if (leg.minCoeff() < 0.0) fail("link point masses must be non-negative");
  if (((joint_upper - joint_lower).array() <= 0.0).any()) fail("joint limits inverted");
  if ((nominal_posture.array() < joint_lower.array()).any() ||
      (nominal_posture.array() > joint_upper.array()).any())
    fail("nominal posture outside joint limits");
  if (!base_inertia.isApprox(base_inertia.transpose(), 1e-12))
    fail("base_inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(base_inertia);
  if (es.eigenvalues().minCoeff() <= 0.0) fail("base_inertia must be positive definite");
}

WholeBodyState WholeBodyState::nominal(const RobotModel& model) {
  WholeBodyState q;
  q.base_pos = {0.0, 0.0, model.nominal_height};
  q.joint_pos = model.nominal_posture;
  return q;
}

Eigen::Matrix<double, kGenVelDim, 1> WholeBodyState::gen_vel() const {
  Eigen::Matrix<double, kGenVelDim, 1> v;
  v.segment<3>(0) = base_lin_vel;
  v.segment<3>(3) = base_ang_vel;
  v.segment<kNumJoints>(6) = joint_vel;
  return v;
}

void WholeBodyState::set_gen_vel(const Eigen::Matrix<double, kGenVelDim, 1>& v) {
  base_lin_vel = v.segment<3>(0);
  base_ang_vel = v.segment<3>(3);
  joint_vel = v.segment<kNumJoints>(6);
}

void WholeBodyState::integrate(double dt) {
  base_pos += base_lin_vel * dt;
  base_quat = quat_boxplus(base_quat, base_ang_vel * dt);
  joint_pos += joint_vel * dt;
}

std::array<Eigen::Vector3d, kNumLegs> forward_kinematics(const RobotModel& model,
                                                         const WholeBodyState& q) {
  std::array<Eigen::Vector3d, kNumLegs> feet;
  for (int leg = 0; leg < kNumLegs; ++leg) feet[leg] = foot_position(model, q, leg);
  return feet;
}

Eigen::Vector3d foot_position(const RobotModel& model, const WholeBodyState& q, int leg) {
  const LegPoints pts = leg_points_base(model, q.joint_pos.segment<3>(3 * leg), leg);
  return q.base_pos + q.base_quat * pts.foot;
}

Eigen::Matrix<double, 3, kGenVelDim> foot_jacobian(const RobotModel& model,
                                                   const WholeBodyState& q, int leg) {
  const Eigen::Vector3d qleg = q.joint_pos.segment<3>(3 * leg);
  const Eigen::Matrix3d R = q.base_quat.toRotationMatrix();
  const LegPoints pts = leg_points_base(model, qleg, leg);
  Eigen::Matrix<double, 3, kGenVelDim> J = Eigen::Matrix<double, 3, kGenVelDim>::Zero();
  J.block<3, 3>(0, 0).setIdentity();
  J.block<3, 3>(0, 3) = -skew(R * pts.foot);
  J.block<3, 3>(0, 6 + 3 * leg) = R * foot_joint_jacobian_base(model, qleg, leg);
  return J;
}

Eigen::Matrix3d leg_jacobian(const RobotModel& model, const WholeBodyState& q, int leg) {
  const Eigen::Vector3d qleg = q.joint_pos.segment<3>(3 * leg);
  return q.base_quat.toRotationMatrix() * foot_joint_jacobian_base(model, qleg, leg);
}

ComResult com_of(const RobotModel& model, const WholeBodyState& q) {
  const Eigen::Matrix3d R = q.base_quat.toRotationMatrix();
  ComResult res;
  res.com.setZero();
  res.jacobian.setZero();

  auto add_point = [&](double m_pt, const Eigen::Vector3d& p_base,
                       const Eigen::Matrix3d* joint_block, int leg) {
    const Eigen::Vector3d offset_world = R * p_base;
    res.com += m_pt * (q.base_pos + offset_world);
    res.jacobian.block<3, 3>(0, 0) += m_pt * Eigen::Matrix3d::Identity();
    res.jacobian.block<3, 3>(0, 3) += m_pt * -skew(offset_world);
    if (joint_block != nullptr)
      res.jacobian.block<3, 3>(0, 6 + 3 * leg) += m_pt * (R * *joint_block);
  };

  add_point(model.base_mass(), Eigen::Vector3d::Zero(), nullptr, 0);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d qleg = q.joint_pos.segment<3>(3 * leg);
    const LegPoints pts = leg_points_base(model, qleg, leg);
    const Eigen::Matrix3d J_knee = knee_joint_jacobian_base(model, qleg, leg);
    const Eigen::Matrix3d J_foot = foot_joint_jacobian_base(model, qleg, leg);
    const Eigen::Matrix3d J_hip = Eigen::Matrix3d::Zero();
    add_point(model.link_point_masses[leg][0], pts.hip, &J_hip, leg);
    add_point(model.link_point_masses[leg][1], pts.knee, &J_knee, leg);
    add_point(model.link_point_masses[leg][2], pts.foot, &J_foot, leg);
  }
  res.com /= model.mass;
  res.jacobian /= model.mass;
  return res;
}

Eigen::Vector3d leg_ik(const RobotModel& model, int leg, const Eigen::Vector3d& foot_in_base) {
  const Eigen::Vector3d hip(model.hip_offsets[leg].x(), model.hip_offsets[leg].y(), 0.0);
  const Eigen::Vector3d d = foot_in_base - hip;
  const double L1 = model.upper_leg_len, L2 = model.lower_leg_len;

  const double q1 = std::atan2(d.y(), -d.z());
  // In the abduction-aligned frame the chain is planar: u along -x, v along -z.
  const double u = -d.x();
  const double v = std::sqrt(d.y() * d.y() + d.z() * d.z());
  const double r2 = u * u + v * v;
  double D = (r2 - L1 * L1 - L2 * L2) / (2.0 * L1 * L2);
  if (D > 1.0 + 1e-9 || D < -1.0 - 1e-9)
    throw std::invalid_argument("leg_ik: foot target out of reach");
  D = std::min(1.0, std::max(-1.0, D));
  const double q3 = -std::acos(D);  // knee bends backward
  const double q2 = std::atan2(u, v) - std::atan2(L2 * std::sin(q3), L1 + L2 * std::cos(q3));
  return {q1, q2, q3};
}

}  // namespace quadplan
