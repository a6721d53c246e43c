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

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "doctest.h"
#include "quadplan/rng.hpp"
#include "quadplan/rotation.hpp"

namespace quadplan {
namespace {

WholeBodyState random_state(const RobotModel& model, Rng& rng) {
  WholeBodyState q;
  q.base_pos = {rng.normal(), rng.normal(), model.nominal_height + 0.2 * rng.normal()};
  q.base_quat = quat_exp({0.4 * rng.normal(), 0.4 * rng.normal(), 0.4 * rng.normal()});
  for (int j = 0; j < kNumJoints; ++j)
    q.joint_pos[j] = model.joint_lower[j] +
                     rng.uniform() * (model.joint_upper[j] - model.joint_lower[j]);
  return q;
}

// Chain-composition oracle: the same kinematic structure evaluated as a
// product of homogeneous transforms instead of direct vector arithmetic.
Eigen::Vector3d foot_by_transforms(const RobotModel& model, const WholeBodyState& q, int leg) {
  Eigen::Isometry3d T = Eigen::Translation3d(q.base_pos) * q.base_quat;
  T = T * Eigen::Translation3d(model.hip_offsets[leg].x(), model.hip_offsets[leg].y(), 0.0);
  T = T * Eigen::AngleAxisd(q.joint_pos[3 * leg + 0], Eigen::Vector3d::UnitX());
  T = T * Eigen::AngleAxisd(q.joint_pos[3 * leg + 1], Eigen::Vector3d::UnitY());
  T = T * Eigen::Translation3d(0.0, 0.0, -model.upper_leg_len);
  T = T * Eigen::AngleAxisd(q.joint_pos[3 * leg + 2], Eigen::Vector3d::UnitY());
  T = T * Eigen::Translation3d(0.0, 0.0, -model.lower_leg_len);
  return T.translation();
}

// Central finite differences over the 18 generalized velocities, with base
// orientation perturbed through the exponential map.
template <typename F>
Eigen::Matrix<double, 3, kGenVelDim> fd_jacobian(const WholeBodyState& q, F eval, double h) {
  Eigen::Matrix<double, 3, kGenVelDim> J;
  for (int k = 0; k < kGenVelDim; ++k) {
    WholeBodyState plus = q, minus = q;
    if (k < 3) {
      plus.base_pos[k] += h;
      minus.base_pos[k] -= h;
    } else if (k < 6) {
      Eigen::Vector3d dw = Eigen::Vector3d::Zero();
      dw[k - 3] = h;
      plus.base_quat = quat_boxplus(q.base_quat, dw);
      minus.base_quat = quat_boxplus(q.base_quat, -dw);
    } else {
      plus.joint_pos[k - 6] += h;
      minus.joint_pos[k - 6] -= h;
    }
    J.col(k) = (eval(plus) - eval(minus)) / (2.0 * h);
  }
  return J;
}

TEST_CASE("desk model validates and nominal feet touch the ground") {
  const RobotModel model = RobotModel::desk_default();
  model.validate();
  const WholeBodyState q = WholeBodyState::nominal(model);
  for (const Eigen::Vector3d& foot : forward_kinematics(model, q)) {
    CHECK(std::abs(foot.z()) <= 1e-9);
  }
  // Feet sit directly below their hips at the nominal posture.
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d foot = foot_position(model, q, leg);
    CHECK(std::abs(foot.x() - model.hip_offsets[leg].x()) <= 1e-9);
    CHECK(std::abs(foot.y() - model.hip_offsets[leg].y()) <= 1e-9);
  }
}

TEST_CASE("model validation rejects broken parameter sets") {
  RobotModel m = RobotModel::desk_default();
  m.mass = -1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = RobotModel::desk_default();
  m.nominal_height = 1.0;  // beyond leg reach
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = RobotModel::desk_default();
  m.link_point_masses[0] = {1.0, 1.0, 1.0};  // exceeds total mass
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = RobotModel::desk_default();
  m.base_inertia(0, 0) = -0.1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = RobotModel::desk_default();
  m.joint_lower[4] = m.joint_upper[4] + 0.1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("forward kinematics is equivariant under base translation") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(20);
  for (int i = 0; i < 100; ++i) {
    WholeBodyState q = random_state(model, rng);
    const auto feet = forward_kinematics(model, q);
    const Eigen::Vector3d shift(0.1, 0.0, 0.0);
    q.base_pos += shift;
    const auto moved = forward_kinematics(model, q);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      CHECK((moved[leg] - feet[leg] - shift).norm() <= 1e-14);
    }
  }
}

TEST_CASE("forward kinematics matches the transform-product oracle") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const WholeBodyState q = random_state(model, rng);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      CHECK((foot_position(model, q, leg) - foot_by_transforms(model, q, leg)).norm() <= 1e-10);
    }
  }
}

TEST_CASE("foot jacobian columns of other legs are zero") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const WholeBodyState q = random_state(model, rng);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const auto J = foot_jacobian(model, q, leg);
      CHECK(J.block<3, 3>(0, 0).isIdentity(1e-14));
      for (int other = 0; other < kNumLegs; ++other) {
        if (other == leg) continue;
        CHECK(J.block<3, 3>(0, 6 + 3 * other).norm() == doctest::Approx(0.0));
      }
    }
  }
}

TEST_CASE("foot jacobian matches central finite differences") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const WholeBodyState q = random_state(model, rng);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const auto J = foot_jacobian(model, q, leg);
      const auto J_fd = fd_jacobian(
          q, [&](const WholeBodyState& s) { return foot_position(model, s, leg); }, 1e-6);
      CHECK((J - J_fd).cwiseAbs().maxCoeff() <= 1e-5);
    }
  }
}

TEST_CASE("straight leg is singular in the flexion plane") {
  const RobotModel model = RobotModel::desk_default();
  WholeBodyState q = WholeBodyState::nominal(model);
  q.joint_pos.segment<3>(0) = Eigen::Vector3d(0.0, 0.3, 0.0);  // knee fully extended
  const Eigen::Matrix3d J = leg_jacobian(model, q, FL);
  // Hip-flexion and knee columns act on a straight segment: both are
  // perpendicular to the leg, so the 2-column block has rank 1.
  const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J.rightCols<2>());
  CHECK(svd.singularValues()[0] > 1e-3);
  CHECK(svd.singularValues()[1] <= 1e-12);
}

TEST_CASE("com of a mirror-symmetric configuration sits over the base") {
  const RobotModel model = RobotModel::desk_default();
  WholeBodyState q = WholeBodyState::nominal(model);
  // The nominal posture folds all four knees backward, so only y is
  // symmetric. Flipping the hind-leg flexion signs mirrors the chain about
  // the base x = 0 plane (kinematics only; limits do not apply here).
  for (int leg : {HL, HR}) {
    q.joint_pos[3 * leg + 1] = -q.joint_pos[3 * leg + 1];
    q.joint_pos[3 * leg + 2] = -q.joint_pos[3 * leg + 2];
  }
  const ComResult res = com_of(model, q);
  CHECK(std::abs(res.com.x() - q.base_pos.x()) <= 1e-9);
  CHECK(std::abs(res.com.y() - q.base_pos.y()) <= 1e-9);
  CHECK(res.com.z() < q.base_pos.z());  // leg masses hang below the base
}

TEST_CASE("com of the nominal posture has the closed-form knee offset") {
  const RobotModel model = RobotModel::desk_default();
  const WholeBodyState q = WholeBodyState::nominal(model);
  const ComResult res = com_of(model, q);
  // Every knee trails the hip by L1*sin(q2) in x; hips and feet are centered.
  const double q2 = model.nominal_posture[1];
  double expected_x = 0.0;
  for (int leg = 0; leg < kNumLegs; ++leg)
    expected_x -= model.link_point_masses[leg][1] * model.upper_leg_len * std::sin(q2);
  expected_x /= model.mass;
  CHECK(std::abs(res.com.x() - (q.base_pos.x() + expected_x)) <= 1e-12);
  CHECK(std::abs(res.com.y() - q.base_pos.y()) <= 1e-9);
}

TEST_CASE("com equals base position when links are massless") {
  RobotModel model = RobotModel::desk_default();
  for (auto& masses : model.link_point_masses) masses.setZero();
  Rng rng(24);
  for (int i = 0; i < 50; ++i) {
    const WholeBodyState q = random_state(model, rng);
    CHECK((com_of(model, q).com - q.base_pos).norm() <= 1e-14);
  }
}

TEST_CASE("com is the mass-weighted mean of base and link points") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(25);
  for (int i = 0; i < 100; ++i) {
    const WholeBodyState q = random_state(model, rng);
    // Independent accumulation from world-frame chain points.
    Eigen::Vector3d acc = model.base_mass() * q.base_pos;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const Eigen::Vector3d hip_base(model.hip_offsets[leg].x(), model.hip_offsets[leg].y(), 0.0);
      const Eigen::Vector3d hip = q.base_pos + q.base_quat * hip_base;
      const Eigen::Vector3d foot = foot_by_transforms(model, q, leg);
      // Knee point from the same transform chain, stopped at the upper link.
      Eigen::Isometry3d T = Eigen::Translation3d(q.base_pos) * q.base_quat;
      T = T * Eigen::Translation3d(hip_base);
      T = T * Eigen::AngleAxisd(q.joint_pos[3 * leg + 0], Eigen::Vector3d::UnitX());
      T = T * Eigen::AngleAxisd(q.joint_pos[3 * leg + 1], Eigen::Vector3d::UnitY());
      T = T * Eigen::Translation3d(0.0, 0.0, -model.upper_leg_len);
      const Eigen::Vector3d knee = T.translation();
      acc += model.link_point_masses[leg][0] * hip;
      acc += model.link_point_masses[leg][1] * knee;
      acc += model.link_point_masses[leg][2] * foot;
    }
    CHECK((com_of(model, q).com - acc / model.mass).norm() <= 1e-10);
  }
}

TEST_CASE("com jacobian matches central finite differences") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(26);
  for (int i = 0; i < 100; ++i) {
    const WholeBodyState q = random_state(model, rng);
    const ComResult res = com_of(model, q);
    const auto J_fd = fd_jacobian(
        q, [&](const WholeBodyState& s) { return com_of(model, s).com; }, 1e-6);
    CHECK((res.jacobian - J_fd).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("com is equivariant under base translation") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(27);
  for (int i = 0; i < 50; ++i) {
    WholeBodyState q = random_state(model, rng);
    const Eigen::Vector3d before = com_of(model, q).com;
    const Eigen::Vector3d shift(-0.3, 0.2, 0.05);
    q.base_pos += shift;
    CHECK((com_of(model, q).com - before - shift).norm() <= 1e-14);
  }
}

TEST_CASE("leg ik reconstructs joint angles from foot targets") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(28);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    WholeBodyState q;  // identity base: foot_position returns base-frame coordinates
    for (int leg = 0; leg < kNumLegs; ++leg) {
      // Bent-knee samples within limits; q3 < 0 matches the ik branch.
      q.joint_pos[3 * leg + 0] = (rng.uniform() - 0.5) * 1.2;
      q.joint_pos[3 * leg + 1] = (rng.uniform() - 0.5) * 1.6;
      q.joint_pos[3 * leg + 2] = -0.2 - rng.uniform() * 2.0;
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const Eigen::Vector3d target = foot_position(model, q, leg);
      const Eigen::Vector3d sol = leg_ik(model, leg, target);
      const WholeBodyState probe = [&] {
        WholeBodyState s = q;
        s.joint_pos.segment<3>(3 * leg) = sol;
        return s;
      }();
      // The ik solution must place the foot on the target even if the angle
      // triple differs (abduction wrap at straight-down configurations).
      CHECK((foot_position(model, probe, leg) - target).norm() <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 2000);
}

TEST_CASE("leg ik rejects unreachable targets") {
  const RobotModel model = RobotModel::desk_default();
  const Eigen::Vector3d hip(model.hip_offsets[FL].x(), model.hip_offsets[FL].y(), 0.0);
  const double reach = model.upper_leg_len + model.lower_leg_len;
  CHECK_THROWS_AS(leg_ik(model, FL, hip + Eigen::Vector3d(0, 0, -1.01 * reach)),
                  std::invalid_argument);
  CHECK_NOTHROW(leg_ik(model, FL, hip + Eigen::Vector3d(0, 0, -0.99 * reach)));
}

TEST_CASE("nominal posture is the ik solution for the nominal foothold") {
  const RobotModel model = RobotModel::desk_default();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d target(model.hip_offsets[leg].x(), model.hip_offsets[leg].y(),
                                 -model.nominal_height);
    const Eigen::Vector3d sol = leg_ik(model, leg, target);
    CHECK((sol - model.nominal_posture.segment<3>(3 * leg)).norm() <= 1e-9);
  }
}

TEST_CASE("generalized velocity round trips and integrates") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(29);
  WholeBodyState q = random_state(model, rng);
  Eigen::Matrix<double, kGenVelDim, 1> v;
  for (int k = 0; k < kGenVelDim; ++k) v[k] = rng.normal();
  q.set_gen_vel(v);
  CHECK((q.gen_vel() - v).norm() == doctest::Approx(0.0));

  WholeBodyState before = q;
  const double dt = 0.01;
  q.integrate(dt);
  CHECK((q.base_pos - before.base_pos - dt * before.base_lin_vel).norm() <= 1e-14);
  CHECK((q.joint_pos - before.joint_pos - dt * before.joint_vel).norm() <= 1e-14);
  CHECK((quat_boxminus(q.base_quat, before.base_quat) - dt * before.base_ang_vel).norm() <=
        1e-12);
  CHECK(std::abs(q.base_quat.norm() - 1.0) <= 1e-12);
}

TEST_CASE("foot jacobian predicts velocities along a finite motion") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(30);
  WholeBodyState q = random_state(model, rng);
  Eigen::Matrix<double, kGenVelDim, 1> v;
  for (int k = 0; k < kGenVelDim; ++k) v[k] = rng.normal();
  q.set_gen_vel(v);
  const double dt = 1e-6;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d vel = foot_jacobian(model, q, leg) * v;
    WholeBodyState fwd = q;
    fwd.integrate(dt);
    const Eigen::Vector3d fd =
        (foot_position(model, fwd, leg) - foot_position(model, q, leg)) / dt;
    CHECK((vel - fd).norm() <= 1e-4);
  }
}

}  // namespace
}  // namespace quadplan
