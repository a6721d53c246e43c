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

#ifndef QUADPLAN_SIM_HPP_
#define QUADPLAN_SIM_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "quadplan/centopt.hpp"
#include "quadplan/ik.hpp"
#include "quadplan/model.hpp"
#include "quadplan/wbc.hpp"

namespace quadplan {

// Centroidal plant with ideal force tracking: the centroidal state is the
// ground truth; a whole-body mirror follows it for kinematics. Joints track
// commanded velocities through a first-order lag.

inline constexpr double kJointLagTau = 0.02;  // s

struct PlantState {
  CentroidalState cent;
  WholeBodyState q;  // kinematic mirror; q.base_quat is the plant orientation
  double time = 0.0;

  const Eigen::Quaterniond& base_quat() const { return q.base_quat; }

  /// Rest state at a whole-body configuration: zero momenta, CoM from
  /// forward kinematics.
  static PlantState at_rest(const RobotModel& model, const WholeBodyState& q0);
};

/// One Euler step of the centroidal dynamics under the commanded forces
/// (applied at `foot_pos`, world frame) plus a CoM-level disturbance force.
/// Base angular velocity comes from the angular momentum through the base
/// inertia; the base linear velocity is chosen so the mirror's FK CoM tracks
/// the centroidal CoM; joints relax toward `joint_vel_cmd` with time constant
/// kJointLagTau (exact exponential discretization).
PlantState plant_step(const PlantState& s, const std::vector<Eigen::Vector3d>& forces,
                      const std::vector<Eigen::Vector3d>& foot_pos,
                      const Eigen::Matrix<double, kNumJoints, 1>& joint_vel_cmd,
                      const RobotModel& model, double dt,
                      const Eigen::Vector3d& disturbance = Eigen::Vector3d::Zero());

struct Disturbance {
  double force_std = 0.0;  // N per axis, zero-mean Gaussian each step
  std::uint64_t seed = 0;
};

struct TrackingStep {
  double t = 0.0;
  CentroidalState planned, simulated;
  Eigen::Quaterniond planned_quat = Eigen::Quaterniond::Identity();
  Eigen::Quaterniond simulated_quat = Eigen::Quaterniond::Identity();
  std::array<bool, kNumLegs> in_stance{};
  std::array<Eigen::Vector3d, kNumLegs> forces{};   // zero while in swing
  std::array<Eigen::Vector3d, kNumLegs> torques{};  // logged impedance torques
  double eta_norm = 0.0, zeta1 = 0.0, zeta2 = 0.0;
};

struct TrackingLog {
  double dt = 0.01;
  std::vector<TrackingStep> steps;
  bool fell = false;
  int fall_step = -1;          // step index at which the run stopped
  double com_gap_max = 0.0;    // worst |com_of(q) - cent.com| seen (soft check)

  double duration() const { return dt * static_cast<double>(steps.size()); }
};

/// Closed loop over a kinematic plan: wrench PD -> force allocation ->
/// impedance torques (logged) -> plant step. Stops early and flags a fall
/// when the CoM drops below 0.6x nominal height or the orientation error
/// against the plan exceeds 1 rad. Deterministic given the disturbance seed.
TrackingLog run_tracking(const WholeBodyPlan& plan, const RobotModel& model,
                         const WbcGains& gains = {}, const Disturbance& disturbance = {});

struct TrackingMetrics {
  double com_err_mean = 0.0, com_err_max = 0.0;   // m
  double ori_err_mean = 0.0, ori_err_max = 0.0;   // rad, geodesic angle
};

TrackingMetrics tracking_metrics(const TrackingLog& log);

}  // namespace quadplan

#endif  // QUADPLAN_SIM_HPP_
