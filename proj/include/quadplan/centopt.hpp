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

#ifndef QUADPLAN_CENTOPT_HPP_
#define QUADPLAN_CENTOPT_HPP_

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadplan/gait.hpp"
#include "quadplan/model.hpp"

namespace quadplan {

struct CentroidalState {
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Vector3d lin_momentum = Eigen::Vector3d::Zero();
  Eigen::Vector3d ang_momentum = Eigen::Vector3d::Zero();
};

struct EffectorForce {
  bool active = false;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector2d cop = Eigen::Vector2d::Zero();  // offset in the foot frame
  double yaw_torque = 0.0;
};

struct ContactForceSet {
  std::array<EffectorForce, kNumLegs> eff;

  Eigen::Vector3d total_force() const;
};

struct CostBreakdown {
  double com_via = 0.0;
  double lmom = 0.0;
  double amom = 0.0;
  double force = 0.0;
  double force_rate = 0.0;
  double terminal = 0.0;
  double total() const { return com_via + lmom + amom + force + force_rate + terminal; }
};

struct SolveStats {
  bool converged = false;
  int outer_iters = 0;
  int qp_iters = 0;
  double wall_time_s = 0.0;
  double final_step_change = 0.0;  // ||c - c_prev||_inf at termination
  std::vector<double> objective_history;
};

struct CentroidalTrajectory {
  std::vector<CentroidalState> states;   // horizon + 1, states[0] is the start
  std::vector<ContactForceSet> forces;   // horizon, forces[t] acts over step t -> t+1
  std::vector<std::array<Eigen::Vector3d, kNumLegs>> foot_pos;  // horizon, sampled per step
  double dt = 0.01;
  CostBreakdown cost;
  SolveStats stats;

  int horizon() const { return static_cast<int>(forces.size()); }
};

struct OptSettings {
  double w_com_via = 1e3;
  double w_lmom = 1e1;
  double w_amom = 1e2;
  double w_force = 1e-3;
  double w_force_rate = 1e-2;
  double w_terminal = 10.0;  // multiplier on the final-state penalties
  int max_outer = 12;
  double qp_tol = 1e-8;
  double trust_radius = 0.05;     // box on com around the previous iterate
  double outer_tol = 1e-4;        // ||c - c_prev||_inf convergence threshold
  double min_trust_radius = 1e-5;
  bool verbose = false;
};

/// One explicit Euler step of the centroidal dynamics. Linear momentum is
/// updated first and reused for the CoM update; the angular-momentum rate is
/// evaluated at the new CoM.
CentroidalState integrate_step(const CentroidalState& prev, const ContactForceSet& forces,
                               const std::array<Eigen::Vector3d, kNumLegs>& foot_pos,
                               const RobotModel& model, double dt);

struct ConstraintReport {
  double cop_violation = -1.0;       // max over feet of CoP box excess
  double cone_violation = 0.0;       // max of ||f_xy|| - mu*f_z
  double unilateral_violation = 0.0; // max of -f_z
  double reach_violation = 0.0;      // max of ||p - c|| - max_leg_reach
  double dynamics_residual = 0.0;    // max deviation from integrate_step recursion

  double max_violation() const;
  std::string to_string() const;
};

ConstraintReport check_constraints(const CentroidalTrajectory& traj, const RobotModel& model);

/// Successive convexification over the linearized torque map: solves for
/// states and stance forces, re-integrates the accepted iterate so the
/// returned trajectory satisfies the exact dynamics recursion.
CentroidalTrajectory solve_centroidal(const MotionDescription& description,
                                      const RobotModel& model, const OptSettings& settings = {});

/// Stance flags and foot positions per step, sampled at step midpoints.
struct StepContacts {
  std::array<bool, kNumLegs> active;
  std::array<Eigen::Vector3d, kNumLegs> pos;
};
StepContacts contacts_at_step(const MotionDescription& d, int step);

/// Net contact wrench about `com`: stacked (sum of forces, sum of torques).
/// Gravity is not included.
Eigen::Matrix<double, 6, 1> contact_wrench(const ContactForceSet& forces,
                                           const std::array<Eigen::Vector3d, kNumLegs>& foot_pos,
                                           const Eigen::Vector3d& com);

}  // namespace quadplan

#endif  // QUADPLAN_CENTOPT_HPP_
