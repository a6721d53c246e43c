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

#ifndef QUADPLAN_WBC_HPP_
#define QUADPLAN_WBC_HPP_

#include <vector>

#include <Eigen/Dense>

#include "quadplan/model.hpp"

namespace quadplan {

// Whole-body torque control: a centroidal wrench PD, a slack-regularized
// force allocation over the stance feet, and per-leg impedance torques.

struct WbcGains {
  Eigen::Vector3d K_c = Eigen::Vector3d::Constant(50.0);   // CoM position (N/m)
  Eigen::Vector3d D_c = Eigen::Vector3d::Constant(5.0);    // linear momentum (N·s/m)
  Eigen::Vector3d K_b = Eigen::Vector3d::Constant(25.0);   // orientation (N·m/rad)
  Eigen::Vector3d D_b = Eigen::Vector3d::Constant(2.5);    // angular momentum (N·m·s/rad)
  Eigen::Vector3d imp_K = Eigen::Vector3d::Constant(50.0);  // foot position (N/m)
  Eigen::Vector3d imp_D = Eigen::Vector3d::Constant(0.5);   // foot velocity (N·s/m)
  double alpha = 1e4;  // slack weight; must dwarf the unit force weight
  double friction_mu = 0.6;

  /// Throws std::invalid_argument when a gain is negative, mu is outside
  /// (0, 2] or alpha is not at least an order of magnitude above the unit
  /// force weight.
  void validate() const;
};

struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // about the CoM

  Eigen::Matrix<double, 6, 1> vec() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, moment;
    return w;
  }
  static Wrench from_vec(const Eigen::Matrix<double, 6, 1>& w) { return {w.head<3>(), w.tail<3>()}; }
};

// One side of the wrench PD; the measured side leaves `wrench` at zero.
struct WbcSetpoint {
  Wrench wrench;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Vector3d lin_momentum = Eigen::Vector3d::Zero();
  Eigen::Vector3d ang_momentum = Eigen::Vector3d::Zero();
  Eigen::Quaterniond base_quat = Eigen::Quaterniond::Identity();
};

/// W = W_ref + [K_c(c_ref - c) + D_c(l_ref - l);
///              K_b(q_ref boxminus q) + D_b(k_ref - k)].
Wrench compute_wrench(const WbcSetpoint& ref, const WbcSetpoint& meas, const WbcGains& gains);

struct ForceAllocation {
  std::vector<Eigen::Vector3d> forces;  // one per stance foot, input order
  Eigen::Matrix<double, 6, 1> eta = Eigen::Matrix<double, 6, 1>::Zero();  // wrench slack
  double zeta1 = 0.0;  // shared tangential-x slack
  double zeta2 = 0.0;  // shared tangential-y slack
  double wrench_residual = 0.0;  // ||sum F + sum p x F - W|| without slacks

  double eta_norm() const { return eta.norm(); }
};

/// Distributes the wrench over the stance feet (positions relative to the
/// CoM): min sum ||F_i||^2 + alpha (||eta||^2 + zeta1^2 + zeta2^2) subject to
/// the wrench equality with slack eta, |F_x| <= mu F_z + zeta1 and
/// |F_y| <= mu F_z + zeta2 per foot, and F_z >= 0. Zero feet is legal (eta
/// absorbs W). Throws std::runtime_error when the QP does not solve.
ForceAllocation allocate_forces(const Wrench& w, const std::vector<Eigen::Vector3d>& feet_rel_com,
                                const WbcGains& gains);

/// tau = J^T (F + K (p_ref - p) + D (v_ref - v)); swing legs pass F = 0.
Eigen::Vector3d leg_impedance_torque(const Eigen::Matrix3d& leg_jac, const Eigen::Vector3d& force,
                                     const Eigen::Vector3d& foot_pos_ref,
                                     const Eigen::Vector3d& foot_vel_ref,
                                     const Eigen::Vector3d& foot_pos,
                                     const Eigen::Vector3d& foot_vel, const WbcGains& gains);

}  // namespace quadplan

#endif  // QUADPLAN_WBC_HPP_
