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

#include "quadplan/wbc.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "quadplan/qp.hpp"
#include "quadplan/rotation.hpp"

namespace quadplan {

void WbcGains::validate() const {
  auto nonneg = [](const Eigen::Vector3d& v, const char* name) {
    if ((v.array() < 0.0).any())
      throw std::invalid_argument(std::string("WbcGains: negative entry in ") + name);
  };
  nonneg(K_c, "K_c");
  nonneg(D_c, "D_c");
  nonneg(K_b, "K_b");
  nonneg(D_b, "D_b");
  nonneg(imp_K, "impedance K");
  nonneg(imp_D, "impedance D");
  if (!(friction_mu > 0.0 && friction_mu <= 2.0))
    throw std::invalid_argument("WbcGains: friction_mu outside (0, 2]");
  if (!(alpha >= 10.0))
    throw std::invalid_argument("WbcGains: slack weight alpha below 10x the force weight");
}

Wrench compute_wrench(const WbcSetpoint& ref, const WbcSetpoint& meas, const WbcGains& gains) {
  Wrench w = ref.wrench;
  w.force += gains.K_c.cwiseProduct(ref.com - meas.com) +
             gains.D_c.cwiseProduct(ref.lin_momentum - meas.lin_momentum);
  w.moment += gains.K_b.cwiseProduct(quat_boxminus(ref.base_quat, meas.base_quat)) +
              gains.D_b.cwiseProduct(ref.ang_momentum - meas.ang_momentum);
  return w;
}

ForceAllocation allocate_forces(const Wrench& w, const std::vector<Eigen::Vector3d>& feet_rel_com,
                                const WbcGains& gains) {
  const int nf = static_cast<int>(feet_rel_com.size());
  const int n = 3 * nf + 8;  // forces, eta(6), zeta1, zeta2
  const double inf = std::numeric_limits<double>::infinity();
  const double mu = gains.friction_mu;

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  P.topLeftCorner(3 * nf, 3 * nf) = 2.0 * Eigen::MatrixXd::Identity(3 * nf, 3 * nf);
  P.bottomRightCorner(8, 8) = 2.0 * gains.alpha * Eigen::MatrixXd::Identity(8, 8);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(n);

  // Wrench equality with slack: sum F + sum p x F + eta = W.
  Eigen::MatrixXd A_eq = Eigen::MatrixXd::Zero(6, n);
  for (int i = 0; i < nf; ++i) {
    A_eq.block<3, 3>(0, 3 * i) = Eigen::Matrix3d::Identity();
    A_eq.block<3, 3>(3, 3 * i) = skew(feet_rel_com[static_cast<std::size_t>(i)]);
  }
  A_eq.block<6, 6>(0, 3 * nf) = Eigen::Matrix<double, 6, 6>::Identity();
  const Eigen::Matrix<double, 6, 1> b_eq = w.vec();

  // Per foot: +-F_x - mu F_z - zeta1 <= 0, +-F_y - mu F_z - zeta2 <= 0,
  // F_z >= 0.
  Eigen::MatrixXd A_in = Eigen::MatrixXd::Zero(5 * nf, n);
  Eigen::VectorXd l_in = Eigen::VectorXd::Constant(5 * nf, -inf);
  Eigen::VectorXd u_in = Eigen::VectorXd::Zero(5 * nf);
  for (int i = 0; i < nf; ++i) {
    const int r = 5 * i;
    A_in(r + 0, 3 * i + 2) = 1.0;  // unilateral
    l_in[r + 0] = 0.0;
    u_in[r + 0] = inf;
    const double sx[4] = {1.0, -1.0, 0.0, 0.0};
    const double sy[4] = {0.0, 0.0, 1.0, -1.0};
    for (int k = 0; k < 4; ++k) {
      A_in(r + 1 + k, 3 * i + 0) = sx[k];
      A_in(r + 1 + k, 3 * i + 1) = sy[k];
      A_in(r + 1 + k, 3 * i + 2) = -mu;
      A_in(r + 1 + k, 3 * nf + 6 + (k < 2 ? 0 : 1)) = -1.0;
    }
  }

  const QpResult res = qp_solve(P, q, A_eq, b_eq, A_in, l_in, u_in, 1e-10);
  if (res.status != QpStatus::kSolved)
    throw std::runtime_error(std::string("allocate_forces: QP ") + to_string(res.status));

  ForceAllocation out;
  out.forces.resize(static_cast<std::size_t>(nf));
  Eigen::Matrix<double, 6, 1> achieved = Eigen::Matrix<double, 6, 1>::Zero();
  for (int i = 0; i < nf; ++i) {
    const Eigen::Vector3d f = res.x.segment<3>(3 * i);
    out.forces[static_cast<std::size_t>(i)] = f;
    achieved.head<3>() += f;
    achieved.tail<3>() += feet_rel_com[static_cast<std::size_t>(i)].cross(f);
  }
  out.eta = res.x.segment<6>(3 * nf);
  out.zeta1 = res.x[3 * nf + 6];
  out.zeta2 = res.x[3 * nf + 7];
  out.wrench_residual = (achieved - w.vec()).norm();
  return out;
}

Eigen::Vector3d leg_impedance_torque(const Eigen::Matrix3d& leg_jac, const Eigen::Vector3d& force,
                                     const Eigen::Vector3d& foot_pos_ref,
                                     const Eigen::Vector3d& foot_vel_ref,
                                     const Eigen::Vector3d& foot_pos,
                                     const Eigen::Vector3d& foot_vel, const WbcGains& gains) {
  const Eigen::Vector3d f = force + gains.imp_K.cwiseProduct(foot_pos_ref - foot_pos) +
                            gains.imp_D.cwiseProduct(foot_vel_ref - foot_vel);
  return leg_jac.transpose() * f;
}

}  // namespace quadplan
