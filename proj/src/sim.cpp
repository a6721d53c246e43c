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

#include "quadplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadplan/rng.hpp"
#include "quadplan/rotation.hpp"

namespace quadplan {

PlantState PlantState::at_rest(const RobotModel& model, const WholeBodyState& q0) {
  PlantState s;
  s.q = q0;
  s.q.base_lin_vel.setZero();
  s.q.base_ang_vel.setZero();
  s.q.joint_vel.setZero();
  s.cent.com = com_of(model, s.q).com;
  s.cent.lin_momentum.setZero();
  s.cent.ang_momentum.setZero();
  return s;
}

PlantState plant_step(const PlantState& s, const std::vector<Eigen::Vector3d>& forces,
                      const std::vector<Eigen::Vector3d>& foot_pos,
                      const Eigen::Matrix<double, kNumJoints, 1>& joint_vel_cmd,
                      const RobotModel& model, double dt, const Eigen::Vector3d& disturbance) {
  if (forces.size() != foot_pos.size())
    throw std::invalid_argument("plant_step: forces/foot_pos size mismatch");

  PlantState n = s;
  Eigen::Vector3d f_sum = disturbance;
  for (const auto& f : forces) f_sum += f;
  const Eigen::Vector3d gravity(0.0, 0.0, -model.mass * model.gravity);

  // Momentum first, then position: matches the planner's integration scheme.
  n.cent.lin_momentum += (gravity + f_sum) * dt;
  n.cent.com += (dt / model.mass) * n.cent.lin_momentum;
  for (std::size_t i = 0; i < forces.size(); ++i)
    n.cent.ang_momentum += (foot_pos[i] - n.cent.com).cross(forces[i]) * dt;

  const Eigen::Matrix3d R = s.q.base_quat.toRotationMatrix();
  const Eigen::Vector3d omega =
      R * model.base_inertia.ldlt().solve(R.transpose() * n.cent.ang_momentum);

  // Exact first-order lag toward the commanded joint velocities.
  const double beta = 1.0 - std::exp(-dt / kJointLagTau);
  n.q.joint_vel = s.q.joint_vel + beta * (joint_vel_cmd - s.q.joint_vel);

  // Base linear velocity keeps the mirror's FK CoM on the centroidal CoM:
  // the CoM Jacobian's base-translation block is the identity.
  const ComResult cr = com_of(model, s.q);
  const Eigen::Vector3d v_base = n.cent.lin_momentum / model.mass -
                                 cr.jacobian.middleCols<3>(3) * omega -
                                 cr.jacobian.rightCols<kNumJoints>() * n.q.joint_vel;

  Eigen::Matrix<double, kGenVelDim, 1> v;
  v << v_base, omega, n.q.joint_vel;
  n.q.set_gen_vel(v);
  n.q.integrate(dt);
  n.time = s.time + dt;
  return n;
}

TrackingLog run_tracking(const WholeBodyPlan& plan, const RobotModel& model,
                         const WbcGains& gains, const Disturbance& disturbance) {
  gains.validate();
  if (plan.horizon() <= 0) throw std::invalid_argument("run_tracking: empty plan");
  Rng rng(disturbance.seed);

  TrackingLog log;
  log.dt = plan.dt;
  log.steps.reserve(static_cast<std::size_t>(plan.horizon()));

  PlantState s = PlantState::at_rest(model, plan.states.front());
  s.cent = plan.cent_refs.front();

  for (int t = 0; t < plan.horizon(); ++t) {
    const std::size_t ts = static_cast<std::size_t>(t);
    TrackingStep rec;
    rec.t = t * plan.dt;
    rec.planned = plan.cent_refs[ts];
    rec.planned_quat = plan.states[ts].base_quat;
    rec.simulated = s.cent;
    rec.simulated_quat = s.q.base_quat;

    WbcSetpoint ref, meas;
    ref.wrench = Wrench::from_vec(plan.wrench_refs[ts]);
    ref.com = plan.cent_refs[ts].com;
    ref.lin_momentum = plan.cent_refs[ts].lin_momentum;
    ref.ang_momentum = plan.cent_refs[ts].ang_momentum;
    ref.base_quat = plan.states[ts].base_quat;
    meas.com = s.cent.com;
    meas.lin_momentum = s.cent.lin_momentum;
    meas.ang_momentum = s.cent.ang_momentum;
    meas.base_quat = s.q.base_quat;
    const Wrench w = compute_wrench(ref, meas, gains);

    std::vector<Eigen::Vector3d> stance_feet, rel_com;
    std::vector<int> stance_legs;
    for (int e = 0; e < kNumLegs; ++e) {
      rec.in_stance[static_cast<std::size_t>(e)] = plan.foot_refs[ts][static_cast<std::size_t>(e)].in_stance;
      if (!rec.in_stance[static_cast<std::size_t>(e)]) continue;
      stance_legs.push_back(e);
      stance_feet.push_back(foot_position(model, s.q, e));
      rel_com.push_back(stance_feet.back() - s.cent.com);
    }
    const ForceAllocation alloc = allocate_forces(w, rel_com, gains);
    rec.eta_norm = alloc.eta_norm();
    rec.zeta1 = alloc.zeta1;
    rec.zeta2 = alloc.zeta2;

    std::vector<Eigen::Vector3d> applied(stance_legs.size());
    for (std::size_t i = 0; i < stance_legs.size(); ++i) {
      applied[i] = alloc.forces[i];
      rec.forces[static_cast<std::size_t>(stance_legs[i])] = alloc.forces[i];
    }

    const Eigen::Matrix<double, kGenVelDim, 1> v_meas = s.q.gen_vel();
    for (int e = 0; e < kNumLegs; ++e) {
      const std::size_t es = static_cast<std::size_t>(e);
      const Eigen::Vector3d f = rec.forces[es];
      const Eigen::Vector3d p_meas = foot_position(model, s.q, e);
      const Eigen::Vector3d v_foot = foot_jacobian(model, s.q, e) * v_meas;
      const FootRef& fr = plan.foot_refs[ts][es];
      rec.torques[es] = leg_impedance_torque(leg_jacobian(model, s.q, e), f, fr.pos, fr.vel,
                                             p_meas, v_foot, gains);
    }

    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    if (disturbance.force_std > 0.0)
      d = disturbance.force_std * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());

    s = plant_step(s, applied, stance_feet, plan.vels[ts].tail<kNumJoints>(), model, plan.dt, d);
    log.steps.push_back(rec);
    log.com_gap_max = std::max(log.com_gap_max, (com_of(model, s.q).com - s.cent.com).norm());

    const std::size_t next = static_cast<std::size_t>(t) + 1;
    const double ori_err = quat_boxminus(plan.states[next].base_quat, s.q.base_quat).norm();
    if (s.cent.com.z() < 0.6 * model.nominal_height || ori_err > 1.0) {
      log.fell = true;
      log.fall_step = t;
      break;
    }
  }
  return log;
}

TrackingMetrics tracking_metrics(const TrackingLog& log) {
  TrackingMetrics m;
  if (log.steps.empty()) return m;
  double com_sum = 0.0, ori_sum = 0.0;
  for (const TrackingStep& s : log.steps) {
    const double ce = (s.planned.com - s.simulated.com).norm();
    const double oe = quat_boxminus(s.planned_quat, s.simulated_quat).norm();
    com_sum += ce;
    ori_sum += oe;
    m.com_err_max = std::max(m.com_err_max, ce);
    m.ori_err_max = std::max(m.ori_err_max, oe);
  }
  m.com_err_mean = com_sum / static_cast<double>(log.steps.size());
  m.ori_err_mean = ori_sum / static_cast<double>(log.steps.size());
  return m;
}

}  // namespace quadplan
