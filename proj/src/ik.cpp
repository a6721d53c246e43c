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

#include "quadplan/ik.hpp"

#include "quadplan/rotation.hpp"

namespace quadplan {

Eigen::Matrix<double, kGenVelDim, 1> ik_step(const WholeBodyState& q, const IkTarget& des,
                                             const std::array<Eigen::Vector3d, kNumLegs>& foot_vel,
                                             const RobotModel& model, const IkWeights& w) {
  using Mat = Eigen::Matrix<double, kGenVelDim, kGenVelDim>;
  using Vec = Eigen::Matrix<double, kGenVelDim, 1>;
  Mat H = Mat::Identity() * w.damping;
  Vec g = Vec::Zero();
  auto add_task = [&](const Eigen::Matrix<double, 3, kGenVelDim>& J, const Eigen::Vector3d& b,
                      double weight) {
    H += weight * J.transpose() * J;
    g += weight * J.transpose() * b;
  };

  const ComResult com = com_of(model, q);
  const Eigen::Vector3d com_vel_des =
      des.lin_momentum / model.mass + w.k_fuse * (des.com - com.com);
  add_task(com.jacobian, com_vel_des, w.com);

  Eigen::Matrix<double, 3, kGenVelDim> J_ang = Eigen::Matrix<double, 3, kGenVelDim>::Zero();
  J_ang.block<3, 3>(0, 3).setIdentity();
  const Eigen::Vector3d omega_des = w.k_ori * quat_boxminus(des.base_orient_ref, q.base_quat) +
                                    model.base_inertia.inverse() * des.ang_momentum;
  add_task(J_ang, omega_des, w.orient);

  for (int leg = 0; leg < kNumLegs; ++leg)
    add_task(foot_jacobian(model, q, leg), foot_vel[static_cast<std::size_t>(leg)], w.feet);

  Eigen::Matrix<double, kNumJoints, kGenVelDim> J_post =
      Eigen::Matrix<double, kNumJoints, kGenVelDim>::Zero();
  J_post.block<kNumJoints, kNumJoints>(0, 6).setIdentity();
  const Eigen::Matrix<double, kNumJoints, 1> post_des =
      w.k_post * (model.nominal_posture - q.joint_pos);
  H += w.posture * J_post.transpose() * J_post;
  g += w.posture * J_post.transpose() * post_des;

  return H.ldlt().solve(g);
}

void TrajectorySource::query(int step, const WholeBodyState& /*q*/, CentroidalState* state_next,
                             Eigen::Matrix<double, 6, 1>* wrench) {
  const std::size_t s = static_cast<std::size_t>(step);
  *state_next = traj_.states[s + 1];
  *wrench = contact_wrench(traj_.forces[s], traj_.foot_pos[s], traj_.states[s + 1].com);
}

WholeBodyPlan rollout(const MotionDescription& description, CentroidalSource& source,
                      const RobotModel& model, const IkWeights& weights) {
  const int N = description.horizon;
  WholeBodyPlan plan;
  plan.dt = description.dt;
  plan.states.reserve(static_cast<std::size_t>(N) + 1);
  plan.vels.reserve(static_cast<std::size_t>(N));
  plan.cent_refs.reserve(static_cast<std::size_t>(N) + 1);
  plan.wrench_refs.reserve(static_cast<std::size_t>(N));
  plan.foot_refs.reserve(static_cast<std::size_t>(N));

  WholeBodyState q = WholeBodyState::nominal(model);
  plan.states.push_back(q);
  CentroidalState start;
  start.com = com_of(model, q).com;
  plan.cent_refs.push_back(start);

  for (int t = 0; t < N; ++t) {
    CentroidalState ref;
    Eigen::Matrix<double, 6, 1> wrench;
    source.query(t, q, &ref, &wrench);

    const double t_mid = (t + 0.5) * description.dt;
    std::array<FootRef, kNumLegs> frefs;
    std::array<Eigen::Vector3d, kNumLegs> foot_vel;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      frefs[static_cast<std::size_t>(leg)] = foot_reference(description, leg, t_mid);
      const FootRef& fr = frefs[static_cast<std::size_t>(leg)];
      if (fr.in_stance) {
        foot_vel[static_cast<std::size_t>(leg)] = Eigen::Vector3d::Zero();
      } else {
        const Eigen::Vector3d actual = foot_position(model, q, leg);
        foot_vel[static_cast<std::size_t>(leg)] = fr.vel + weights.k_foot * (fr.pos - actual);
      }
    }

    IkTarget target;
    target.com = ref.com;
    target.lin_momentum = ref.lin_momentum;
    target.ang_momentum = ref.ang_momentum;
    const auto v = ik_step(q, target, foot_vel, model, weights);

    q.set_gen_vel(v);
    q.integrate(description.dt);
    if ((q.joint_pos.array() < model.joint_lower.array()).any() ||
        (q.joint_pos.array() > model.joint_upper.array()).any())
      ++plan.joint_limit_violations;

    plan.vels.push_back(v);
    plan.states.push_back(q);
    plan.cent_refs.push_back(ref);
    plan.wrench_refs.push_back(wrench);
    plan.foot_refs.push_back(frefs);
  }
  return plan;
}

}  // namespace quadplan
