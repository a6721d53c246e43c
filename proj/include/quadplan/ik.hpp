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

#ifndef QUADPLAN_IK_HPP_
#define QUADPLAN_IK_HPP_

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "quadplan/centopt.hpp"
#include "quadplan/gait.hpp"
#include "quadplan/model.hpp"

namespace quadplan {

struct IkWeights {
  double com = 10.0;
  double orient = 10.0;
  double feet = 100.0;
  double posture = 0.1;
  double damping = 1e-6;
  double k_fuse = 5.0;  // CoM position feedback into the momentum feedforward
  double k_ori = 5.0;
  double k_post = 1.0;
  double k_foot = 10.0;  // swing-foot position feedback during rollout
};

struct IkTarget {
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Vector3d lin_momentum = Eigen::Vector3d::Zero();
  Eigen::Vector3d ang_momentum = Eigen::Vector3d::Zero();
  Eigen::Quaterniond base_orient_ref = Eigen::Quaterniond::Identity();
};

/// Weighted damped least-squares velocity over four task groups: CoM velocity
/// (momentum feedforward fused with CoM position feedback), base angular
/// velocity, one linear-velocity task per foot, and posture regularization.
Eigen::Matrix<double, kGenVelDim, 1> ik_step(const WholeBodyState& q, const IkTarget& des,
                                             const std::array<Eigen::Vector3d, kNumLegs>& foot_vel,
                                             const RobotModel& model, const IkWeights& w = {});

// Supplies the centroidal reference one step at a time. `query` sees the
// current whole-body state so learned predictors can close the loop on it.
class CentroidalSource {
 public:
  virtual ~CentroidalSource() = default;
  // Returns the desired state at the end of step `step` and the contact
  // wrench applied over it.
  virtual void query(int step, const WholeBodyState& q, CentroidalState* state_next,
                     Eigen::Matrix<double, 6, 1>* wrench) = 0;
};

class TrajectorySource final : public CentroidalSource {
 public:
  explicit TrajectorySource(const CentroidalTrajectory& traj) : traj_(traj) {}
  void query(int step, const WholeBodyState& q, CentroidalState* state_next,
             Eigen::Matrix<double, 6, 1>* wrench) override;

 private:
  const CentroidalTrajectory& traj_;
};

struct WholeBodyPlan {
  std::vector<WholeBodyState> states;                      // horizon + 1
  std::vector<Eigen::Matrix<double, kGenVelDim, 1>> vels;  // horizon
  std::vector<CentroidalState> cent_refs;                  // horizon + 1
  std::vector<Eigen::Matrix<double, 6, 1>> wrench_refs;    // horizon
  std::vector<std::array<FootRef, kNumLegs>> foot_refs;    // horizon
  double dt = 0.01;
  int joint_limit_violations = 0;

  int horizon() const { return static_cast<int>(vels.size()); }
};

/// Integrates ik_step velocities through the whole description: query source,
/// solve for a generalized velocity, integrate, repeat.
WholeBodyPlan rollout(const MotionDescription& description, CentroidalSource& source,
                      const RobotModel& model, const IkWeights& weights = {});

}  // namespace quadplan

#endif  // QUADPLAN_IK_HPP_
