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

#ifndef QUADPLAN_GAIT_HPP_
#define QUADPLAN_GAIT_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadplan/model.hpp"
#include "quadplan/rng.hpp"

namespace quadplan {

// One contiguous contact or swing interval of a single effector.
// Phases of one effector tile [0, duration] with no gaps or overlaps.
struct ContactPhase {
  int effector = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  Eigen::Vector3d stance_pos = Eigen::Vector3d::Zero();  // landing target during swing
  bool in_stance = true;
};

struct ContactPlan {
  std::array<std::vector<ContactPhase>, kNumLegs> phases;
  double duration = 0.0;
};

// Ground-plane pose (x, y, yaw) the network consumes motion chunks in.
struct MotionPattern {
  int index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  bool is_last = false;
};

struct ComViaPoint {
  double t = 0.0;
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
};

struct MotionDescription {
  std::string tag;  // "walk", "jump", "marathon"
  ContactPlan plan;
  std::vector<MotionPattern> patterns;
  std::vector<ComViaPoint> com_via_points;
  double dt = 0.01;
  int horizon = 0;  // steps; horizon * dt == plan.duration
  double step_height = 0.05;

  double duration() const { return plan.duration; }
};

// Swing order within a cycle: front left, hind right, front right, hind left.
extern const std::array<int, kNumLegs> kSwingOrder;

struct WalkTiming {
  double t_init = 0.07;   // leading full stance
  double t_swing = 0.20;  // single-leg swing
  double t_dwell = 0.03;  // full stance after each swing
  double t_final = 0.07;  // trailing full stance
  double step_height = 0.05;
  double max_step_len = 0.08;

  // 3 cycles span 2.90 s.
  static WalkTiming quick() { return {}; }
  // 10 cycles span 14.1 s; 50 span 70.1 s.
  static WalkTiming steady() { return {0.05, 0.20, 0.15, 0.05, 0.05, 0.08}; }

  double cycle_duration() const { return 4.0 * (t_swing + t_dwell); }
  double total_duration(int n_cycles) const {
    return t_init + n_cycles * cycle_duration() + t_final;
  }
};

struct JumpTiming {
  double t_init = 0.10;
  double t_prep = 0.78;    // stance before takeoff
  double t_flight = 0.30;  // all feet airborne
  double t_final = 0.10;
  double max_jump_len = 0.15;
  // Displacement must satisfy |d| <= ballistic_bound * g * t_flight^2.
  double ballistic_bound = 0.5;

  // 10 jumps span 11.0 s.
  static JumpTiming standard() { return {}; }

  double total_duration(int n_jumps) const {
    return t_init + n_jumps * (t_prep + t_flight) + t_final;
  }
};

/// One cycle = 4 single-leg swings in kSwingOrder, each followed by a short
/// full stance; every cycle shifts all footholds by directions[cycle].
MotionDescription gen_static_walk(const RobotModel& model, int n_cycles,
                                  const std::vector<Eigen::Vector2d>& directions,
                                  const WalkTiming& timing = WalkTiming::quick());

/// Each jump: full stance, 4-foot flight, landing at displaced footholds.
MotionDescription gen_jump(const RobotModel& model, int n_jumps,
                           const std::vector<Eigen::Vector2d>& directions,
                           const JumpTiming& timing = JumpTiming::standard());

/// n_steps walk cycles with directions drawn uniformly from a disk of radius
/// timing.max_step_len. Deterministic given the RNG state.
MotionDescription gen_marathon(const RobotModel& model, int n_steps, Rng& rng,
                               const WalkTiming& timing = WalkTiming::steady());

struct SwingSample {
  Eigen::Vector3d pos;
  Eigen::Vector3d vel;
};

/// Interpolant between two stance positions over [prev.t_end, next.t_start]:
/// xy follow a raised-cosine blend, z adds a sin^2 bell of height step_height.
/// Boundary velocities are zero.
SwingSample swing_position(const ContactPhase& prev_stance, const ContactPhase& next_stance,
                           double step_height, double t);

/// Phase of `effector` containing time t (half-open intervals, last closed).
const ContactPhase& phase_at(const ContactPlan& plan, int effector, double t);

struct FootRef {
  Eigen::Vector3d pos;
  Eigen::Vector3d vel;
  bool in_stance;
};

/// Stance position or swing interpolant of one effector at time t.
FootRef foot_reference(const MotionDescription& d, int effector, double t);

/// Pattern containing time t.
const MotionPattern& pattern_at(const MotionDescription& d, double t);

/// Piecewise-linear interpolation of the CoM via points.
Eigen::Vector3d com_reference(const MotionDescription& d, double t);

// 2D rigid transforms between world and a pattern's ground-plane frame.
// Points translate and rotate in xy, z passes through; vectors rotate only.
Eigen::Vector3d pattern_to_local_point(const MotionPattern& f, const Eigen::Vector3d& p_world);
Eigen::Vector3d pattern_to_world_point(const MotionPattern& f, const Eigen::Vector3d& p_local);
Eigen::Vector3d pattern_to_local_vector(const MotionPattern& f, const Eigen::Vector3d& v_world);
Eigen::Vector3d pattern_to_world_vector(const MotionPattern& f, const Eigen::Vector3d& v_local);

/// CoM height of the nominal standing posture.
double nominal_com_height(const RobotModel& model);

}  // namespace quadplan

#endif  // QUADPLAN_GAIT_HPP_
