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

#include "quadplan/gait.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quadplan {

const std::array<int, kNumLegs> kSwingOrder = {FL, HR, FR, HL};

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_directions(const std::vector<Eigen::Vector2d>& directions, std::size_t expected,
                      double max_len) {
  if (directions.size() != expected)
    throw std::invalid_argument("direction count does not match requested cycles");
  for (const auto& d : directions) {
    if (d.norm() > max_len + 1e-12) {
      std::ostringstream msg;
      msg << "step direction " << d.norm() << " m exceeds max " << max_len << " m";
      throw std::invalid_argument(msg.str());
    }
  }
}

Eigen::Vector3d lift(const Eigen::Vector2d& xy, double z) { return {xy.x(), xy.y(), z}; }

int rounded_steps(double duration, double dt) {
  return static_cast<int>(std::lround(duration / dt));
}

void finish_patterns(std::vector<MotionPattern>& patterns, double duration) {
  patterns.front().t_start = 0.0;
  patterns.back().t_end = duration;
  patterns.back().is_last = true;
}

}  // namespace

MotionDescription gen_static_walk(const RobotModel& model, int n_cycles,
                                  const std::vector<Eigen::Vector2d>& directions,
                                  const WalkTiming& timing) {
  if (n_cycles <= 0) throw std::invalid_argument("n_cycles must be positive");
  check_directions(directions, static_cast<std::size_t>(n_cycles), timing.max_step_len);

  MotionDescription d;
  d.tag = "walk";
  d.step_height = timing.step_height;
  const double T = timing.total_duration(n_cycles);
  d.plan.duration = T;
  d.horizon = rounded_steps(T, d.dt);
  const double h_com = nominal_com_height(model);

  // Footholds accumulated per cycle; all effectors complete the cycle's
  // displacement before the next cycle begins.
  std::array<Eigen::Vector2d, kNumLegs> foothold_shift;
  foothold_shift.fill(Eigen::Vector2d::Zero());
  std::array<double, kNumLegs> last_stance_start;
  last_stance_start.fill(0.0);

  d.com_via_points.push_back({0.0, lift(Eigen::Vector2d::Zero(), h_com)});

  Eigen::Vector2d accum = Eigen::Vector2d::Zero();
  for (int c = 0; c < n_cycles; ++c) {
    const double cycle_start = timing.t_init + c * timing.cycle_duration();
    d.patterns.push_back({c, cycle_start, cycle_start + timing.cycle_duration(),
                          accum.x(), accum.y(), 0.0, false});
    const Eigen::Vector2d dir = directions[static_cast<std::size_t>(c)];
    for (int s = 0; s < kNumLegs; ++s) {
      const int leg = kSwingOrder[s];
      const double swing_start = cycle_start + s * (timing.t_swing + timing.t_dwell);
      const double swing_end = swing_start + timing.t_swing;
      const Eigen::Vector2d target_shift = accum + dir;

      auto& phases = d.plan.phases[leg];
      const Eigen::Vector3d prev_pos =
          model.nominal_foothold(leg) + lift(foothold_shift[leg], 0.0);
      const Eigen::Vector3d next_pos =
          model.nominal_foothold(leg) + lift(target_shift, 0.0);
      phases.push_back({leg, last_stance_start[leg], swing_start, prev_pos, true});
      phases.push_back({leg, swing_start, swing_end, next_pos, false});
      foothold_shift[leg] = target_shift;
      last_stance_start[leg] = swing_end;

      // Keep the planned CoM inside the momentary support triangle: blend the
      // straight-line progress point toward the three stance feet's centroid.
      Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
      for (int other = 0; other < kNumLegs; ++other) {
        if (other == leg) continue;
        centroid += model.nominal_foothold(other).head<2>() + foothold_shift[other];
      }
      centroid /= 3.0;
      const Eigen::Vector2d progress = accum + dir * ((s + 0.5) / 4.0);
      const Eigen::Vector2d mid = 0.4 * progress + 0.6 * centroid;
      d.com_via_points.push_back({0.5 * (swing_start + swing_end), lift(mid, h_com)});
      d.com_via_points.push_back({swing_end, lift(accum + dir * ((s + 1.0) / 4.0), h_com)});
    }
    accum += dir;
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d pos = model.nominal_foothold(leg) + lift(foothold_shift[leg], 0.0);
    d.plan.phases[leg].push_back({leg, last_stance_start[leg], T, pos, true});
  }
  d.com_via_points.push_back({T, lift(accum, h_com)});
  finish_patterns(d.patterns, T);
  return d;
}

MotionDescription gen_jump(const RobotModel& model, int n_jumps,
                           const std::vector<Eigen::Vector2d>& directions,
                           const JumpTiming& timing) {
  if (n_jumps <= 0) throw std::invalid_argument("n_jumps must be positive");
  check_directions(directions, static_cast<std::size_t>(n_jumps), timing.max_jump_len);
  const double reach = timing.ballistic_bound * model.gravity * timing.t_flight * timing.t_flight;
  for (const auto& dir : directions) {
    if (dir.norm() > reach + 1e-12) {
      std::ostringstream msg;
      msg << "jump displacement " << dir.norm() << " m exceeds ballistic bound " << reach << " m";
      throw std::invalid_argument(msg.str());
    }
  }

  MotionDescription d;
  d.tag = "jump";
  d.step_height = 0.0;  // flight interpolation handled by the same bell shape
  const double T = timing.total_duration(n_jumps);
  d.plan.duration = T;
  d.horizon = rounded_steps(T, d.dt);
  const double h_com = nominal_com_height(model);

  std::array<double, kNumLegs> last_stance_start;
  last_stance_start.fill(0.0);
  Eigen::Vector2d accum = Eigen::Vector2d::Zero();
  d.com_via_points.push_back({0.0, lift(accum, h_com)});

  for (int j = 0; j < n_jumps; ++j) {
    const double jump_start = timing.t_init + j * (timing.t_prep + timing.t_flight);
    const double takeoff = jump_start + timing.t_prep;
    const double landing = takeoff + timing.t_flight;
    d.patterns.push_back({j, jump_start, jump_start + timing.t_prep + timing.t_flight,
                          accum.x(), accum.y(), 0.0, false});
    const Eigen::Vector2d dir = directions[static_cast<std::size_t>(j)];
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const Eigen::Vector3d prev_pos = model.nominal_foothold(leg) + lift(accum, 0.0);
      const Eigen::Vector3d next_pos = model.nominal_foothold(leg) + lift(accum + dir, 0.0);
      d.plan.phases[leg].push_back({leg, last_stance_start[leg], takeoff, prev_pos, true});
      d.plan.phases[leg].push_back({leg, takeoff, landing, next_pos, false});
      last_stance_start[leg] = landing;
    }
    d.com_via_points.push_back({takeoff, lift(accum, h_com)});
    accum += dir;
    d.com_via_points.push_back({landing, lift(accum, h_com)});
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d pos = model.nominal_foothold(leg) + lift(accum, 0.0);
    d.plan.phases[leg].push_back({leg, last_stance_start[leg], T, pos, true});
  }
  d.com_via_points.push_back({T, lift(accum, h_com)});
  finish_patterns(d.patterns, T);
  return d;
}

MotionDescription gen_marathon(const RobotModel& model, int n_steps, Rng& rng,
                               const WalkTiming& timing) {
  std::vector<Eigen::Vector2d> directions;
  directions.reserve(static_cast<std::size_t>(n_steps));
  for (int i = 0; i < n_steps; ++i) directions.push_back(rng.disk(timing.max_step_len));
  MotionDescription d = gen_static_walk(model, n_steps, directions, timing);
  d.tag = "marathon";
  return d;
}

SwingSample swing_position(const ContactPhase& prev_stance, const ContactPhase& next_stance,
                           double step_height, double t) {
  const double t0 = prev_stance.t_end;
  const double t1 = next_stance.t_start;
  const double dur = t1 - t0;
  if (dur <= 0.0) throw std::invalid_argument("swing interval is empty");
  const double tau = std::clamp((t - t0) / dur, 0.0, 1.0);
  const Eigen::Vector3d a = prev_stance.stance_pos;
  const Eigen::Vector3d b = next_stance.stance_pos;

  const double blend = 0.5 * (1.0 - std::cos(kPi * tau));
  const double dblend = 0.5 * kPi * std::sin(kPi * tau) / dur;
  const double s = std::sin(kPi * tau);
  const double bell = step_height * s * s;
  const double dbell = step_height * 2.0 * s * std::cos(kPi * tau) * kPi / dur;

  SwingSample out;
  out.pos = a + blend * (b - a) + Eigen::Vector3d(0, 0, bell);
  out.vel = dblend * (b - a) + Eigen::Vector3d(0, 0, dbell);
  return out;
}

const ContactPhase& phase_at(const ContactPlan& plan, int effector, double t) {
  const auto& phases = plan.phases[effector];
  for (const auto& ph : phases) {
    if (t >= ph.t_start && (t < ph.t_end || (&ph == &phases.back() && t <= ph.t_end))) return ph;
  }
  throw std::out_of_range("time outside contact plan");
}

FootRef foot_reference(const MotionDescription& d, int effector, double t) {
  const auto& phases = d.plan.phases[effector];
  const ContactPhase& ph = phase_at(d.plan, effector, t);
  if (ph.in_stance) return {ph.stance_pos, Eigen::Vector3d::Zero(), true};
  const std::size_t idx = static_cast<std::size_t>(&ph - phases.data());
  const SwingSample s = swing_position(phases[idx - 1], phases[idx + 1], d.step_height, t);
  return {s.pos, s.vel, false};
}

const MotionPattern& pattern_at(const MotionDescription& d, double t) {
  for (const auto& p : d.patterns) {
    if (t >= p.t_start && (t < p.t_end || (p.is_last && t <= p.t_end))) return p;
  }
  throw std::out_of_range("time outside motion patterns");
}

Eigen::Vector3d com_reference(const MotionDescription& d, double t) {
  const auto& vias = d.com_via_points;
  if (vias.empty()) throw std::logic_error("description has no CoM via points");
  if (t <= vias.front().t) return vias.front().pos;
  for (std::size_t i = 1; i < vias.size(); ++i) {
    if (t <= vias[i].t) {
      const double span = vias[i].t - vias[i - 1].t;
      const double a = span > 0.0 ? (t - vias[i - 1].t) / span : 1.0;
      return vias[i - 1].pos + a * (vias[i].pos - vias[i - 1].pos);
    }
  }
  return vias.back().pos;
}

Eigen::Vector3d pattern_to_local_point(const MotionPattern& f, const Eigen::Vector3d& p_world) {
  const double c = std::cos(f.yaw), s = std::sin(f.yaw);
  const double dx = p_world.x() - f.x, dy = p_world.y() - f.y;
  return {c * dx + s * dy, -s * dx + c * dy, p_world.z()};
}

Eigen::Vector3d pattern_to_world_point(const MotionPattern& f, const Eigen::Vector3d& p_local) {
  const double c = std::cos(f.yaw), s = std::sin(f.yaw);
  return {f.x + c * p_local.x() - s * p_local.y(), f.y + s * p_local.x() + c * p_local.y(),
          p_local.z()};
}

Eigen::Vector3d pattern_to_local_vector(const MotionPattern& f, const Eigen::Vector3d& v_world) {
  const double c = std::cos(f.yaw), s = std::sin(f.yaw);
  return {c * v_world.x() + s * v_world.y(), -s * v_world.x() + c * v_world.y(), v_world.z()};
}

Eigen::Vector3d pattern_to_world_vector(const MotionPattern& f, const Eigen::Vector3d& v_local) {
  const double c = std::cos(f.yaw), s = std::sin(f.yaw);
  return {c * v_local.x() - s * v_local.y(), s * v_local.x() + c * v_local.y(), v_local.z()};
}

double nominal_com_height(const RobotModel& model) {
  return com_of(model, WholeBodyState::nominal(model)).com.z();
}

}  // namespace quadplan
