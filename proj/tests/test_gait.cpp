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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "quadplan/model.hpp"
#include "quadplan/rng.hpp"

namespace quadplan {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Eigen::Vector2d> constant_directions(int n, const Eigen::Vector2d& d) {
  return std::vector<Eigen::Vector2d>(static_cast<std::size_t>(n), d);
}

// Sign-consistent cross-product test for a point inside a 2D triangle.
bool point_in_triangle(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  auto side = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v, const Eigen::Vector2d& q) {
    return (v.x() - u.x()) * (q.y() - u.y()) - (v.y() - u.y()) * (q.x() - u.x());
  };
  const double d1 = side(a, b, p), d2 = side(b, c, p), d3 = side(c, a, p);
  const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(has_neg && has_pos);
}

TEST_CASE("walk durations match the documented timings") {
  const RobotModel model = RobotModel::desk_default();
  const auto quick = gen_static_walk(model, 3, constant_directions(3, {0.05, 0.0}));
  CHECK(quick.duration() == doctest::Approx(2.90).epsilon(1e-12));
  CHECK(quick.horizon == 290);
  CHECK(std::abs(quick.horizon * quick.dt - quick.duration()) <= quick.dt);

  const auto steady10 =
      gen_static_walk(model, 10, constant_directions(10, {0.05, 0.0}), WalkTiming::steady());
  CHECK(steady10.duration() == doctest::Approx(14.1).epsilon(1e-12));
  const auto steady50 =
      gen_static_walk(model, 50, constant_directions(50, {0.0, 0.0}), WalkTiming::steady());
  CHECK(steady50.duration() == doctest::Approx(70.1).epsilon(1e-12));
}

TEST_CASE("zero directions step in place on the nominal footholds") {
  const RobotModel model = RobotModel::desk_default();
  const auto d = gen_static_walk(model, 3, constant_directions(3, {0.0, 0.0}));
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const ContactPhase& ph : d.plan.phases[leg]) {
      CHECK((ph.stance_pos - model.nominal_foothold(leg)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("over-long walk directions are rejected with the bound in the message") {
  const RobotModel model = RobotModel::desk_default();
  const WalkTiming timing;
  const Eigen::Vector2d too_far(1.5 * timing.max_step_len, 0.0);
  try {
    gen_static_walk(model, 1, constant_directions(1, too_far), timing);
    FAIL("expected std::invalid_argument");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("0.08") != std::string::npos);
  }
}

TEST_CASE("swing order within a cycle is FL, HR, FR, HL") {
  CHECK(kSwingOrder == std::array<int, kNumLegs>{FL, HR, FR, HL});
  const RobotModel model = RobotModel::desk_default();
  const auto d = gen_static_walk(model, 2, constant_directions(2, {0.03, 0.01}));
  // Collect swing phases of all legs sorted by start time.
  std::vector<const ContactPhase*> swings;
  for (int leg = 0; leg < kNumLegs; ++leg)
    for (const ContactPhase& ph : d.plan.phases[leg])
      if (!ph.in_stance) swings.push_back(&ph);
  std::sort(swings.begin(), swings.end(),
            [](const ContactPhase* a, const ContactPhase* b) { return a->t_start < b->t_start; });
  REQUIRE(swings.size() == 8);
  for (std::size_t i = 0; i < swings.size(); ++i) {
    CHECK(swings[i]->effector == kSwingOrder[i % kNumLegs]);
    if (i > 0) CHECK(swings[i]->t_start >= swings[i - 1]->t_end - 1e-12);  // one leg at a time
  }
}

TEST_CASE("phases of every effector tile the duration") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(40);
  std::vector<Eigen::Vector2d> dirs;
  for (int i = 0; i < 4; ++i) dirs.push_back(rng.disk(0.08));
  const auto d = gen_static_walk(model, 4, dirs);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const auto& phases = d.plan.phases[leg];
    REQUIRE(!phases.empty());
    CHECK(phases.front().t_start == doctest::Approx(0.0));
    CHECK(phases.back().t_end == doctest::Approx(d.duration()));
    for (std::size_t i = 0; i + 1 < phases.size(); ++i) {
      CHECK(phases[i].t_end == doctest::Approx(phases[i + 1].t_start).epsilon(1e-12));
      CHECK(phases[i].t_start < phases[i].t_end);
    }
    // Exactly one phase contains each sample; phase_at agrees.
    for (double t = 0.0; t <= d.duration() + 1e-9; t += 0.007) {
      const double tc = std::min(t, d.duration());
      int hits = 0;
      for (std::size_t i = 0; i < phases.size(); ++i) {
        const bool last = i + 1 == phases.size();
        if (tc >= phases[i].t_start && (tc < phases[i].t_end || (last && tc <= phases[i].t_end)))
          ++hits;
      }
      CHECK(hits == 1);
      const ContactPhase& ph = phase_at(d.plan, leg, tc);
      CHECK(ph.t_start <= tc + 1e-12);
      CHECK(tc <= ph.t_end + 1e-12);
    }
  }
}

TEST_CASE("patterns partition the duration with one last flag") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(41);
  std::vector<Eigen::Vector2d> dirs;
  for (int i = 0; i < 5; ++i) dirs.push_back(rng.disk(0.08));
  const auto d = gen_static_walk(model, 5, dirs);
  REQUIRE(!d.patterns.empty());
  CHECK(d.patterns.front().t_start == doctest::Approx(0.0));
  CHECK(d.patterns.back().t_end == doctest::Approx(d.duration()));
  int last_count = 0;
  for (std::size_t i = 0; i < d.patterns.size(); ++i) {
    CHECK(d.patterns[i].index == static_cast<int>(i));
    if (i + 1 < d.patterns.size())
      CHECK(d.patterns[i].t_end == doctest::Approx(d.patterns[i + 1].t_start).epsilon(1e-12));
    if (d.patterns[i].is_last) ++last_count;
  }
  CHECK(last_count == 1);
  CHECK(d.patterns.back().is_last);
  // pattern_at picks the pattern containing t.
  for (double t = 0.0; t < d.duration(); t += 0.01) {
    const MotionPattern& p = pattern_at(d, t);
    CHECK(p.t_start <= t + 1e-12);
    CHECK(t <= p.t_end + 1e-12);
  }
}

TEST_CASE("stance triangles support the com reference during swings") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(42);
  std::vector<Eigen::Vector2d> dirs;
  for (int i = 0; i < 3; ++i) dirs.push_back(rng.disk(0.08));
  const auto d = gen_static_walk(model, 3, dirs);
  int swings_checked = 0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const ContactPhase& ph : d.plan.phases[leg]) {
      if (ph.in_stance) continue;
      const double mid = 0.5 * (ph.t_start + ph.t_end);
      std::vector<Eigen::Vector2d> support;
      for (int other = 0; other < kNumLegs; ++other) {
        if (other == leg) continue;
        const ContactPhase& sp = phase_at(d.plan, other, mid);
        REQUIRE(sp.in_stance);
        support.push_back(sp.stance_pos.head<2>());
      }
      const Eigen::Vector2d com = com_reference(d, mid).head<2>();
      CHECK(point_in_triangle(com, support[0], support[1], support[2]));
      ++swings_checked;
    }
  }
  CHECK(swings_checked == 12);
}

TEST_CASE("walk footholds accumulate the direction prefix sums") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(43);
  std::vector<Eigen::Vector2d> dirs;
  for (int i = 0; i < 4; ++i) dirs.push_back(rng.disk(0.08));
  const auto d = gen_static_walk(model, 4, dirs);
  Eigen::Vector2d total = Eigen::Vector2d::Zero();
  for (const auto& dir : dirs) total += dir;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const ContactPhase& last = d.plan.phases[leg].back();
    REQUIRE(last.in_stance);
    const Eigen::Vector2d expected = model.nominal_foothold(leg).head<2>() + total;
    CHECK((last.stance_pos.head<2>() - expected).norm() <= 1e-12);
    CHECK(last.stance_pos.z() == doctest::Approx(0.0));
  }
}

TEST_CASE("jump durations and flight phases match the plan") {
  const RobotModel model = RobotModel::desk_default();
  const auto d = gen_jump(model, 10, constant_directions(10, {0.05, 0.0}));
  CHECK(d.duration() == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(d.patterns.size() == 10);  // one pattern per jump

  const auto single = gen_jump(model, 1, constant_directions(1, {0.08, 0.02}));
  // During flight no effector is in stance; outside flight all four are.
  int flight_samples = 0;
  for (double t = 0.0; t < single.duration(); t += 0.004) {
    int in_stance = 0;
    for (int leg = 0; leg < kNumLegs; ++leg)
      if (phase_at(single.plan, leg, t).in_stance) ++in_stance;
    CHECK((in_stance == 0 || in_stance == kNumLegs));
    if (in_stance == 0) ++flight_samples;
  }
  CHECK(flight_samples > 0);
  // Flight length matches the timing's t_flight to one sample.
  const JumpTiming timing;
  CHECK(flight_samples * 0.004 == doctest::Approx(timing.t_flight).epsilon(0.05));
}

TEST_CASE("zero-direction jumps land on the takeoff footholds") {
  const RobotModel model = RobotModel::desk_default();
  const auto d = gen_jump(model, 2, constant_directions(2, {0.0, 0.0}));
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const ContactPhase& ph : d.plan.phases[leg]) {
      if (!ph.in_stance) continue;
      CHECK((ph.stance_pos - model.nominal_foothold(leg)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("ballistically unreachable jumps are rejected") {
  const RobotModel model = RobotModel::desk_default();
  JumpTiming timing;
  timing.max_jump_len = 10.0;  // lift the sampling bound; physics still applies
  const double limit = timing.ballistic_bound * model.gravity * timing.t_flight * timing.t_flight;
  CHECK_THROWS_AS(
      gen_jump(model, 1, constant_directions(1, {1.01 * limit, 0.0}), timing),
      std::invalid_argument);
  CHECK_NOTHROW(gen_jump(model, 1, constant_directions(1, {0.99 * limit, 0.0}), timing));
}

TEST_CASE("marathon generation is deterministic and counts its swings") {
  const RobotModel model = RobotModel::desk_default();
  Rng r1(7), r2(7);
  const auto a = gen_marathon(model, 50, r1);
  const auto b = gen_marathon(model, 50, r2);
  CHECK(a.duration() == doctest::Approx(70.1).epsilon(1e-12));
  CHECK(a.tag == "marathon");
  int swings = 0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    REQUIRE(a.plan.phases[leg].size() == b.plan.phases[leg].size());
    for (std::size_t i = 0; i < a.plan.phases[leg].size(); ++i) {
      const ContactPhase& pa = a.plan.phases[leg][i];
      const ContactPhase& pb = b.plan.phases[leg][i];
      CHECK(pa.t_start == pb.t_start);
      CHECK(pa.t_end == pb.t_end);
      CHECK(pa.stance_pos == pb.stance_pos);
      CHECK(pa.in_stance == pb.in_stance);
      if (!pa.in_stance) ++swings;
    }
  }
  CHECK(swings == 4 * 50);  // every step-cycle swings all four legs once
}

TEST_CASE("marathon displacement equals the prefix sum of its samples") {
  const RobotModel model = RobotModel::desk_default();
  const int n = 20;
  Rng r1(99), r2(99);
  const auto d = gen_marathon(model, n, r1);
  // The generator draws one disk sample per step in order before building
  // the plan; replay the draws to get the independent prefix sum.
  Eigen::Vector2d total = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) total += r2.disk(WalkTiming::steady().max_step_len);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector2d expected = model.nominal_foothold(leg).head<2>() + total;
    CHECK((d.plan.phases[leg].back().stance_pos.head<2>() - expected).norm() <= 1e-12);
  }
}

TEST_CASE("swing interpolant hits its boundary conditions") {
  ContactPhase prev;
  prev.t_start = 0.0;
  prev.t_end = 1.0;
  prev.stance_pos = {0.1, -0.2, 0.0};
  ContactPhase next = prev;
  next.t_start = 1.5;
  next.t_end = 2.0;
  next.stance_pos = {0.25, -0.1, 0.0};
  const double h = 0.05;

  const SwingSample start = swing_position(prev, next, h, prev.t_end);
  CHECK((start.pos - prev.stance_pos).norm() <= 1e-12);
  CHECK(start.vel.norm() <= 1e-12);
  const SwingSample end = swing_position(prev, next, h, next.t_start);
  CHECK((end.pos - next.stance_pos).norm() <= 1e-12);
  CHECK(end.vel.norm() <= 1e-12);

  // Equal start and end: apex is exactly the step height at the midpoint.
  next.stance_pos = prev.stance_pos;
  const SwingSample mid = swing_position(prev, next, h, 0.5 * (prev.t_end + next.t_start));
  CHECK(mid.pos.z() == doctest::Approx(prev.stance_pos.z() + h).epsilon(1e-12));
  CHECK((mid.pos.head<2>() - prev.stance_pos.head<2>()).norm() <= 1e-12);
}

TEST_CASE("swing velocity matches finite differences of position") {
  ContactPhase prev;
  prev.t_end = 0.3;
  prev.stance_pos = {0.0, 0.1, 0.0};
  ContactPhase next;
  next.t_start = 0.5;
  next.t_end = 0.7;
  next.stance_pos = {0.08, 0.04, 0.0};
  const double h = 1e-7;
  for (double t = 0.31; t < 0.49; t += 0.01) {
    const SwingSample s = swing_position(prev, next, 0.05, t);
    const Eigen::Vector3d fd = (swing_position(prev, next, 0.05, t + h).pos -
                                swing_position(prev, next, 0.05, t - h).pos) /
                               (2.0 * h);
    CHECK((s.vel - fd).norm() <= 1e-6);
  }
}

TEST_CASE("identity pattern frame is a no-op") {
  MotionPattern f;
  const Eigen::Vector3d p(0.3, -0.4, 0.25);
  CHECK((pattern_to_local_point(f, p) - p).norm() == doctest::Approx(0.0));
  CHECK((pattern_to_world_point(f, p) - p).norm() == doctest::Approx(0.0));
  CHECK((pattern_to_local_vector(f, p) - p).norm() == doctest::Approx(0.0));
}

TEST_CASE("pattern frame matches the composed 2d rigid transform") {
  MotionPattern f;
  f.x = 1.0;
  f.y = 2.0;
  f.yaw = kPi / 2;
  const Eigen::Vector3d world(1.0, 0.0, 0.3);
  const Eigen::Vector3d local = pattern_to_local_point(f, world);
  CHECK((local - Eigen::Vector3d(-2.0, 0.0, 0.3)).norm() <= 1e-12);

  Rng rng(44);
  for (int i = 0; i < 200; ++i) {
    MotionPattern g;
    g.x = rng.normal();
    g.y = rng.normal();
    g.yaw = (rng.uniform() - 0.5) * 2 * kPi;
    // Homogeneous 2x3 oracle: local = R(-yaw) * (p - t).
    Eigen::Matrix2d R;
    R << std::cos(g.yaw), -std::sin(g.yaw), std::sin(g.yaw), std::cos(g.yaw);
    const Eigen::Vector3d p(rng.normal(), rng.normal(), rng.normal());
    const Eigen::Vector2d expect = R.transpose() * (p.head<2>() - Eigen::Vector2d(g.x, g.y));
    const Eigen::Vector3d got = pattern_to_local_point(g, p);
    CHECK((got.head<2>() - expect).norm() <= 1e-12);
    CHECK(got.z() == doctest::Approx(p.z()));
    // Vectors rotate without translating.
    const Eigen::Vector3d gv = pattern_to_local_vector(g, p);
    CHECK((gv.head<2>() - R.transpose() * p.head<2>()).norm() <= 1e-12);
    CHECK(gv.z() == doctest::Approx(p.z()));
  }
}

TEST_CASE("pattern transforms round trip") {
  Rng rng(45);
  for (int i = 0; i < 300; ++i) {
    MotionPattern f;
    f.x = 2.0 * rng.normal();
    f.y = 2.0 * rng.normal();
    f.yaw = (rng.uniform() - 0.5) * 2 * kPi;
    const Eigen::Vector3d p(rng.normal(), rng.normal(), rng.normal());
    CHECK((pattern_to_world_point(f, pattern_to_local_point(f, p)) - p).norm() <= 1e-12);
    CHECK((pattern_to_local_point(f, pattern_to_world_point(f, p)) - p).norm() <= 1e-12);
    CHECK((pattern_to_world_vector(f, pattern_to_local_vector(f, p)) - p).norm() <= 1e-12);
  }
}

TEST_CASE("com reference interpolates the via points linearly") {
  const RobotModel model = RobotModel::desk_default();
  Rng rng(46);
  std::vector<Eigen::Vector2d> dirs;
  for (int i = 0; i < 3; ++i) dirs.push_back(rng.disk(0.08));
  const auto d = gen_static_walk(model, 3, dirs);
  REQUIRE(d.com_via_points.size() >= 2);
  for (const ComViaPoint& via : d.com_via_points) {
    CHECK((com_reference(d, via.t) - via.pos).norm() <= 1e-12);
  }
  for (std::size_t i = 0; i + 1 < d.com_via_points.size(); ++i) {
    const ComViaPoint& a = d.com_via_points[i];
    const ComViaPoint& b = d.com_via_points[i + 1];
    const double mid = 0.5 * (a.t + b.t);
    CHECK((com_reference(d, mid) - 0.5 * (a.pos + b.pos)).norm() <= 1e-12);
  }
  // Clamped outside the via range.
  CHECK((com_reference(d, -1.0) - d.com_via_points.front().pos).norm() <= 1e-12);
  CHECK((com_reference(d, d.duration() + 1.0) - d.com_via_points.back().pos).norm() <= 1e-12);
}

TEST_CASE("nominal com height matches the kinematic model") {
  const RobotModel model = RobotModel::desk_default();
  const WholeBodyState q = WholeBodyState::nominal(model);
  CHECK(nominal_com_height(model) ==
        doctest::Approx(com_of(model, q).com.z()).epsilon(1e-12));
}

}  // namespace
}  // namespace quadplan
