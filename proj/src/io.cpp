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

#include "quadplan/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace quadplan {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') bad("malformed number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') bad("malformed integer '" + s + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') bad("malformed integer '" + s + "'");
  return v;
}

// Whitespace-tokenized line scanner over an in-memory artifact.
class Lines {
 public:
  Lines(const std::string& text, std::string name) : in_(text), name_(std::move(name)) {}

  // Next non-empty line as tokens; false at end of input.
  bool next(std::vector<std::string>* tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      tokens->clear();
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens->push_back(tok);
      if (!tokens->empty()) return true;
    }
    return false;
  }

  std::vector<std::string> require(std::size_t n_tokens, const std::string& what) {
    std::vector<std::string> t;
    if (!next(&t)) bad(name_ + ": unexpected end of file, expected " + what);
    if (t.size() != n_tokens)
      bad(name_ + ":" + std::to_string(line_no_) + ": expected " + what + " (" +
          std::to_string(n_tokens) + " tokens), got " + std::to_string(t.size()));
    return t;
  }

  // "key v..." line with a fixed key and arity.
  std::vector<std::string> keyed(const std::string& key, std::size_t n_values) {
    std::vector<std::string> t = require(n_values + 1, "'" + key + "'");
    if (t[0] != key) bad(name_ + ":" + std::to_string(line_no_) + ": expected '" + key +
                         "', got '" + t[0] + "'");
    return {t.begin() + 1, t.end()};
  }

  double keyed_double(const std::string& key) { return parse_double(keyed(key, 1)[0]); }
  int keyed_int(const std::string& key) { return parse_int(keyed(key, 1)[0]); }
  std::uint64_t keyed_u64(const std::string& key) { return parse_u64(keyed(key, 1)[0]); }

  const std::string& name() const { return name_; }
  int line_no() const { return line_no_; }

 private:
  std::istringstream in_;
  std::string name_;
  int line_no_ = 0;
};

void check_header(Lines& r, const std::string& kind, int version) {
  const std::vector<std::string> t = r.require(2, "header");
  if (t[0] != kind) bad(r.name() + ": not a " + kind + " file (header '" + t[0] + "')");
  if (parse_int(t[1]) != version)
    bad(r.name() + ": unsupported " + kind + " version " + t[1]);
}

// ---------------------------------------------------------------------------
// Config registry: every tunable maps to one key; serialization order is the
// registry order.

struct FieldRef {
  std::string key;
  std::vector<double*> d;
  int* i = nullptr;
  std::uint64_t* u = nullptr;
};

std::vector<FieldRef> config_fields(Config& c) {
  std::vector<FieldRef> f;
  auto d1 = [&](const char* k, double* p) { f.push_back({k, {p}, nullptr, nullptr}); };
  auto dn = [&](const char* k, double* p, int n) {
    FieldRef r{k, {}, nullptr, nullptr};
    for (int j = 0; j < n; ++j) r.d.push_back(p + j);
    f.push_back(std::move(r));
  };
  auto i1 = [&](const char* k, int* p) { f.push_back({k, {}, p, nullptr}); };
  auto u1 = [&](const char* k, std::uint64_t* p) { f.push_back({k, {}, nullptr, p}); };

  RobotModel& m = c.model;
  d1("model.mass", &m.mass);
  d1("model.gravity", &m.gravity);
  static const char* kLegKeys[kNumLegs] = {"fl", "fr", "hl", "hr"};
  for (int leg = 0; leg < kNumLegs; ++leg)
    dn(("model.hip_offset_" + std::string(kLegKeys[leg])).c_str(),
       m.hip_offsets[static_cast<std::size_t>(leg)].data(), 2);
  d1("model.upper_leg_len", &m.upper_leg_len);
  d1("model.lower_leg_len", &m.lower_leg_len);
  d1("model.nominal_height", &m.nominal_height);
  d1("model.friction_mu", &m.friction_mu);
  d1("model.max_leg_reach", &m.max_leg_reach);
  dn("model.cop_half_extents", m.cop_half_extents.data(), 2);
  dn("model.base_inertia", m.base_inertia.data(), 9);
  for (int leg = 0; leg < kNumLegs; ++leg)
    dn(("model.point_masses_" + std::string(kLegKeys[leg])).c_str(),
       m.link_point_masses[static_cast<std::size_t>(leg)].data(), 3);
  dn("model.joint_lower", m.joint_lower.data(), kNumJoints);
  dn("model.joint_upper", m.joint_upper.data(), kNumJoints);
  dn("model.nominal_posture", m.nominal_posture.data(), kNumJoints);

  WbcGains& g = c.gains;
  dn("wbc.k_c", g.K_c.data(), 3);
  dn("wbc.d_c", g.D_c.data(), 3);
  dn("wbc.k_b", g.K_b.data(), 3);
  dn("wbc.d_b", g.D_b.data(), 3);
  dn("wbc.imp_k", g.imp_K.data(), 3);
  dn("wbc.imp_d", g.imp_D.data(), 3);
  d1("wbc.alpha", &g.alpha);
  d1("wbc.friction_mu", &g.friction_mu);

  OptSettings& o = c.opt;
  d1("opt.w_com_via", &o.w_com_via);
  d1("opt.w_lmom", &o.w_lmom);
  d1("opt.w_amom", &o.w_amom);
  d1("opt.w_force", &o.w_force);
  d1("opt.w_force_rate", &o.w_force_rate);
  d1("opt.w_terminal", &o.w_terminal);
  i1("opt.max_outer", &o.max_outer);
  d1("opt.qp_tol", &o.qp_tol);
  d1("opt.trust_radius", &o.trust_radius);
  d1("opt.outer_tol", &o.outer_tol);
  d1("opt.min_trust_radius", &o.min_trust_radius);

  IkWeights& w = c.ik;
  d1("ik.com", &w.com);
  d1("ik.orient", &w.orient);
  d1("ik.feet", &w.feet);
  d1("ik.posture", &w.posture);
  d1("ik.damping", &w.damping);
  d1("ik.k_fuse", &w.k_fuse);
  d1("ik.k_ori", &w.k_ori);
  d1("ik.k_post", &w.k_post);
  d1("ik.k_foot", &w.k_foot);

  TrainHyper& t = c.train;
  d1("train.lr", &t.lr);
  d1("train.weight_decay", &t.weight_decay);
  i1("train.batch", &t.batch);
  i1("train.epochs", &t.epochs);
  d1("train.noise_pos", &t.noise_pos);
  d1("train.noise_vel", &t.noise_vel);
  d1("train.val_fraction", &t.val_fraction);
  u1("train.seed", &t.seed);

  WalkTiming& wt = c.walk;
  d1("walk.t_init", &wt.t_init);
  d1("walk.t_swing", &wt.t_swing);
  d1("walk.t_dwell", &wt.t_dwell);
  d1("walk.t_final", &wt.t_final);
  d1("walk.step_height", &wt.step_height);
  d1("walk.max_step_len", &wt.max_step_len);

  JumpTiming& jt = c.jump;
  d1("jump.t_init", &jt.t_init);
  d1("jump.t_prep", &jt.t_prep);
  d1("jump.t_flight", &jt.t_flight);
  d1("jump.t_final", &jt.t_final);
  d1("jump.max_jump_len", &jt.max_jump_len);
  d1("jump.ballistic_bound", &jt.ballistic_bound);

  d1("sim.disturbance_std", &c.disturbance_std);
  return f;
}

}  // namespace

std::string config_to_text(const Config& c) {
  Config copy = c;  // registry binds to a mutable instance
  std::ostringstream os;
  os << "quadplan-config " << kConfigFormatVersion << "\n";
  for (const FieldRef& fr : config_fields(copy)) {
    os << fr.key;
    if (fr.i != nullptr) os << ' ' << *fr.i;
    if (fr.u != nullptr) os << ' ' << *fr.u;
    for (const double* p : fr.d) os << ' ' << fmt(*p);
    os << "\n";
  }
  return os.str();
}

Config config_from_text(const std::string& text) {
  Config c;
  std::vector<FieldRef> fields = config_fields(c);
  std::map<std::string, FieldRef*> by_key;
  for (FieldRef& fr : fields) by_key[fr.key] = &fr;

  Lines r(text, "config");
  check_header(r, "quadplan-config", kConfigFormatVersion);
  std::vector<std::string> t;
  while (r.next(&t)) {
    const auto it = by_key.find(t[0]);
    if (it == by_key.end()) bad("config: unknown key '" + t[0] + "'");
    FieldRef& fr = *it->second;
    const std::size_t arity = fr.d.size() + (fr.i != nullptr) + (fr.u != nullptr);
    if (t.size() != arity + 1)
      bad("config: key '" + t[0] + "' expects " + std::to_string(arity) + " values");
    std::size_t k = 1;
    if (fr.i != nullptr) *fr.i = parse_int(t[k++]);
    if (fr.u != nullptr) *fr.u = parse_u64(t[k++]);
    for (double* p : fr.d) *p = parse_double(t[k++]);
  }
  return c;
}

std::uint64_t config_hash(const Config& c) { return fnv1a(config_to_text(c)); }

Config load_config(const std::string& path) { return config_from_text(read_text_file(path)); }

void save_config(const Config& c, const std::string& path) {
  write_text_file(path, config_to_text(c));
}

// ---------------------------------------------------------------------------
// Motion descriptions.

void save_motion(const MotionDescription& d, std::uint64_t config_hash, std::uint64_t seed,
                 const std::string& path) {
  std::ostringstream os;
  os << "quadplan-motion " << kMotionFormatVersion << "\n";
  os << "config_hash " << config_hash << "\n";
  os << "seed " << seed << "\n";
  os << "tag " << d.tag << "\n";
  os << "dt " << fmt(d.dt) << "\n";
  os << "horizon " << d.horizon << "\n";
  os << "step_height " << fmt(d.step_height) << "\n";
  os << "duration " << fmt(d.plan.duration) << "\n";
  os << "patterns " << d.patterns.size() << "\n";
  for (const MotionPattern& p : d.patterns)
    os << "pattern " << p.index << ' ' << fmt(p.t_start) << ' ' << fmt(p.t_end) << ' '
       << fmt(p.x) << ' ' << fmt(p.y) << ' ' << fmt(p.yaw) << ' ' << (p.is_last ? 1 : 0) << "\n";
  os << "vias " << d.com_via_points.size() << "\n";
  for (const ComViaPoint& v : d.com_via_points)
    os << "via " << fmt(v.t) << ' ' << fmt(v.pos.x()) << ' ' << fmt(v.pos.y()) << ' '
       << fmt(v.pos.z()) << "\n";
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const auto& phases = d.plan.phases[static_cast<std::size_t>(leg)];
    os << "phases " << leg << ' ' << phases.size() << "\n";
    for (const ContactPhase& ph : phases)
      os << "phase " << ph.effector << ' ' << fmt(ph.t_start) << ' ' << fmt(ph.t_end) << ' '
         << fmt(ph.stance_pos.x()) << ' ' << fmt(ph.stance_pos.y()) << ' '
         << fmt(ph.stance_pos.z()) << ' ' << (ph.in_stance ? 1 : 0) << "\n";
  }
  write_text_file(path, os.str());
}

MotionArtifact load_motion(const std::string& path) {
  Lines r(read_text_file(path), path);
  check_header(r, "quadplan-motion", kMotionFormatVersion);
  MotionArtifact a;
  MotionDescription& d = a.description;
  a.config_hash = r.keyed_u64("config_hash");
  a.seed = r.keyed_u64("seed");
  d.tag = r.keyed("tag", 1)[0];
  d.dt = r.keyed_double("dt");
  d.horizon = r.keyed_int("horizon");
  d.step_height = r.keyed_double("step_height");
  d.plan.duration = r.keyed_double("duration");
  const int n_pat = r.keyed_int("patterns");
  d.patterns.resize(static_cast<std::size_t>(n_pat));
  for (MotionPattern& p : d.patterns) {
    const auto t = r.keyed("pattern", 7);
    p.index = parse_int(t[0]);
    p.t_start = parse_double(t[1]);
    p.t_end = parse_double(t[2]);
    p.x = parse_double(t[3]);
    p.y = parse_double(t[4]);
    p.yaw = parse_double(t[5]);
    p.is_last = parse_int(t[6]) != 0;
  }
  const int n_via = r.keyed_int("vias");
  d.com_via_points.resize(static_cast<std::size_t>(n_via));
  for (ComViaPoint& v : d.com_via_points) {
    const auto t = r.keyed("via", 4);
    v.t = parse_double(t[0]);
    v.pos = {parse_double(t[1]), parse_double(t[2]), parse_double(t[3])};
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const auto head = r.keyed("phases", 2);
    if (parse_int(head[0]) != leg) bad(path + ": phases blocks out of order");
    auto& phases = d.plan.phases[static_cast<std::size_t>(leg)];
    phases.resize(static_cast<std::size_t>(parse_int(head[1])));
    for (ContactPhase& ph : phases) {
      const auto t = r.keyed("phase", 7);
      ph.effector = parse_int(t[0]);
      ph.t_start = parse_double(t[1]);
      ph.t_end = parse_double(t[2]);
      ph.stance_pos = {parse_double(t[3]), parse_double(t[4]), parse_double(t[5])};
      ph.in_stance = parse_int(t[6]) != 0;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Whole-body plans.

namespace {

void row_out(std::ostringstream& os, const double* p, int n, bool lead_tab = false) {
  for (int k = 0; k < n; ++k) os << (k == 0 && !lead_tab ? "" : "\t") << fmt(p[k]);
}

std::vector<double> row_in(Lines& r, std::size_t n, const char* what) {
  const auto t = r.require(n, what);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = parse_double(t[k]);
  return v;
}

}  // namespace

void save_plan(const WholeBodyPlan& plan, std::uint64_t config_hash, std::uint64_t seed,
               const std::string& path) {
  std::ostringstream os;
  os << "quadplan-plan " << kPlanFormatVersion << "\n";
  os << "config_hash " << config_hash << "\n";
  os << "seed " << seed << "\n";
  os << "dt " << fmt(plan.dt) << "\n";
  os << "horizon " << plan.horizon() << "\n";
  os << "joint_limit_violations " << plan.joint_limit_violations << "\n";
  os << "states " << plan.states.size() << "\n";
  for (const WholeBodyState& s : plan.states) {
    row_out(os, s.base_pos.data(), 3);
    const double quat[4] = {s.base_quat.w(), s.base_quat.x(), s.base_quat.y(), s.base_quat.z()};
    row_out(os, quat, 4, true);
    row_out(os, s.joint_pos.data(), kNumJoints, true);
    row_out(os, s.base_lin_vel.data(), 3, true);
    row_out(os, s.base_ang_vel.data(), 3, true);
    row_out(os, s.joint_vel.data(), kNumJoints, true);
    os << "\n";
  }
  os << "vels " << plan.vels.size() << "\n";
  for (const auto& v : plan.vels) {
    row_out(os, v.data(), kGenVelDim);
    os << "\n";
  }
  os << "cent_refs " << plan.cent_refs.size() << "\n";
  for (const CentroidalState& cs : plan.cent_refs) {
    row_out(os, cs.com.data(), 3);
    row_out(os, cs.lin_momentum.data(), 3, true);
    row_out(os, cs.ang_momentum.data(), 3, true);
    os << "\n";
  }
  os << "wrench_refs " << plan.wrench_refs.size() << "\n";
  for (const auto& w : plan.wrench_refs) {
    row_out(os, w.data(), 6);
    os << "\n";
  }
  os << "foot_refs " << plan.foot_refs.size() << "\n";
  for (const auto& feet : plan.foot_refs) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const FootRef& fr = feet[static_cast<std::size_t>(leg)];
      row_out(os, fr.pos.data(), 3, leg > 0);
      row_out(os, fr.vel.data(), 3, true);
      os << '\t' << (fr.in_stance ? 1 : 0);
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

PlanArtifact load_plan(const std::string& path) {
  Lines r(read_text_file(path), path);
  check_header(r, "quadplan-plan", kPlanFormatVersion);
  PlanArtifact a;
  WholeBodyPlan& p = a.plan;
  a.config_hash = r.keyed_u64("config_hash");
  a.seed = r.keyed_u64("seed");
  p.dt = r.keyed_double("dt");
  const int horizon = r.keyed_int("horizon");
  p.joint_limit_violations = r.keyed_int("joint_limit_violations");

  const int n_states = r.keyed_int("states");
  if (n_states != horizon + 1) bad(path + ": state count does not match horizon");
  p.states.resize(static_cast<std::size_t>(n_states));
  for (WholeBodyState& s : p.states) {
    const std::vector<double> v = row_in(r, 37, "state row");
    s.base_pos = {v[0], v[1], v[2]};
    s.base_quat = Eigen::Quaterniond(v[3], v[4], v[5], v[6]);
    for (int k = 0; k < kNumJoints; ++k) s.joint_pos[k] = v[7 + static_cast<std::size_t>(k)];
    s.base_lin_vel = {v[19], v[20], v[21]};
    s.base_ang_vel = {v[22], v[23], v[24]};
    for (int k = 0; k < kNumJoints; ++k) s.joint_vel[k] = v[25 + static_cast<std::size_t>(k)];
  }
  const int n_vels = r.keyed_int("vels");
  if (n_vels != horizon) bad(path + ": vel count does not match horizon");
  p.vels.resize(static_cast<std::size_t>(n_vels));
  for (auto& vel : p.vels) {
    const std::vector<double> v = row_in(r, kGenVelDim, "vel row");
    for (int k = 0; k < kGenVelDim; ++k) vel[k] = v[static_cast<std::size_t>(k)];
  }
  const int n_refs = r.keyed_int("cent_refs");
  if (n_refs != horizon + 1) bad(path + ": cent_ref count does not match horizon");
  p.cent_refs.resize(static_cast<std::size_t>(n_refs));
  for (CentroidalState& cs : p.cent_refs) {
    const std::vector<double> v = row_in(r, 9, "cent_ref row");
    cs.com = {v[0], v[1], v[2]};
    cs.lin_momentum = {v[3], v[4], v[5]};
    cs.ang_momentum = {v[6], v[7], v[8]};
  }
  const int n_wrench = r.keyed_int("wrench_refs");
  if (n_wrench != horizon) bad(path + ": wrench count does not match horizon");
  p.wrench_refs.resize(static_cast<std::size_t>(n_wrench));
  for (auto& w : p.wrench_refs) {
    const std::vector<double> v = row_in(r, 6, "wrench row");
    for (int k = 0; k < 6; ++k) w[k] = v[static_cast<std::size_t>(k)];
  }
  const int n_feet = r.keyed_int("foot_refs");
  if (n_feet != horizon) bad(path + ": foot_ref count does not match horizon");
  p.foot_refs.resize(static_cast<std::size_t>(n_feet));
  for (auto& feet : p.foot_refs) {
    const std::vector<double> v = row_in(r, 28, "foot_ref row");
    for (int leg = 0; leg < kNumLegs; ++leg) {
      FootRef& fr = feet[static_cast<std::size_t>(leg)];
      const std::size_t o = static_cast<std::size_t>(7 * leg);
      fr.pos = {v[o + 0], v[o + 1], v[o + 2]};
      fr.vel = {v[o + 3], v[o + 4], v[o + 5]};
      fr.in_stance = v[o + 6] != 0.0;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Tracking logs.

void save_tracking(const TrackingLog& log, std::uint64_t config_hash, std::uint64_t seed,
                   const std::string& path) {
  std::ostringstream os;
  os << "quadplan-tracking " << kTrackingFormatVersion << "\n";
  os << "config_hash " << config_hash << "\n";
  os << "seed " << seed << "\n";
  os << "dt " << fmt(log.dt) << "\n";
  os << "fell " << (log.fell ? 1 : 0) << "\n";
  os << "fall_step " << log.fall_step << "\n";
  os << "com_gap_max " << fmt(log.com_gap_max) << "\n";
  os << "steps " << log.steps.size() << "\n";
  for (const TrackingStep& s : log.steps) {
    os << fmt(s.t);
    row_out(os, s.planned.com.data(), 3, true);
    row_out(os, s.planned.lin_momentum.data(), 3, true);
    row_out(os, s.planned.ang_momentum.data(), 3, true);
    const double pq[4] = {s.planned_quat.w(), s.planned_quat.x(), s.planned_quat.y(),
                          s.planned_quat.z()};
    row_out(os, pq, 4, true);
    row_out(os, s.simulated.com.data(), 3, true);
    row_out(os, s.simulated.lin_momentum.data(), 3, true);
    row_out(os, s.simulated.ang_momentum.data(), 3, true);
    const double sq[4] = {s.simulated_quat.w(), s.simulated_quat.x(), s.simulated_quat.y(),
                          s.simulated_quat.z()};
    row_out(os, sq, 4, true);
    for (int leg = 0; leg < kNumLegs; ++leg)
      os << '\t' << (s.in_stance[static_cast<std::size_t>(leg)] ? 1 : 0);
    for (int leg = 0; leg < kNumLegs; ++leg)
      row_out(os, s.forces[static_cast<std::size_t>(leg)].data(), 3, true);
    for (int leg = 0; leg < kNumLegs; ++leg)
      row_out(os, s.torques[static_cast<std::size_t>(leg)].data(), 3, true);
    os << '\t' << fmt(s.eta_norm) << '\t' << fmt(s.zeta1) << '\t' << fmt(s.zeta2) << "\n";
  }
  write_text_file(path, os.str());
}

TrackingArtifact load_tracking(const std::string& path) {
  Lines r(read_text_file(path), path);
  check_header(r, "quadplan-tracking", kTrackingFormatVersion);
  TrackingArtifact a;
  TrackingLog& log = a.log;
  a.config_hash = r.keyed_u64("config_hash");
  a.seed = r.keyed_u64("seed");
  log.dt = r.keyed_double("dt");
  log.fell = r.keyed_int("fell") != 0;
  log.fall_step = r.keyed_int("fall_step");
  log.com_gap_max = r.keyed_double("com_gap_max");
  const int n = r.keyed_int("steps");
  log.steps.resize(static_cast<std::size_t>(n));
  for (TrackingStep& s : log.steps) {
    const std::vector<double> v = row_in(r, 58, "tracking row");
    std::size_t o = 0;
    auto vec3 = [&]() {
      const Eigen::Vector3d out(v[o], v[o + 1], v[o + 2]);
      o += 3;
      return out;
    };
    auto quat = [&]() {
      const Eigen::Quaterniond out(v[o], v[o + 1], v[o + 2], v[o + 3]);
      o += 4;
      return out;
    };
    s.t = v[o++];
    s.planned.com = vec3();
    s.planned.lin_momentum = vec3();
    s.planned.ang_momentum = vec3();
    s.planned_quat = quat();
    s.simulated.com = vec3();
    s.simulated.lin_momentum = vec3();
    s.simulated.ang_momentum = vec3();
    s.simulated_quat = quat();
    for (int leg = 0; leg < kNumLegs; ++leg) s.in_stance[static_cast<std::size_t>(leg)] = v[o++] != 0.0;
    for (int leg = 0; leg < kNumLegs; ++leg) s.forces[static_cast<std::size_t>(leg)] = vec3();
    for (int leg = 0; leg < kNumLegs; ++leg) s.torques[static_cast<std::size_t>(leg)] = vec3();
    s.eta_norm = v[o++];
    s.zeta1 = v[o++];
    s.zeta2 = v[o++];
  }
  return a;
}

// ---------------------------------------------------------------------------
// Binary artifacts.

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) bad(path + ": truncated file");
  return v;
}

void put_doubles(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void get_doubles(std::istream& is, double* p, std::size_t n, const std::string& path) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) bad(path + ": truncated file");
}

void put_layout(std::ostream& os, const FeatureLayout& l) {
  put<std::int32_t>(os, l.history_steps);
  put<std::int32_t>(os, l.window_steps);
  put<std::int32_t>(os, l.gen_pos_dim);
  put<std::int32_t>(os, l.target_dim);
  put(os, l.last_flag);
}

FeatureLayout get_layout(std::istream& is, const std::string& path) {
  FeatureLayout l;
  l.history_steps = get<std::int32_t>(is, path);
  l.window_steps = get<std::int32_t>(is, path);
  l.gen_pos_dim = get<std::int32_t>(is, path);
  l.target_dim = get<std::int32_t>(is, path);
  l.last_flag = get<double>(is, path);
  if (l.history_steps <= 0 || l.window_steps <= 0 || l.gen_pos_dim <= 0 || l.target_dim <= 0)
    bad(path + ": corrupt feature layout");
  return l;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) bad(path + ": cannot open for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) bad(path + ": cannot open");
  return is;
}

void check_magic(std::istream& is, const char* magic, const std::string& path) {
  char m[4];
  is.read(m, 4);
  if (!is || std::string_view(m, 4) != std::string_view(magic, 4))
    bad(path + ": not a " + magic + " file");
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  if (ds.feat_mean.size() != ds.layout.feature_dim())
    bad("save_dataset: stats missing; call compute_stats first");
  std::ofstream os = open_out(path);
  os.write("QPDS", 4);
  put(os, kDatasetFormatVersion);
  put(os, ds.config_hash);
  put(os, ds.seed);
  put(os, ds.dt);
  put_layout(os, ds.layout);
  put<std::int32_t>(os, ds.rows());
  put<std::int32_t>(os, static_cast<std::int32_t>(ds.description_ranges.size()));
  for (const auto& [begin, end] : ds.description_ranges) {
    put<std::int32_t>(os, begin);
    put<std::int32_t>(os, end);
  }
  put_doubles(os, ds.feat_mean.data(), static_cast<std::size_t>(ds.feat_mean.size()));
  put_doubles(os, ds.feat_std.data(), static_cast<std::size_t>(ds.feat_std.size()));
  put_doubles(os, ds.targ_mean.data(), static_cast<std::size_t>(ds.targ_mean.size()));
  put_doubles(os, ds.targ_std.data(), static_cast<std::size_t>(ds.targ_std.size()));
  put_doubles(os, ds.features.data(), static_cast<std::size_t>(ds.features.size()));
  put_doubles(os, ds.targets.data(), static_cast<std::size_t>(ds.targets.size()));
  if (!os) bad(path + ": write failed");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is = open_in(path);
  check_magic(is, "QPDS", path);
  const auto version = get<std::uint32_t>(is, path);
  if (version != kDatasetFormatVersion) bad(path + ": unsupported dataset version");
  Dataset ds;
  ds.config_hash = get<std::uint64_t>(is, path);
  ds.seed = get<std::uint64_t>(is, path);
  ds.dt = get<double>(is, path);
  ds.layout = get_layout(is, path);
  const auto rows = get<std::int32_t>(is, path);
  const auto n_desc = get<std::int32_t>(is, path);
  if (rows < 0 || n_desc < 0) bad(path + ": corrupt dataset header");
  ds.description_ranges.resize(static_cast<std::size_t>(n_desc));
  for (auto& [begin, end] : ds.description_ranges) {
    begin = get<std::int32_t>(is, path);
    end = get<std::int32_t>(is, path);
  }
  const int fd = ds.layout.feature_dim();
  const int td = ds.layout.target_dim;
  ds.feat_mean.resize(fd);
  ds.feat_std.resize(fd);
  ds.targ_mean.resize(td);
  ds.targ_std.resize(td);
  get_doubles(is, ds.feat_mean.data(), static_cast<std::size_t>(fd), path);
  get_doubles(is, ds.feat_std.data(), static_cast<std::size_t>(fd), path);
  get_doubles(is, ds.targ_mean.data(), static_cast<std::size_t>(td), path);
  get_doubles(is, ds.targ_std.data(), static_cast<std::size_t>(td), path);
  ds.features.resize(fd, rows);
  ds.targets.resize(td, rows);
  get_doubles(is, ds.features.data(), static_cast<std::size_t>(ds.features.size()), path);
  get_doubles(is, ds.targets.data(), static_cast<std::size_t>(ds.targets.size()), path);
  return ds;
}

void save_model(const SurrogateModel& m, const std::string& path) {
  std::ofstream os = open_out(path);
  os.write("QPNN", 4);
  put(os, kModelFormatVersion);
  put(os, m.config_hash);
  put(os, m.seed);
  put_layout(os, m.layout);
  put<std::int32_t>(os, static_cast<std::int32_t>(m.net.shape.size()));
  for (const int s : m.net.shape) put<std::int32_t>(os, s);
  for (const Activation a : m.net.acts) put<std::uint8_t>(os, static_cast<std::uint8_t>(a));
  put<std::int64_t>(os, m.net.adam_steps);
  for (int l = 0; l < m.net.num_layers(); ++l) {
    const std::size_t ls = static_cast<std::size_t>(l);
    put_doubles(os, m.net.W[ls].data(), static_cast<std::size_t>(m.net.W[ls].size()));
    put_doubles(os, m.net.b[ls].data(), static_cast<std::size_t>(m.net.b[ls].size()));
    put_doubles(os, m.net.mW[ls].data(), static_cast<std::size_t>(m.net.mW[ls].size()));
    put_doubles(os, m.net.vW[ls].data(), static_cast<std::size_t>(m.net.vW[ls].size()));
    put_doubles(os, m.net.mb[ls].data(), static_cast<std::size_t>(m.net.mb[ls].size()));
    put_doubles(os, m.net.vb[ls].data(), static_cast<std::size_t>(m.net.vb[ls].size()));
  }
  put_doubles(os, m.feat_mean.data(), static_cast<std::size_t>(m.feat_mean.size()));
  put_doubles(os, m.feat_std.data(), static_cast<std::size_t>(m.feat_std.size()));
  put_doubles(os, m.targ_mean.data(), static_cast<std::size_t>(m.targ_mean.size()));
  put_doubles(os, m.targ_std.data(), static_cast<std::size_t>(m.targ_std.size()));
  if (!os) bad(path + ": write failed");
}

SurrogateModel load_model(const std::string& path) {
  std::ifstream is = open_in(path);
  check_magic(is, "QPNN", path);
  const auto version = get<std::uint32_t>(is, path);
  if (version != kModelFormatVersion) bad(path + ": unsupported model version");
  SurrogateModel m;
  m.config_hash = get<std::uint64_t>(is, path);
  m.seed = get<std::uint64_t>(is, path);
  m.layout = get_layout(is, path);
  const auto n_shape = get<std::int32_t>(is, path);
  if (n_shape < 2 || n_shape > 64) bad(path + ": corrupt network shape");
  m.net.shape.resize(static_cast<std::size_t>(n_shape));
  for (int& s : m.net.shape) {
    s = get<std::int32_t>(is, path);
    if (s <= 0) bad(path + ": corrupt network shape");
  }
  m.net.acts.resize(static_cast<std::size_t>(n_shape - 1));
  for (Activation& a : m.net.acts) {
    const auto raw = get<std::uint8_t>(is, path);
    if (raw > 2) bad(path + ": unknown activation id");
    a = static_cast<Activation>(raw);
  }
  m.net.adam_steps = get<std::int64_t>(is, path);
  const int n_layers = n_shape - 1;
  m.net.W.resize(static_cast<std::size_t>(n_layers));
  m.net.b.resize(static_cast<std::size_t>(n_layers));
  m.net.mW.resize(static_cast<std::size_t>(n_layers));
  m.net.vW.resize(static_cast<std::size_t>(n_layers));
  m.net.mb.resize(static_cast<std::size_t>(n_layers));
  m.net.vb.resize(static_cast<std::size_t>(n_layers));
  for (int l = 0; l < n_layers; ++l) {
    const std::size_t ls = static_cast<std::size_t>(l);
    const int rows = m.net.shape[ls + 1];
    const int cols = m.net.shape[ls];
    for (auto* mat : {&m.net.W[ls], &m.net.mW[ls], &m.net.vW[ls]}) mat->resize(rows, cols);
    for (auto* vec : {&m.net.b[ls], &m.net.mb[ls], &m.net.vb[ls]}) vec->resize(rows);
    get_doubles(is, m.net.W[ls].data(), static_cast<std::size_t>(m.net.W[ls].size()), path);
    get_doubles(is, m.net.b[ls].data(), static_cast<std::size_t>(m.net.b[ls].size()), path);
    get_doubles(is, m.net.mW[ls].data(), static_cast<std::size_t>(m.net.mW[ls].size()), path);
    get_doubles(is, m.net.vW[ls].data(), static_cast<std::size_t>(m.net.vW[ls].size()), path);
    get_doubles(is, m.net.mb[ls].data(), static_cast<std::size_t>(m.net.mb[ls].size()), path);
    get_doubles(is, m.net.vb[ls].data(), static_cast<std::size_t>(m.net.vb[ls].size()), path);
  }
  const int fd = m.layout.feature_dim();
  const int td = m.layout.target_dim;
  if (m.net.input_dim() != fd || m.net.output_dim() != td)
    bad(path + ": network shape disagrees with feature layout");
  m.feat_mean.resize(fd);
  m.feat_std.resize(fd);
  m.targ_mean.resize(td);
  m.targ_std.resize(td);
  get_doubles(is, m.feat_mean.data(), static_cast<std::size_t>(fd), path);
  get_doubles(is, m.feat_std.data(), static_cast<std::size_t>(fd), path);
  get_doubles(is, m.targ_mean.data(), static_cast<std::size_t>(td), path);
  get_doubles(is, m.targ_std.data(), static_cast<std::size_t>(td), path);
  return m;
}

std::string artifact_kind(const std::string& path) {
  std::ifstream is = open_in(path);
  char m[4];
  is.read(m, 4);
  if (is) {
    const std::string_view head(m, 4);
    if (head == "QPDS" || head == "QPNN") return std::string(head);
  }
  is.clear();
  is.seekg(0);
  std::string line;
  if (!std::getline(is, line)) bad(path + ": empty file");
  std::istringstream ls(line);
  std::string tok;
  ls >> tok;
  return tok;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) bad(path + ": cannot open for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) bad(path + ": write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) bad(path + ": cannot open");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace quadplan
