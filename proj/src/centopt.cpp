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

#include "quadplan/centopt.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "quadplan/qp.hpp"
#include "quadplan/rotation.hpp"

namespace quadplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Vector3d gravity_vec(const RobotModel& model) { return {0.0, 0.0, -model.gravity}; }

// Torque contributed by the CoP offset and yaw torque on flat ground.
Eigen::Vector3d cop_torque(const EffectorForce& e) {
  const Eigen::Vector3d lever(e.cop.x(), e.cop.y(), 0.0);
  return lever.cross(e.force) + Eigen::Vector3d(0.0, 0.0, e.yaw_torque);
}

// Variable and constraint-row layout of the convex subproblem. States t =
// 1..N are stacked first (c, l, k per step), then stance forces per step.
struct Layout {
  int N = 0;
  std::vector<StepContacts> contacts;
  std::vector<std::array<int, kNumLegs>> force_var;  // -1 when not in stance
  int n_state = 0, n_force = 0, n_vars = 0;
  int rows_dyn = 0, rows_cone = 0, rows_reach = 0, rows_trust = 0, n_rows = 0;
  int cone_start = 0, reach_start = 0, trust_start = 0;

  int state_var(int t, int block) const { return 9 * (t - 1) + 3 * block; }  // t in 1..N
  int com_var(int t) const { return state_var(t, 0); }
  int lmom_var(int t) const { return state_var(t, 1); }
  int amom_var(int t) const { return state_var(t, 2); }

  static Layout build(const MotionDescription& d) {
    Layout L;
    L.N = d.horizon;
    L.contacts.reserve(static_cast<std::size_t>(L.N));
    L.force_var.assign(static_cast<std::size_t>(L.N), {-1, -1, -1, -1});
    L.n_state = 9 * L.N;
    int v = L.n_state;
    int n_active = 0;
    for (int s = 0; s < L.N; ++s) {
      L.contacts.push_back(contacts_at_step(d, s));
      for (int e = 0; e < kNumLegs; ++e) {
        if (L.contacts.back().active[static_cast<std::size_t>(e)]) {
          L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] = v;
          v += 3;
          ++n_active;
        }
      }
    }
    L.n_force = v - L.n_state;
    L.n_vars = v;
    L.rows_dyn = 9 * L.N;
    L.rows_cone = 5 * n_active;
    L.rows_reach = n_active;
    L.rows_trust = 3 * L.N;
    L.cone_start = L.rows_dyn;
    L.reach_start = L.cone_start + L.rows_cone;
    L.trust_start = L.reach_start + L.rows_reach;
    L.n_rows = L.trust_start + L.rows_trust;
    return L;
  }
};

struct CostWeights {
  double via, l, k, f, fr, via_term, l_term, k_term;
  explicit CostWeights(const OptSettings& s, double dt)
      : via(s.w_com_via * dt),
        l(s.w_lmom * dt),
        k(s.w_amom * dt),
        f(s.w_force * dt),
        fr(s.w_force_rate * dt),
        via_term(s.w_terminal * s.w_com_via),
        l_term(s.w_terminal * s.w_lmom),
        k_term(s.w_terminal * s.w_amom) {}
};

// Quadratic cost: fixed across outer iterations.
void build_cost(const Layout& L, const CostWeights& w, const std::vector<Eigen::Vector3d>& ref,
                Eigen::SparseMatrix<double>& P, Eigen::VectorXd& q) {
  std::vector<Eigen::Triplet<double>> trips;
  q = Eigen::VectorXd::Zero(L.n_vars);
  for (int t = 1; t <= L.N; ++t) {
    const double wc = 2.0 * (w.via + (t == L.N ? w.via_term : 0.0));
    const double wl = 2.0 * (w.l + (t == L.N ? w.l_term : 0.0));
    const double wk = 2.0 * (w.k + (t == L.N ? w.k_term : 0.0));
    for (int i = 0; i < 3; ++i) {
      trips.emplace_back(L.com_var(t) + i, L.com_var(t) + i, wc);
      trips.emplace_back(L.lmom_var(t) + i, L.lmom_var(t) + i, wl);
      trips.emplace_back(L.amom_var(t) + i, L.amom_var(t) + i, wk);
      q[L.com_var(t) + i] = -wc * ref[static_cast<std::size_t>(t)][i];
    }
  }
  for (int s = 0; s < L.N; ++s) {
    for (int e = 0; e < kNumLegs; ++e) {
      const int fi = L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
      if (fi < 0) continue;
      for (int i = 0; i < 3; ++i) trips.emplace_back(fi + i, fi + i, 2.0 * w.f);
      const int fp = s > 0
          ? L.force_var[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(e)] : -1;
      if (fp >= 0) {
        for (int i = 0; i < 3; ++i) {
          trips.emplace_back(fi + i, fi + i, 2.0 * w.fr);
          trips.emplace_back(fp + i, fp + i, 2.0 * w.fr);
          trips.emplace_back(fi + i, fp + i, -2.0 * w.fr);
          trips.emplace_back(fp + i, fi + i, -2.0 * w.fr);
        }
      }
    }
  }
  P.resize(L.n_vars, L.n_vars);
  P.setFromTriplets(trips.begin(), trips.end());
  P.makeCompressed();
}

// Constraint matrix and bounds for one linearization point. Triplet order and
// count are identical for every call so the QP solver can reuse its pattern.
void build_constraints(const Layout& L, const RobotModel& model, double dt,
                       const CentroidalState& x0, const std::vector<Eigen::Vector3d>& com_bar,
                       double trust_radius, Eigen::SparseMatrix<double>& A, Eigen::VectorXd& lo,
                       Eigen::VectorXd& up) {
  std::vector<Eigen::Triplet<double>> trips;
  lo = Eigen::VectorXd::Zero(L.n_rows);
  up = Eigen::VectorXd::Zero(L.n_rows);
  const double m = model.mass;
  const Eigen::Vector3d g = gravity_vec(model);

  for (int t = 1; t <= L.N; ++t) {
    const int s = t - 1;
    const int row = 9 * s;
    const auto& fv = L.force_var[static_cast<std::size_t>(s)];
    // Linear momentum rows.
    for (int i = 0; i < 3; ++i) {
      trips.emplace_back(row + i, L.lmom_var(t) + i, 1.0);
      if (t > 1) trips.emplace_back(row + i, L.lmom_var(t - 1) + i, -1.0);
      for (int e = 0; e < kNumLegs; ++e)
        if (fv[static_cast<std::size_t>(e)] >= 0)
          trips.emplace_back(row + i, fv[static_cast<std::size_t>(e)] + i, -dt);
      const double rhs = dt * m * g[i] + (t == 1 ? x0.lin_momentum[i] : 0.0);
      lo[row + i] = up[row + i] = rhs;
    }
    // CoM rows use the updated momentum.
    for (int i = 0; i < 3; ++i) {
      const int r = row + 3 + i;
      trips.emplace_back(r, L.com_var(t) + i, 1.0);
      if (t > 1) trips.emplace_back(r, L.com_var(t - 1) + i, -1.0);
      trips.emplace_back(r, L.lmom_var(t) + i, -dt / m);
      lo[r] = up[r] = t == 1 ? x0.com[i] : 0.0;
    }
    // Angular momentum rows with the torque map frozen at com_bar.
    const Eigen::Vector3d& cb = com_bar[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) {
      const int r = row + 6 + i;
      trips.emplace_back(r, L.amom_var(t) + i, 1.0);
      if (t > 1) trips.emplace_back(r, L.amom_var(t - 1) + i, -1.0);
      lo[r] = up[r] = t == 1 ? x0.ang_momentum[i] : 0.0;
    }
    for (int e = 0; e < kNumLegs; ++e) {
      const int fi = fv[static_cast<std::size_t>(e)];
      if (fi < 0) continue;
      const Eigen::Matrix3d S =
          skew(L.contacts[static_cast<std::size_t>(s)].pos[static_cast<std::size_t>(e)] - cb);
      // skew matrices have two nonzeros per row at fixed positions
      trips.emplace_back(row + 6, fi + 1, -dt * S(0, 1));
      trips.emplace_back(row + 6, fi + 2, -dt * S(0, 2));
      trips.emplace_back(row + 7, fi + 0, -dt * S(1, 0));
      trips.emplace_back(row + 7, fi + 2, -dt * S(1, 2));
      trips.emplace_back(row + 8, fi + 0, -dt * S(2, 0));
      trips.emplace_back(row + 8, fi + 1, -dt * S(2, 1));
    }
  }

  // Inscribed 4-facet pyramid: |f_x|, |f_y| <= (mu/sqrt(2)) f_z, f_z >= 0.
  const double cc = model.friction_mu / std::sqrt(2.0);
  int row = L.cone_start;
  for (int s = 0; s < L.N; ++s) {
    for (int e = 0; e < kNumLegs; ++e) {
      const int fi = L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
      if (fi < 0) continue;
      trips.emplace_back(row, fi + 2, 1.0);
      lo[row] = 0.0;
      up[row] = kInf;
      ++row;
      const int axes[4][2] = {{0, 1}, {0, -1}, {1, 1}, {1, -1}};
      for (const auto& ax : axes) {
        trips.emplace_back(row, fi + ax[0], static_cast<double>(ax[1]));
        trips.emplace_back(row, fi + 2, -cc);
        lo[row] = -kInf;
        up[row] = 0.0;
        ++row;
      }
    }
  }

  // Reach ball linearized as a supporting hyperplane at the frozen CoM.
  row = L.reach_start;
  for (int s = 0; s < L.N; ++s) {
    const int t = s + 1;
    for (int e = 0; e < kNumLegs; ++e) {
      if (L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] < 0) continue;
      const Eigen::Vector3d& p =
          L.contacts[static_cast<std::size_t>(s)].pos[static_cast<std::size_t>(e)];
      Eigen::Vector3d dir = com_bar[static_cast<std::size_t>(t)] - p;
      const double nrm = dir.norm();
      dir = nrm > 1e-9 ? Eigen::Vector3d(dir / nrm) : Eigen::Vector3d::UnitZ();
      for (int i = 0; i < 3; ++i) trips.emplace_back(row, L.com_var(t) + i, dir[i]);
      lo[row] = -kInf;
      up[row] = model.max_leg_reach + dir.dot(p);
      ++row;
    }
  }

  // Trust region box on the CoM.
  row = L.trust_start;
  for (int t = 1; t <= L.N; ++t) {
    for (int i = 0; i < 3; ++i) {
      trips.emplace_back(row, L.com_var(t) + i, 1.0);
      lo[row] = com_bar[static_cast<std::size_t>(t)][i] - trust_radius;
      up[row] = com_bar[static_cast<std::size_t>(t)][i] + trust_radius;
      ++row;
    }
  }

  A.resize(L.n_rows, L.n_vars);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
}

std::vector<ContactForceSet> extract_forces(const Layout& L, const Eigen::VectorXd& x) {
  std::vector<ContactForceSet> forces(static_cast<std::size_t>(L.N));
  for (int s = 0; s < L.N; ++s) {
    for (int e = 0; e < kNumLegs; ++e) {
      const int fi = L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
      auto& eff = forces[static_cast<std::size_t>(s)].eff[static_cast<std::size_t>(e)];
      if (fi < 0) continue;
      eff.active = true;
      eff.force = x.segment<3>(fi);
    }
  }
  return forces;
}

CentroidalTrajectory integrate_all(const Layout& L, const RobotModel& model, double dt,
                                   const CentroidalState& x0,
                                   std::vector<ContactForceSet> forces) {
  CentroidalTrajectory traj;
  traj.dt = dt;
  traj.states.resize(static_cast<std::size_t>(L.N) + 1);
  traj.states[0] = x0;
  traj.foot_pos.resize(static_cast<std::size_t>(L.N));
  for (int s = 0; s < L.N; ++s) {
    traj.foot_pos[static_cast<std::size_t>(s)] = L.contacts[static_cast<std::size_t>(s)].pos;
    traj.states[static_cast<std::size_t>(s) + 1] =
        integrate_step(traj.states[static_cast<std::size_t>(s)],
                       forces[static_cast<std::size_t>(s)],
                       traj.foot_pos[static_cast<std::size_t>(s)], model, dt);
  }
  traj.forces = std::move(forces);
  return traj;
}

CostBreakdown eval_cost(const CentroidalTrajectory& traj, const CostWeights& w,
                        const std::vector<Eigen::Vector3d>& ref) {
  CostBreakdown c;
  const int N = traj.horizon();
  for (int t = 1; t <= N; ++t) {
    const auto& st = traj.states[static_cast<std::size_t>(t)];
    c.com_via += w.via * (st.com - ref[static_cast<std::size_t>(t)]).squaredNorm();
    c.lmom += w.l * st.lin_momentum.squaredNorm();
    c.amom += w.k * st.ang_momentum.squaredNorm();
  }
  const auto& last = traj.states[static_cast<std::size_t>(N)];
  c.terminal = w.via_term * (last.com - ref[static_cast<std::size_t>(N)]).squaredNorm() +
               w.l_term * last.lin_momentum.squaredNorm() +
               w.k_term * last.ang_momentum.squaredNorm();
  for (int s = 0; s < N; ++s) {
    for (int e = 0; e < kNumLegs; ++e) {
      const auto& eff = traj.forces[static_cast<std::size_t>(s)].eff[static_cast<std::size_t>(e)];
      if (!eff.active) continue;
      c.force += w.f * eff.force.squaredNorm();
      if (s > 0) {
        const auto& prev =
            traj.forces[static_cast<std::size_t>(s) - 1].eff[static_cast<std::size_t>(e)];
        if (prev.active) c.force_rate += w.fr * (eff.force - prev.force).squaredNorm();
      }
    }
  }
  return c;
}

// Identifies the worst original constraint family when the convex subproblem
// reports infeasibility: re-solves with dynamics only, then scores families.
[[noreturn]] void diagnose_infeasible(const Layout& L, const Eigen::SparseMatrix<double>& P,
                                      const Eigen::VectorXd& q,
                                      const Eigen::SparseMatrix<double>& A,
                                      const Eigen::VectorXd& lo, const Eigen::VectorXd& up) {
  QpProblem relaxed;
  relaxed.P = P;
  relaxed.q = q;
  relaxed.A = A;
  relaxed.l = lo;
  relaxed.u = up;
  for (int r = L.cone_start; r < L.n_rows; ++r) {
    relaxed.l[r] = -kInf;
    relaxed.u[r] = kInf;
  }
  QpSettings st;
  st.eps_abs = st.eps_rel = 1e-6;
  QpSolver solver(std::move(relaxed), st);
  const QpResult res = solver.solve();
  std::ostringstream msg;
  msg << "centroidal QP infeasible";
  if (res.status == QpStatus::kSolved) {
    const Eigen::VectorXd Ax = A * res.x;
    for (int r = L.cone_start; r < L.n_rows; ++r) {
      const double viol = std::max(lo[r] - Ax[r], Ax[r] - up[r]);
      if (viol > 1e-6) {
        const char* family = r >= L.trust_start ? "trust region"
                             : r >= L.reach_start ? "reach limit"
                                                  : "friction cone";
        int step = -1;
        if (r >= L.trust_start) step = (r - L.trust_start) / 3;
        else if (r >= L.reach_start) {
          int k = r - L.reach_start;
          for (int s = 0; s < L.N && step < 0; ++s)
            for (int e = 0; e < kNumLegs; ++e)
              if (L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] >= 0 &&
                  k-- == 0)
                step = s;
        } else {
          int k = (r - L.cone_start) / 5;
          for (int s = 0; s < L.N && step < 0; ++s)
            for (int e = 0; e < kNumLegs; ++e)
              if (L.force_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] >= 0 &&
                  k-- == 0)
                step = s;
        }
        msg << ": first violated constraint family: " << family << ", step " << step;
        throw std::runtime_error(msg.str());
      }
    }
    msg << ": dynamics conflict with fixed contact plan";
  } else {
    msg << ": dynamics rows alone are infeasible";
  }
  throw std::runtime_error(msg.str());
}

}  // namespace

Eigen::Vector3d ContactForceSet::total_force() const {
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (const auto& e : eff)
    if (e.active) s += e.force;
  return s;
}

CentroidalState integrate_step(const CentroidalState& prev, const ContactForceSet& forces,
                               const std::array<Eigen::Vector3d, kNumLegs>& foot_pos,
                               const RobotModel& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
  CentroidalState next;
  Eigen::Vector3d f_sum = Eigen::Vector3d::Zero();
  for (const auto& e : forces.eff)
    if (e.active) f_sum += e.force;
  next.lin_momentum = prev.lin_momentum + (model.mass * gravity_vec(model) + f_sum) * dt;
  next.com = prev.com + next.lin_momentum * (dt / model.mass);
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
  for (int e = 0; e < kNumLegs; ++e) {
    const auto& eff = forces.eff[static_cast<std::size_t>(e)];
    if (!eff.active) continue;
    torque += (foot_pos[static_cast<std::size_t>(e)] - next.com).cross(eff.force) +
              cop_torque(eff);
  }
  next.ang_momentum = prev.ang_momentum + torque * dt;
  return next;
}

double ConstraintReport::max_violation() const {
  return std::max({cop_violation, cone_violation, unilateral_violation, reach_violation,
                   dynamics_residual});
}

std::string ConstraintReport::to_string() const {
  std::ostringstream os;
  os << "cop: " << cop_violation << "  cone: " << cone_violation
     << "  unilateral: " << unilateral_violation << "  reach: " << reach_violation
     << "  dynamics: " << dynamics_residual;
  return os.str();
}

ConstraintReport check_constraints(const CentroidalTrajectory& traj, const RobotModel& model) {
  ConstraintReport rep;
  rep.cop_violation = rep.cone_violation = rep.unilateral_violation = rep.reach_violation =
      -kInf;
  rep.dynamics_residual = 0.0;
  const int N = traj.horizon();
  for (int s = 0; s < N; ++s) {
    const auto& fs = traj.forces[static_cast<std::size_t>(s)];
    const auto& feet = traj.foot_pos[static_cast<std::size_t>(s)];
    const auto& c_next = traj.states[static_cast<std::size_t>(s) + 1].com;
    for (int e = 0; e < kNumLegs; ++e) {
      const auto& eff = fs.eff[static_cast<std::size_t>(e)];
      if (!eff.active) continue;
      rep.unilateral_violation = std::max(rep.unilateral_violation, -eff.force.z());
      rep.cone_violation = std::max(
          rep.cone_violation, eff.force.head<2>().norm() - model.friction_mu * eff.force.z());
      rep.cop_violation =
          std::max({rep.cop_violation, std::abs(eff.cop.x()) - model.cop_half_extents.x(),
                    std::abs(eff.cop.y()) - model.cop_half_extents.y()});
      rep.reach_violation =
          std::max(rep.reach_violation,
                   (feet[static_cast<std::size_t>(e)] - c_next).norm() - model.max_leg_reach);
    }
    const CentroidalState again = integrate_step(traj.states[static_cast<std::size_t>(s)], fs,
                                                 feet, model, traj.dt);
    const auto& stored = traj.states[static_cast<std::size_t>(s) + 1];
    const double resid =
        std::max({(again.com - stored.com).cwiseAbs().maxCoeff(),
                  (again.lin_momentum - stored.lin_momentum).cwiseAbs().maxCoeff(),
                  (again.ang_momentum - stored.ang_momentum).cwiseAbs().maxCoeff()});
    rep.dynamics_residual = std::max(rep.dynamics_residual, resid);
  }
  return rep;
}

Eigen::Matrix<double, 6, 1> contact_wrench(const ContactForceSet& forces,
                                           const std::array<Eigen::Vector3d, kNumLegs>& foot_pos,
                                           const Eigen::Vector3d& com) {
  Eigen::Matrix<double, 6, 1> w = Eigen::Matrix<double, 6, 1>::Zero();
  for (int e = 0; e < kNumLegs; ++e) {
    const auto& eff = forces.eff[static_cast<std::size_t>(e)];
    if (!eff.active) continue;
    w.head<3>() += eff.force;
    w.tail<3>() +=
        (foot_pos[static_cast<std::size_t>(e)] - com).cross(eff.force) + cop_torque(eff);
  }
  return w;
}

StepContacts contacts_at_step(const MotionDescription& d, int step) {
  StepContacts out;
  const double t_mid = (step + 0.5) * d.dt;
  for (int e = 0; e < kNumLegs; ++e) {
    const FootRef ref = foot_reference(d, e, t_mid);
    out.active[static_cast<std::size_t>(e)] = ref.in_stance;
    out.pos[static_cast<std::size_t>(e)] = ref.pos;
  }
  return out;
}

CentroidalTrajectory solve_centroidal(const MotionDescription& description,
                                      const RobotModel& model, const OptSettings& settings) {
  const auto t_begin = std::chrono::steady_clock::now();
  const double dt = description.dt;
  const Layout L = Layout::build(description);
  if (L.N <= 0) throw std::invalid_argument("solve_centroidal: empty horizon");
  const CostWeights w(settings, dt);

  std::vector<Eigen::Vector3d> ref(static_cast<std::size_t>(L.N) + 1);
  for (int t = 0; t <= L.N; ++t)
    ref[static_cast<std::size_t>(t)] = com_reference(description, t * dt);

  CentroidalState x0;
  x0.com = ref[0];

  Eigen::SparseMatrix<double> P, A;
  Eigen::VectorXd q, lo, up;
  build_cost(L, w, ref, P, q);

  std::vector<Eigen::Vector3d> com_bar = ref;  // linearization point
  double radius = settings.trust_radius;
  build_constraints(L, model, dt, x0, com_bar, radius, A, lo, up);

  QpProblem prob;
  prob.P = P;
  prob.q = q;
  prob.A = A;
  prob.l = lo;
  prob.u = up;
  QpSettings qp_st;
  qp_st.eps_abs = qp_st.eps_rel = settings.qp_tol;
  QpSolver solver(std::move(prob), qp_st);

  CentroidalTrajectory best;
  double best_merit = kInf;
  double prev_merit = kInf;
  bool have_accepted = false;
  bool have_final = false;
  int final_maxiter = 0;
  // Early outer iterations only steer the linearization point, so the QP is
  // solved loosely at first and tightened as the trust region settles. The
  // returned trajectory always comes from a full-tolerance solve.
  double eps = std::max(settings.qp_tol, 1e-4);
  // Candidates are judged on cost plus a penalty on true constraint
  // violations; a candidate violating more than the ceiling must never move
  // the linearization point, or the next trust region can turn infeasible.
  constexpr double kMeritPenalty = 1e5;
  constexpr double kFeasCeiling = 1e-3;
  SolveStats stats;

  for (int outer = 0; outer < settings.max_outer; ++outer) {
    stats.outer_iters = outer + 1;
    solver.set_tolerance(eps, eps);
    const bool at_final = eps <= settings.qp_tol * 1.0000001;
    const QpResult res = solver.solve();
    stats.qp_iters += res.iterations;
    if (res.status == QpStatus::kPrimalInfeasible)
      diagnose_infeasible(L, P, q, A, lo, up);
    if (res.status == QpStatus::kDualInfeasible)
      throw std::runtime_error("centroidal QP dual infeasible (unbounded objective)");
    if (res.status == QpStatus::kMaxIter && at_final && ++final_maxiter > 2)
      throw std::runtime_error("centroidal QP exceeded iteration limit at final tolerance");
    const bool usable_final = at_final && res.status == QpStatus::kSolved;

    CentroidalTrajectory cand = integrate_all(L, model, dt, x0, extract_forces(L, res.x));
    cand.cost = eval_cost(cand, w, ref);
    const double J = cand.cost.total();
    const double viol = std::max(0.0, check_constraints(cand, model).max_violation());
    const double merit = J + kMeritPenalty * viol;
    stats.objective_history.push_back(J);
    if (settings.verbose)
      std::printf("  scvx %2d: J=%.8e viol=%.2e qp_iters=%d radius=%.4f eps=%.1e\n", outer, J,
                  viol, res.iterations, radius, eps);

    if (viol > kFeasCeiling || (have_accepted && merit > prev_merit + 1e-12)) {
      if (!at_final) {
        // The loose solve was not trustworthy; retry the same subproblem
        // at a tighter tolerance before touching the trust region.
        eps = std::max(settings.qp_tol, eps * 1e-2);
        continue;
      }
      radius *= 0.5;
      if (radius < settings.min_trust_radius) break;
      build_constraints(L, model, dt, x0, com_bar, radius, A, lo, up);
      solver.update_bounds(lo, up);
      continue;
    }

    double step_change = 0.0;
    for (int t = 1; t <= L.N; ++t)
      step_change =
          std::max(step_change, (cand.states[static_cast<std::size_t>(t)].com -
                                 com_bar[static_cast<std::size_t>(t)])
                                    .cwiseAbs()
                                    .maxCoeff());
    stats.final_step_change = step_change;

    prev_merit = merit;
    have_accepted = true;
    for (int t = 1; t <= L.N; ++t)
      com_bar[static_cast<std::size_t>(t)] = cand.states[static_cast<std::size_t>(t)].com;
    if (usable_final) {
      if (!have_final || merit < best_merit) {
        best_merit = merit;
        best = std::move(cand);
      }
      have_final = true;
    } else if (!have_final && merit < best_merit) {
      best_merit = merit;
      best = std::move(cand);
    }

    if (step_change <= settings.outer_tol && usable_final) {
      stats.converged = true;
      break;
    }
    if (step_change <= settings.outer_tol)
      eps = settings.qp_tol;  // one extra pass at full tolerance
    else
      eps = std::max(settings.qp_tol, eps * 1e-2);
    radius = std::min(radius * 1.5, settings.trust_radius);
    build_constraints(L, model, dt, x0, com_bar, radius, A, lo, up);
    solver.update(nullptr, &A, nullptr, &lo, &up);
  }

  if (!have_accepted) throw std::runtime_error("centroidal solver made no progress");
  if (!stats.converged && settings.verbose)
    std::printf("  scvx: outer loop hit iteration/radius limit, returning best iterate\n");
  stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  best.stats = stats;
  return best;
}

}  // namespace quadplan
