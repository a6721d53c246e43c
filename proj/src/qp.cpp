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

#include "quadplan/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace quadplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Max |entry| per column of a sparse matrix.
Eigen::VectorXd col_inf_norms(const Eigen::SparseMatrix<double>& M) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(M.cols());
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
      n[it.col()] = std::max(n[it.col()], std::abs(it.value()));
  return n;
}

Eigen::VectorXd row_inf_norms(const Eigen::SparseMatrix<double>& M) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(M.rows());
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
      n[it.row()] = std::max(n[it.row()], std::abs(it.value()));
  return n;
}

void scale_rows_cols(Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& r,
                     const Eigen::VectorXd& c) {
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
      it.valueRef() *= r[it.row()] * c[it.col()];
}

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kSolved: return "solved";
    case QpStatus::kMaxIter: return "max_iterations";
    case QpStatus::kPrimalInfeasible: return "primal_infeasible";
    case QpStatus::kDualInfeasible: return "dual_infeasible";
  }
  return "unknown";
}

QpSolver::QpSolver(QpProblem prob, QpSettings settings)
    : prob_(std::move(prob)), settings_(settings) {
  const int n = prob_.num_vars();
  const int m = prob_.num_cons();
  if (prob_.P.rows() != n || prob_.P.cols() != n || prob_.A.rows() != m || prob_.A.cols() != n ||
      prob_.u.size() != m)
    throw std::invalid_argument("qp: inconsistent problem dimensions");
  if ((prob_.l.array() > prob_.u.array()).any())
    throw std::invalid_argument("qp: lower bound exceeds upper bound");
  prob_.P.makeCompressed();
  prob_.A.makeCompressed();
}

void QpSolver::update(const Eigen::SparseMatrix<double>* P, const Eigen::SparseMatrix<double>* A,
                      const Eigen::VectorXd* q, const Eigen::VectorXd* l,
                      const Eigen::VectorXd* u) {
  if (P != nullptr) {
    if (P->rows() != prob_.P.rows() || P->nonZeros() != prob_.P.nonZeros())
      throw std::invalid_argument("qp update: P pattern changed");
    prob_.P = *P;
    prob_.P.makeCompressed();
  }
  if (A != nullptr) {
    if (A->rows() != prob_.A.rows() || A->nonZeros() != prob_.A.nonZeros())
      throw std::invalid_argument("qp update: A pattern changed");
    prob_.A = *A;
    prob_.A.makeCompressed();
  }
  if (q != nullptr) prob_.q = *q;
  if (l != nullptr) prob_.l = *l;
  if (u != nullptr) prob_.u = *u;
  values_dirty_ = true;
}

void QpSolver::update_bounds(const Eigen::VectorXd& l, const Eigen::VectorXd& u) {
  if (l.size() != prob_.l.size() || u.size() != prob_.u.size())
    throw std::invalid_argument("qp update_bounds: size changed");
  if ((l.array() > u.array()).any())
    throw std::invalid_argument("qp update_bounds: lower bound exceeds upper bound");
  prob_.l = l;
  prob_.u = u;
  if (!values_dirty_) {
    ls_ = l.cwiseProduct(e_);
    us_ = u.cwiseProduct(e_);
  }
}

void QpSolver::warm_start(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  // Stored in unscaled form; converted when solve() has fresh scalings.
  xw_ = x;
  yw_ = y;
  zw_.resize(0);
  have_warm_ = true;
}

void QpSolver::set_tolerance(double eps_abs, double eps_rel) {
  settings_.eps_abs = eps_abs;
  settings_.eps_rel = eps_rel;
}

void QpSolver::equilibrate() {
  const int n = prob_.num_vars();
  const int m = prob_.num_cons();
  Ps_ = prob_.P;
  As_ = prob_.A;
  qs_ = prob_.q;
  ls_ = prob_.l;
  us_ = prob_.u;
  d_ = Eigen::VectorXd::Ones(n);
  e_ = Eigen::VectorXd::Ones(m);
  cost_scale_ = 1.0;
  if (!settings_.scaling) return;

  for (int iter = 0; iter < settings_.scaling_iters; ++iter) {
    const Eigen::VectorXd pn = col_inf_norms(Ps_);
    const Eigen::VectorXd an = col_inf_norms(As_);
    const Eigen::VectorXd rn = row_inf_norms(As_);
    Eigen::VectorXd dd(n), de(m);
    for (int j = 0; j < n; ++j) {
      const double nj = std::max(pn[j], an[j]);
      dd[j] = nj > 1e-12 ? 1.0 / std::sqrt(nj) : 1.0;
    }
    for (int i = 0; i < m; ++i) de[i] = rn[i] > 1e-12 ? 1.0 / std::sqrt(rn[i]) : 1.0;
    scale_rows_cols(Ps_, dd, dd);
    scale_rows_cols(As_, de, dd);
    qs_ = qs_.cwiseProduct(dd);
    ls_ = ls_.cwiseProduct(de);
    us_ = us_.cwiseProduct(de);
    d_ = d_.cwiseProduct(dd);
    e_ = e_.cwiseProduct(de);

    const Eigen::VectorXd pcols = col_inf_norms(Ps_);
    double mean_p = pcols.size() > 0 ? pcols.mean() : 0.0;
    double gamma = std::max(mean_p, inf_norm(qs_));
    gamma = gamma > 1e-12 ? 1.0 / gamma : 1.0;
    Ps_ *= gamma;
    qs_ *= gamma;
    cost_scale_ *= gamma;
  }
}

void QpSolver::assemble_kkt() {
  const int n = prob_.num_vars();
  const int m = prob_.num_cons();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(Ps_.nonZeros() + 2 * As_.nonZeros() + n + m));
  for (int k = 0; k < Ps_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ps_, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int j = 0; j < n; ++j) trips.emplace_back(j, j, settings_.sigma);
  for (int k = 0; k < As_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(As_, k); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      trips.emplace_back(n + r, c, it.value());
      trips.emplace_back(c, n + r, it.value());
    }
  for (int i = 0; i < m; ++i) trips.emplace_back(n + i, n + i, -1.0 / rho_[i]);
  kkt_.resize(n + m, n + m);
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();
}

void QpSolver::factorize() {
  assemble_kkt();
  if (!pattern_ready_) {
    ldlt_.analyzePattern(kkt_);
    pattern_ready_ = true;
  }
  ldlt_.factorize(kkt_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("qp: KKT factorization failed");
}

double QpSolver::unscaled_objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(prob_.P * x) + prob_.q.dot(x);
}

QpResult QpSolver::solve() {
  const int n = prob_.num_vars();
  const int m = prob_.num_cons();

  if (values_dirty_) {
    equilibrate();
    rho_.resize(m);
    for (int i = 0; i < m; ++i) {
      const bool eq = std::isfinite(prob_.l[i]) && prob_.l[i] == prob_.u[i];
      rho_[i] = settings_.rho * (eq ? settings_.rho_eq_scale : 1.0);
    }
    factorize();
    values_dirty_ = false;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (have_warm_) {
    if (xw_.size() == n) x = xw_.cwiseQuotient(d_);
    if (yw_.size() == m) y = yw_.cwiseProduct(e_) * cost_scale_;
    if (zw_.size() == m)
      z = zw_.cwiseProduct(e_);
    else if (xw_.size() == n)
      z = (As_ * x).cwiseMax(ls_).cwiseMin(us_);
  }

  QpResult res;
  Eigen::VectorXd x_chk = x, y_chk = y;
  Eigen::VectorXd rhs(n + m), sol(n + m);
  int iter = 0;
  for (iter = 1; iter <= settings_.max_iter; ++iter) {
    rhs.head(n) = settings_.sigma * x - qs_;
    rhs.tail(m) = z - y.cwiseQuotient(rho_);
    sol = ldlt_.solve(rhs);
    const Eigen::VectorXd xt = sol.head(n);
    const Eigen::VectorXd zt = z + (sol.tail(m) - y).cwiseQuotient(rho_);

    const double a = settings_.alpha;
    const Eigen::VectorXd z_relaxed = a * zt + (1.0 - a) * z;
    x = a * xt + (1.0 - a) * x;
    const Eigen::VectorXd z_new =
        (z_relaxed + y.cwiseQuotient(rho_)).cwiseMax(ls_).cwiseMin(us_);
    y += rho_.cwiseProduct(z_relaxed - z_new);
    z = z_new;

    if (iter % settings_.check_interval != 0 && iter != settings_.max_iter) continue;

    // Residuals in original units.
    const Eigen::VectorXd Ax_s = As_ * x;
    const Eigen::VectorXd Px_s = Ps_ * x;
    const Eigen::VectorXd Aty_s = As_.transpose() * y;
    const Eigen::VectorXd Ax_u = Ax_s.cwiseQuotient(e_);
    const Eigen::VectorXd z_u = z.cwiseQuotient(e_);
    const Eigen::VectorXd rp_vec = Ax_u - z_u;
    const Eigen::VectorXd rd_vec =
        (Px_s + qs_ + Aty_s).cwiseQuotient(d_) / cost_scale_;
    const double rp = inf_norm(rp_vec);
    const double rd = inf_norm(rd_vec);
    const double eps_p =
        settings_.eps_abs + settings_.eps_rel * std::max(inf_norm(Ax_u), inf_norm(z_u));
    const double eps_d = settings_.eps_abs +
                         settings_.eps_rel / cost_scale_ *
                             std::max({inf_norm(Px_s.cwiseQuotient(d_)),
                                       inf_norm(Aty_s.cwiseQuotient(d_)),
                                       inf_norm(qs_.cwiseQuotient(d_))});
    res.prim_res = rp;
    res.dual_res = rd;
    static const bool trace = std::getenv("QUADPLAN_QP_TRACE") != nullptr;
    if (trace && iter % 2500 == 0) {
      int worst = 0;
      rp_vec.cwiseAbs().maxCoeff(&worst);
      std::fprintf(stderr,
                   "    qp iter=%6d rp=%.3e rd=%.3e eps_p=%.3e eps_d=%.3e rho0=%.3e "
                   "worst_row=%d l=%.3e u=%.3e Ax=%.3e\n",
                   iter, rp, rd, eps_p, eps_d, rho_[0], worst, prob_.l[worst], prob_.u[worst],
                   Ax_u[worst]);
    }
    if (rp <= eps_p && rd <= eps_d) {
      res.status = QpStatus::kSolved;
      break;
    }

    // Infeasibility certificates from iterate drift.
    const Eigen::VectorXd dy_u = (y - y_chk).cwiseProduct(e_) / cost_scale_;
    const Eigen::VectorXd dx_u = (x - x_chk).cwiseProduct(d_);
    const double ndy = inf_norm(dy_u), ndx = inf_norm(dx_u);
    if (ndy > 1e-14) {
      const double tol = settings_.eps_infeas * ndy;
      bool cert = inf_norm(prob_.A.transpose() * dy_u) <= tol;
      double support = 0.0;
      for (int i = 0; cert && i < m; ++i) {
        if (dy_u[i] > tol) {
          if (!std::isfinite(prob_.u[i])) cert = false;
          else support += prob_.u[i] * dy_u[i];
        } else if (dy_u[i] < -tol) {
          if (!std::isfinite(prob_.l[i])) cert = false;
          else support += prob_.l[i] * dy_u[i];
        }
      }
      if (cert && support <= -tol) {
        res.status = QpStatus::kPrimalInfeasible;
        break;
      }
    }
    if (ndx > 1e-14) {
      const double tol = settings_.eps_infeas * ndx;
      bool cert = inf_norm(prob_.P * dx_u) <= tol && prob_.q.dot(dx_u) <= -tol;
      const Eigen::VectorXd Adx = prob_.A * dx_u;
      for (int i = 0; cert && i < m; ++i) {
        const bool lo = std::isfinite(prob_.l[i]), hi = std::isfinite(prob_.u[i]);
        if (lo && hi) cert = std::abs(Adx[i]) <= tol;
        else if (hi) cert = Adx[i] <= tol;
        else if (lo) cert = Adx[i] >= -tol;
      }
      if (cert) {
        res.status = QpStatus::kDualInfeasible;
        break;
      }
    }
    x_chk = x;
    y_chk = y;

    // ADMM identifies the active set long before the residuals tighten; a
    // verified polish of the current iterate is an exact early exit.
    if (settings_.polish && settings_.polish_interval > 0 &&
        iter % settings_.polish_interval == 0 && iter != settings_.max_iter) {
      QpResult cand;
      cand.x = x.cwiseProduct(d_);
      cand.y = y.cwiseProduct(e_) / cost_scale_;
      cand.prim_res = rp;
      cand.dual_res = rd;
      if (polish(cand) && meets_tolerance(cand)) {
        cand.status = QpStatus::kSolved;
        cand.polished = true;
        cand.iterations = iter;
        xw_ = cand.x;
        yw_ = cand.y;
        zw_ = cand.z;
        have_warm_ = true;
        return cand;
      }
    }

    if (settings_.adaptive_rho && iter != settings_.max_iter) {
      const double np = rp / std::max(1e-12, std::max(inf_norm(Ax_u), inf_norm(z_u)));
      const double nd = rd / std::max(1e-12, std::max({inf_norm(Px_s.cwiseQuotient(d_)),
                                                       inf_norm(Aty_s.cwiseQuotient(d_)),
                                                       inf_norm(qs_.cwiseQuotient(d_))}) /
                                                  cost_scale_);
      const double ratio = std::sqrt(np / std::max(nd, 1e-16));
      if (ratio > 5.0 || ratio < 0.2) {
        rho_ = (rho_ * std::clamp(ratio, 1e-3, 1e3)).cwiseMax(1e-9).cwiseMin(1e9);
        factorize();
      }
    }
  }
  res.iterations = std::min(iter, settings_.max_iter);

  res.x = x.cwiseProduct(d_);
  res.y = y.cwiseProduct(e_) / cost_scale_;
  res.z = z.cwiseQuotient(e_);
  res.objective = unscaled_objective(res.x);
  xw_ = res.x;
  yw_ = res.y;
  zw_ = res.z;
  have_warm_ = true;

  if (settings_.polish) {
    if (polish(res)) {
      res.polished = true;
      // A polished max-iter point that meets the tolerances is a solution.
      if (res.status == QpStatus::kMaxIter && meets_tolerance(res))
        res.status = QpStatus::kSolved;
    }
  }
  return res;
}

bool QpSolver::meets_tolerance(const QpResult& r) const {
  const double pe =
      settings_.eps_abs +
      settings_.eps_rel * std::max(inf_norm(prob_.A * r.x), inf_norm(r.z));
  const double de = settings_.eps_abs +
                    settings_.eps_rel * std::max({inf_norm(prob_.P * r.x),
                                                  inf_norm(prob_.A.transpose() * r.y),
                                                  inf_norm(prob_.q)});
  return r.prim_res <= pe && r.dual_res <= de;
}

bool QpSolver::polish(QpResult& res) const {
  const int n = prob_.num_vars();
  const int m = prob_.num_cons();

  std::vector<int> act;
  std::vector<double> act_rhs;
  for (int i = 0; i < m; ++i) {
    const bool eq = std::isfinite(prob_.l[i]) && prob_.l[i] == prob_.u[i];
    if (eq) {
      act.push_back(i);
      act_rhs.push_back(prob_.l[i]);
    } else if (res.y[i] < 0.0 && std::isfinite(prob_.l[i])) {
      act.push_back(i);
      act_rhs.push_back(prob_.l[i]);
    } else if (res.y[i] > 0.0 && std::isfinite(prob_.u[i])) {
      act.push_back(i);
      act_rhs.push_back(prob_.u[i]);
    }
  }
  const int ma = static_cast<int>(act.size());

  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < prob_.P.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(prob_.P, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  const double reg = settings_.polish_reg;
  for (int j = 0; j < n; ++j) trips.emplace_back(j, j, reg);
  Eigen::SparseMatrix<double> At = prob_.A.transpose();
  for (int a = 0; a < ma; ++a) {
    const int row = act[static_cast<std::size_t>(a)];
    for (Eigen::SparseMatrix<double>::InnerIterator it(At, row); it; ++it) {
      trips.emplace_back(n + a, static_cast<int>(it.row()), it.value());
      trips.emplace_back(static_cast<int>(it.row()), n + a, it.value());
    }
    trips.emplace_back(n + a, n + a, -reg);
  }
  Eigen::SparseMatrix<double> K(n + ma, n + ma);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) return false;

  Eigen::VectorXd rhs(n + ma);
  rhs.head(n) = -prob_.q;
  for (int a = 0; a < ma; ++a) rhs[n + a] = act_rhs[static_cast<std::size_t>(a)];

  Eigen::VectorXd w = ldlt.solve(rhs);
  auto residual = [&](const Eigen::VectorXd& wv) {
    Eigen::VectorXd r = rhs;
    const Eigen::VectorXd xv = wv.head(n);
    const Eigen::VectorXd yv = wv.tail(ma);
    Eigen::VectorXd Aty = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd Axa(ma);
    for (int a = 0; a < ma; ++a) {
      const int row = act[static_cast<std::size_t>(a)];
      double dot = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(At, row); it; ++it) {
        Aty[it.row()] += it.value() * yv[a];
        dot += it.value() * xv[it.row()];
      }
      Axa[a] = dot;
    }
    r.head(n) -= prob_.P * xv + Aty;
    r.tail(ma) -= Axa;
    return r;
  };
  for (int it = 0; it < settings_.polish_refine_iters; ++it) w += ldlt.solve(residual(w));

  Eigen::VectorXd x_new = w.head(n);
  Eigen::VectorXd y_new = Eigen::VectorXd::Zero(m);
  for (int a = 0; a < ma; ++a) y_new[act[static_cast<std::size_t>(a)]] = w[n + a];

  const Eigen::VectorXd Ax = prob_.A * x_new;
  const Eigen::VectorXd z_new = Ax.cwiseMax(prob_.l).cwiseMin(prob_.u);
  const double rp = inf_norm(Ax - z_new);
  const double rd = inf_norm(prob_.P * x_new + prob_.q + prob_.A.transpose() * y_new);
  if (std::max(rp, rd) > std::max(res.prim_res, res.dual_res)) return false;

  res.x = x_new;
  res.y = y_new;
  res.z = z_new;
  res.prim_res = rp;
  res.dual_res = rd;
  res.objective = unscaled_objective(x_new);
  return true;
}

QpResult qp_solve(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                  const Eigen::MatrixXd& A_eq, const Eigen::VectorXd& b_eq,
                  const Eigen::MatrixXd& A_in, const Eigen::VectorXd& l_in,
                  const Eigen::VectorXd& u_in, double tol) {
  const int n = static_cast<int>(q.size());
  const int me = static_cast<int>(b_eq.size());
  const int mi = static_cast<int>(l_in.size());
  QpProblem prob;
  prob.P = P.sparseView();
  prob.q = q;
  Eigen::MatrixXd A(me + mi, n);
  if (me > 0) A.topRows(me) = A_eq;
  if (mi > 0) A.bottomRows(mi) = A_in;
  if (me + mi == 0) A.resize(0, n);
  prob.A = A.sparseView();
  prob.l.resize(me + mi);
  prob.u.resize(me + mi);
  prob.l.head(me) = b_eq;
  prob.u.head(me) = b_eq;
  prob.l.tail(mi) = l_in;
  prob.u.tail(mi) = u_in;
  QpSettings st;
  st.eps_abs = std::min(tol, 1e-8);
  st.eps_rel = std::min(tol, 1e-8);
  QpSolver solver(std::move(prob), st);
  return solver.solve();
}

}  // namespace quadplan
