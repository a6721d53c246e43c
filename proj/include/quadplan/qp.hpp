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

#ifndef QUADPLAN_QP_HPP_
#define QUADPLAN_QP_HPP_

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace quadplan {

// Convex QP in the two-sided form
//   min 1/2 x'Px + q'x   s.t.  l <= Ax <= u
// Equality rows are expressed as l == u.
struct QpProblem {
  Eigen::SparseMatrix<double> P;  // n x n, symmetric PSD
  Eigen::VectorXd q;
  Eigen::SparseMatrix<double> A;  // m x n
  Eigen::VectorXd l, u;

  int num_vars() const { return static_cast<int>(q.size()); }
  int num_cons() const { return static_cast<int>(l.size()); }
};

struct QpSettings {
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  int max_iter = 50000;
  int check_interval = 25;
  double sigma = 1e-6;
  double rho = 0.1;
  double rho_eq_scale = 1e3;  // stiffer penalty on equality rows
  double alpha = 1.6;         // over-relaxation
  bool adaptive_rho = true;
  bool scaling = true;
  int scaling_iters = 10;
  bool polish = true;
  double polish_reg = 1e-9;
  int polish_refine_iters = 3;
  // Attempt an active-set polish every so many iterations; a polished point
  // that verifiably meets eps_abs/eps_rel ends the solve early. 0 disables.
  int polish_interval = 2500;
  double eps_infeas = 1e-9;
};

enum class QpStatus { kSolved, kMaxIter, kPrimalInfeasible, kDualInfeasible };

const char* to_string(QpStatus s);

struct QpResult {
  QpStatus status = QpStatus::kMaxIter;
  Eigen::VectorXd x;  // primal
  Eigen::VectorXd y;  // dual of l <= Ax <= u
  Eigen::VectorXd z;  // final projection of Ax
  double prim_res = 0.0;
  double dual_res = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool polished = false;
};

// Operator-splitting solver with Ruiz equilibration, per-row penalty weights,
// infeasibility certificates, warm starting and an active-set polish step.
// The KKT sparsity pattern is analyzed once; value updates that keep the
// pattern only pay a numeric refactorization.
class QpSolver {
 public:
  QpSolver(QpProblem prob, QpSettings settings = {});

  // New values with the same sparsity pattern; null leaves a field unchanged.
  void update(const Eigen::SparseMatrix<double>* P, const Eigen::SparseMatrix<double>* A,
              const Eigen::VectorXd* q, const Eigen::VectorXd* l, const Eigen::VectorXd* u);

  // Bound-only change: no refactorization needed.
  void update_bounds(const Eigen::VectorXd& l, const Eigen::VectorXd& u);

  void warm_start(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  /// Convergence tolerances for subsequent solves; no refactorization.
  void set_tolerance(double eps_abs, double eps_rel);

  QpResult solve();

  const QpProblem& problem() const { return prob_; }

 private:
  void equilibrate();
  void assemble_kkt();
  void factorize();
  double unscaled_objective(const Eigen::VectorXd& x_unscaled) const;
  bool polish(QpResult& res) const;
  bool meets_tolerance(const QpResult& r) const;

  QpProblem prob_;          // original (unscaled) data
  QpSettings settings_;
  Eigen::VectorXd d_, e_;   // Ruiz scalings (vars, constraints)
  double cost_scale_ = 1.0;
  Eigen::SparseMatrix<double> Ps_, As_;  // scaled data
  Eigen::VectorXd qs_, ls_, us_;
  Eigen::VectorXd rho_;     // per-row penalty
  Eigen::SparseMatrix<double> kkt_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool pattern_ready_ = false;
  bool values_dirty_ = true;
  bool have_warm_ = false;
  Eigen::VectorXd xw_, yw_, zw_;  // warm-start iterates (scaled space)
};

/// One-shot dense convenience wrapper: equality rows A_eq x = b_eq stacked
/// with two-sided inequality rows l_in <= A_in x <= u_in.
QpResult qp_solve(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                  const Eigen::MatrixXd& A_eq, const Eigen::VectorXd& b_eq,
                  const Eigen::MatrixXd& A_in, const Eigen::VectorXd& l_in,
                  const Eigen::VectorXd& u_in, double tol = 1e-8);

}  // namespace quadplan

#endif  // QUADPLAN_QP_HPP_
