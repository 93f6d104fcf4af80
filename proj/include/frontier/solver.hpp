#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/SparseCore>

#include "frontier/types.hpp"

namespace frontier {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ToleranceConfig {
  double primal = 1e-8;        // absolute, per constraint row
  double dual = 1e-9;          // relative dual residual
  double complementarity = 1e-12;  // duality gap relative to max(1, |objective|)
  double stationarity = 1e-6;  // smooth problems
  int max_iterations = 200;    // interior point iterations per affine solve
  int max_outer_iterations = 1000;  // SQP iterations, multiplicative models
};

enum class SolveStatus { optimal, max_iterations, infeasible, numerical_failure };

const char* to_string(SolveStatus s);

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
};

struct Solution {
  VectorXd v;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  KktResiduals kkt;
  int iterations = 0;
  double wall_time = 0.0;
  std::string message;
  // Lagrange multipliers, sign convention:
  //   grad f + A_eq' eq + A_in' in - bound = 0, in >= 0, bound >= 0.
  VectorXd eq_multipliers;
  VectorXd in_multipliers;
  VectorXd bound_multipliers;  // one per variable, zero for free variables

  bool optimal() const { return status == SolveStatus::optimal; }
};

/// minimize 0.5 v'Qv + c'v  s.t.  A_eq v = b_eq,  A_in v <= b_in,  v >= lower.
///
/// Q must be symmetric positive semidefinite and may be empty (LP). Entries of
/// `lower` equal to -infinity leave the variable free; an empty `lower` makes
/// every variable free.
struct AffineProblem {
  SparseMatrix q;
  VectorXd c;
  SparseMatrix a_eq;
  VectorXd b_eq;
  SparseMatrix a_in;
  VectorXd b_in;
  VectorXd lower;

  Index num_variables() const { return c.size(); }
  double objective(const VectorXd& v) const;
};

/// Optional starting point for the interior point iterations. Only the primal
/// vector is reused; slacks and duals are re-centred around it.
struct WarmStart {
  VectorXd v;
};

/// Primal-dual interior point (Mehrotra predictor-corrector) on the dense
/// normal-equation system. Deterministic for fixed inputs.
Solution solve_affine(const AffineProblem& p, const ToleranceConfig& tol = {},
                      const std::optional<WarmStart>& warm = std::nullopt);

/// Smooth problem for the log-transformed estimators.
///
/// minimize f(v)  s.t.  h(v) = 0,  A_eq v = b_eq,  A_in v <= b_in,  v >= lower.
///
/// `hessian` must return a positive semidefinite model of the objective
/// curvature (exact when f is convex quadratic). The smooth equalities are
/// linearised at every iterate; their curvature is not modelled, which makes
/// the scheme Gauss-Newton for least-squares objectives.
struct SmoothProblem {
  std::function<double(const VectorXd&)> objective;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<SparseMatrix(const VectorXd&)> hessian;

  Index num_smooth_equalities = 0;
  std::function<VectorXd(const VectorXd&)> constraints;        // h(v)
  std::function<SparseMatrix(const VectorXd&)> jacobian;       // dh/dv

  SparseMatrix a_eq;
  VectorXd b_eq;
  SparseMatrix a_in;
  VectorXd b_in;
  VectorXd lower;

  VectorXd initial_point;
};

/// Sequential quadratic programming with a proximal (Levenberg-style) trust
/// region and an l1 merit function. Every subproblem goes through
/// solve_affine. Returns a local KKT point.
Solution solve_smooth(const SmoothProblem& p, const ToleranceConfig& tol = {});

/// Sparse helpers shared by the problem builders.
SparseMatrix sparse_from_triplets(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& t);

}  // namespace frontier
