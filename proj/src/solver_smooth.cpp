#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "frontier/solver.hpp"

namespace frontier {

namespace {

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

void append_scaled(std::vector<Eigen::Triplet<double>>& t, const SparseMatrix& m, Index row_offset, Index col_offset) {
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) t.emplace_back(row_offset + r, col_offset + it.col(), it.value());
}

}  // namespace

// Sl1QP: each subproblem linearizes h and makes the linearization elastic,
//   min  g'd + 1/2 d'(H + rho I)d + nu * sum(p + q)
//   s.t. h + J d = q - p,  affine rows exact,  p, q >= 0,
// posed in w = v + d so the affine constraints stay in their original form.
Solution solve_smooth(const SmoothProblem& p, const ToleranceConfig& tol) {
  const auto started = std::chrono::steady_clock::now();
  const Index n = p.initial_point.size();
  const Index n_h = p.num_smooth_equalities;
  if (!p.objective || !p.gradient || !p.hessian) throw Error(ErrorKind::invalid_argument, "solve_smooth: objective callbacks missing");
  if (n_h > 0 && (!p.constraints || !p.jacobian)) throw Error(ErrorKind::invalid_argument, "solve_smooth: constraint callbacks missing");
  if (!p.initial_point.allFinite()) throw Error(ErrorKind::invalid_argument, "solve_smooth: initial point is not finite");
  if (p.lower.size() != 0 && p.lower.size() != n) throw Error(ErrorKind::invalid_argument, "solve_smooth: lower bound size mismatch");
  for (Index j = 0; j < p.lower.size(); ++j) {
    if (p.initial_point[j] < p.lower[j]) throw Error(ErrorKind::invalid_argument, "solve_smooth: initial point violates a lower bound");
  }

  auto eval_h = [&](const VectorXd& v) -> VectorXd {
    if (n_h == 0) return VectorXd(0);
    VectorXd h = p.constraints(v);
    if (h.size() != n_h) throw Error(ErrorKind::invalid_argument, "solve_smooth: constraint callback size mismatch");
    return h;
  };
  auto checked = [](double x, const char* what) {
    if (!std::isfinite(x)) throw Error(ErrorKind::solver_failure, std::string("solve_smooth: non-finite ") + what);
    return x;
  };

  const Index n_w = n + 2 * n_h;
  VectorXd lower(n_w);
  lower.head(n) = p.lower.size() ? p.lower : VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  lower.tail(2 * n_h).setZero();

  const Index n_aeq = p.a_eq.rows();
  const Index n_ain = p.a_in.rows();
  SparseMatrix a_in(n_ain, n_w);
  if (n_ain > 0) {
    std::vector<Eigen::Triplet<double>> t;
    append_scaled(t, p.a_in, 0, 0);
    a_in = sparse_from_triplets(n_ain, n_w, t);
  }

  auto affine_gap = [&](const VectorXd& v) {
    double gap = 0.0;
    if (n_aeq > 0) gap = inf_norm(p.a_eq * v - p.b_eq);
    if (n_ain > 0) gap = std::max(gap, (p.a_in * v - p.b_in).cwiseMax(0.0).maxCoeff());
    return gap;
  };

  VectorXd v = p.initial_point;
  VectorXd h = eval_h(v);
  // An infeasible start (warm starts after rows were added) moves straight to
  // the first subproblem solution; later iterates keep the affine rows.
  bool restore = affine_gap(v) > tol.primal;
  double f = checked(p.objective(v), "objective");
  double nu = std::max(10.0, 10.0 * inf_norm(p.gradient(v)));
  double rho = 1e-4;

  ToleranceConfig inner = tol;
  inner.max_iterations = std::max(tol.max_iterations, 200);
  inner.complementarity = std::max(tol.complementarity, 1e-10);

  Solution out;
  out.status = SolveStatus::max_iterations;
  out.message = "outer iteration limit reached";
  VectorXd eq_mult = VectorXd::Zero(n_h + n_aeq);
  VectorXd in_mult = VectorXd::Zero(n_ain);
  VectorXd bound_mult = VectorXd::Zero(n);
  bool have_multipliers = false;

  int outer = 0;
  for (; outer < tol.max_outer_iterations; ++outer) {
    const VectorXd g = p.gradient(v);
    if (!g.allFinite()) throw Error(ErrorKind::solver_failure, "solve_smooth: non-finite gradient");
    const SparseMatrix hess = p.hessian(v);
    const SparseMatrix jac = n_h > 0 ? p.jacobian(v) : SparseMatrix(0, n);
    if (n_h > 0 && (jac.rows() != n_h || jac.cols() != n)) throw Error(ErrorKind::invalid_argument, "solve_smooth: jacobian shape mismatch");

    // Convergence test on the current iterate with the last QP multipliers.
    const double feas = std::max(inf_norm(h), affine_gap(v));
    if (have_multipliers) {
      VectorXd r = g;
      if (n_h > 0) r += jac.transpose() * eq_mult.head(n_h);
      if (n_aeq > 0) r += p.a_eq.transpose() * eq_mult.tail(n_aeq);
      if (n_ain > 0) r += p.a_in.transpose() * in_mult;
      r -= bound_mult;
      const double stat = inf_norm(r) / (1.0 + inf_norm(g));
      out.kkt = {feas, stat, 0.0};
      if (n_ain > 0) {
        const VectorXd slack = p.b_in - p.a_in * v;
        double comp = 0.0;
        for (Index i = 0; i < n_ain; ++i) comp = std::max(comp, std::abs(in_mult[i] * slack[i]));
        out.kkt.complementarity = comp;
      }
      if (feas <= tol.primal && stat <= tol.stationarity && out.kkt.complementarity <= tol.stationarity) {
        out.status = SolveStatus::optimal;
        out.message.clear();
        break;
      }
    }

    bool accepted = false;
    while (!accepted) {
      AffineProblem qp;
      std::vector<Eigen::Triplet<double>> tq;
      for (Index r = 0; r < hess.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(hess, r); it; ++it) tq.emplace_back(r, it.col(), it.value());
      for (Index j = 0; j < n; ++j) tq.emplace_back(j, j, rho);
      qp.q = sparse_from_triplets(n_w, n_w, tq);
      qp.c = VectorXd::Zero(n_w);
      qp.c.head(n) = g - (hess * v + rho * v);
      qp.c.tail(2 * n_h).setConstant(nu);

      std::vector<Eigen::Triplet<double>> te;
      append_scaled(te, jac, 0, 0);
      for (Index i = 0; i < n_h; ++i) {
        te.emplace_back(i, n + i, 1.0);
        te.emplace_back(i, n + n_h + i, -1.0);
      }
      append_scaled(te, p.a_eq, n_h, 0);
      qp.a_eq = sparse_from_triplets(n_h + n_aeq, n_w, te);
      qp.b_eq.resize(n_h + n_aeq);
      if (n_h > 0) qp.b_eq.head(n_h) = jac * v - h;
      if (n_aeq > 0) qp.b_eq.tail(n_aeq) = p.b_eq;
      qp.a_in = a_in;
      qp.b_in = p.b_in;
      qp.lower = lower;

      VectorXd w0(n_w);
      w0.head(n) = v;
      for (Index i = 0; i < n_h; ++i) {
        w0[n + i] = std::max(-h[i], 0.0);
        w0[n + n_h + i] = std::max(h[i], 0.0);
      }
      Solution sub = solve_affine(qp, inner, WarmStart{w0});
      if (!sub.optimal()) sub = solve_affine(qp, inner);
      out.iterations += sub.iterations;
      if (sub.status == SolveStatus::infeasible) {
        out.status = SolveStatus::infeasible;
        out.message = "affine constraints are infeasible";
        goto done;
      }
      if (!sub.optimal() && sub.kkt.primal > 1e-6) {
        out.status = SolveStatus::numerical_failure;
        out.message = std::string("subproblem failed: ") + to_string(sub.status);
        goto done;
      }

      if (restore) {
        v = sub.v.head(n);
        f = checked(p.objective(v), "objective");
        h = eval_h(v);
        eq_mult = sub.eq_multipliers;
        in_mult = sub.in_multipliers;
        bound_mult = sub.bound_multipliers.head(n);
        have_multipliers = true;
        restore = false;
        accepted = true;
        break;
      }

      const VectorXd d = sub.v.head(n) - v;
      const double elastic = sub.v.tail(2 * n_h).sum();
      const double model_f = g.dot(d) + 0.5 * d.dot(hess * d);
      const double h1 = n_h ? h.lpNorm<1>() : 0.0;
      const double pred = nu * (h1 - elastic) - model_f;
      const double merit = f + nu * h1;

      if (inf_norm(d) <= 1e-14 * (1.0 + inf_norm(v)) || pred <= 1e-15 * (1.0 + std::abs(merit))) {
        // No model decrease left: v is stationary for the current penalty.
        if (n_h > 0 && elastic > tol.primal && nu < 1e10) {
          nu *= 10.0;
          continue;
        }
        eq_mult = sub.eq_multipliers;
        in_mult = sub.in_multipliers;
        bound_mult = sub.bound_multipliers.head(n);
        have_multipliers = true;
        accepted = true;
        if (feas <= tol.primal) {
          out.status = SolveStatus::optimal;
          out.message.clear();
          out.kkt.primal = feas;
          goto done;
        }
        break;
      }

      const VectorXd trial = sub.v.head(n);
      double f_trial = std::numeric_limits<double>::infinity();
      VectorXd h_trial;
      try {
        f_trial = p.objective(trial);
        h_trial = eval_h(trial);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorKind::solver_failure, std::string("solve_smooth: callback failed: ") + e.what());
      }
      const bool finite = std::isfinite(f_trial) && h_trial.allFinite();
      const double merit_trial = finite ? f_trial + nu * (n_h ? h_trial.lpNorm<1>() : 0.0) : merit + 1.0;
      const double ratio = finite ? (merit - merit_trial) / pred : -1.0;

      if (ratio > 1e-4) {
        v = trial;
        f = f_trial;
        h = h_trial;
        eq_mult = sub.eq_multipliers;
        in_mult = sub.in_multipliers;
        bound_mult = sub.bound_multipliers.head(n);
        have_multipliers = true;
        if (ratio > 0.75) rho = std::max(rho * 0.25, 1e-10);
        else if (ratio < 0.25) rho *= 4.0;
        // Multipliers at the penalty bound signal a too small penalty.
        if (n_h > 0 && inf_norm(sub.eq_multipliers.head(n_h)) > 0.5 * nu) nu *= 10.0;
        accepted = true;
      } else {
        rho *= 10.0;
        if (rho > 1e14) {
          out.status = SolveStatus::numerical_failure;
          out.message = "step control failed to find merit decrease";
          goto done;
        }
      }
    }
  }

done:
  out.v = v;
  out.objective_value = checked(p.objective(v), "objective");
  out.eq_multipliers = eq_mult;
  out.in_multipliers = in_mult;
  out.bound_multipliers = bound_mult;
  if (out.kkt.primal == 0.0) out.kkt.primal = inf_norm(h);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  (void)outer;
  return out;
}

}  // namespace frontier
