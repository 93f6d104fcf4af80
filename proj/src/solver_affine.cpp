#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "frontier/solver.hpp"

namespace frontier {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

SparseMatrix sparse_from_triplets(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

double AffineProblem::objective(const VectorXd& v) const {
  double value = c.dot(v);
  if (q.rows() > 0) value += 0.5 * v.dot(q * v);
  return value;
}

namespace {

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Largest step in (0, 1] keeping x + a*dx strictly positive, damped by eta.
double max_step(const VectorXd& x, const VectorXd& dx, double eta) {
  double a = 1.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) a = std::min(a, -eta * x[i] / dx[i]);
  }
  return a;
}

void check_dimensions(const AffineProblem& p) {
  const Index n = p.num_variables();
  auto bad = [](const char* what) { throw Error(ErrorKind::invalid_argument, std::string("solve_affine: ") + what); };
  if (p.q.rows() != 0 && (p.q.rows() != n || p.q.cols() != n)) bad("Q must be n x n");
  if (p.a_eq.rows() != p.b_eq.size()) bad("A_eq rows must match b_eq");
  if (p.a_eq.rows() > 0 && p.a_eq.cols() != n) bad("A_eq columns must match the variable count");
  if (p.a_in.rows() != p.b_in.size()) bad("A_in rows must match b_in");
  if (p.a_in.rows() > 0 && p.a_in.cols() != n) bad("A_in columns must match the variable count");
  if (p.lower.size() != 0 && p.lower.size() != n) bad("lower bound size must match the variable count");
}

// Factorization of the reduced KKT system
//   [H  A'] [dv]   [r1]
//   [A  0 ] [dl] = [r2]
// through H_k = H + k A'A (positive definite whenever the KKT matrix is
// nonsingular) and the Schur complement A H_k^-1 A'.
class ReducedKkt {
 public:
  ReducedKkt(MatrixXd h, const SparseMatrix& a_eq, const MatrixXd& a_eq_t, double kappa)
      : a_eq_(a_eq), a_eq_t_(a_eq_t), kappa_(kappa) {
    if (a_eq.rows() > 0) {
      // H += k * A'A, exploiting the row sparsity of A.
      for (Index r = 0; r < a_eq.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator i(a_eq, r); i; ++i) {
          for (SparseMatrix::InnerIterator j(a_eq, r); j; ++j) {
            h(i.col(), j.col()) += kappa * i.value() * j.value();
          }
        }
      }
    }
    // Symmetric Jacobi scaling; the regularization is then relative to each
    // diagonal entry instead of the largest one.
    d_ = h.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    h = d_.asDiagonal() * h * d_.asDiagonal();
    double reg = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
      MatrixXd work = h;
      work.diagonal().array() += reg;
      llt_.compute(work);
      if (llt_.info() == Eigen::Success) {
        ok_ = true;
        break;
      }
      reg = reg == 0.0 ? 1e-15 : reg * 100.0;
    }
    if (!ok_) return;
    if (a_eq.rows() > 0) {
      m_ = d_.asDiagonal() * a_eq_t_;
      llt_.matrixL().solveInPlace(m_);
      MatrixXd s = MatrixXd(m_.transpose() * m_);
      const VectorXd sd = s.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      s = sd.asDiagonal() * s * sd.asDiagonal();
      sd_ = sd;
      double sreg = 0.0;
      for (int attempt = 0; attempt < 10; ++attempt) {
        MatrixXd work = s;
        work.diagonal().array() += sreg;
        schur_.compute(work);
        if (schur_.info() == Eigen::Success) break;
        sreg = sreg == 0.0 ? 1e-15 : sreg * 100.0;
      }
      if (schur_.info() != Eigen::Success) ok_ = false;
    }
  }

  bool ok() const { return ok_; }

  // Solves with rhs r1 in the original (non-augmented) form.
  void solve(const VectorXd& r1, const VectorXd& r2, VectorXd& dv, VectorXd& dl) const {
    VectorXd rk = r1;
    if (a_eq_.rows() > 0) rk += kappa_ * (a_eq_t_ * r2);
    VectorXd w = llt_.matrixL().solve(d_.cwiseProduct(rk));
    if (a_eq_.rows() > 0) {
      dl = sd_.cwiseProduct(schur_.solve(sd_.cwiseProduct(m_.transpose() * w - r2)));
      w -= m_ * dl;
    } else {
      dl.resize(0);
    }
    dv = d_.cwiseProduct(llt_.matrixU().solve(w));
  }

 private:

  const SparseMatrix& a_eq_;
  const MatrixXd& a_eq_t_;
  double kappa_;
  VectorXd d_, sd_;
  Eigen::LLT<MatrixXd> llt_;
  MatrixXd m_;
  Eigen::LLT<MatrixXd> schur_;
  bool ok_ = false;
};

}  // namespace

Solution solve_affine(const AffineProblem& p, const ToleranceConfig& tol, const std::optional<WarmStart>& warm) {
  const auto started = std::chrono::steady_clock::now();
  check_dimensions(p);

  const Index n = p.num_variables();
  const SparseMatrix empty_eq(0, n), empty_in(0, n);
  const SparseMatrix& a_eq = p.a_eq.rows() > 0 ? p.a_eq : empty_eq;
  const SparseMatrix& a_in = p.a_in.rows() > 0 ? p.a_in : empty_in;
  const Index n_eq = p.a_eq.rows();
  const Index n_in = a_in.rows();

  std::vector<Index> bounded;
  if (p.lower.size() == n) {
    for (Index j = 0; j < n; ++j)
      if (std::isfinite(p.lower[j])) bounded.push_back(j);
  }
  const Index n_b = static_cast<Index>(bounded.size());
  const Index n_comp = n_in + n_b;
  VectorXd lower_b(n_b);
  for (Index k = 0; k < n_b; ++k) lower_b[k] = p.lower[bounded[k]];

  MatrixXd q_dense = MatrixXd::Zero(n, n);
  const bool has_q = p.q.rows() > 0 && p.q.nonZeros() > 0;
  if (has_q) q_dense = MatrixXd(p.q);
  const MatrixXd a_eq_t = n_eq > 0 ? MatrixXd(a_eq.transpose()) : MatrixXd(n, 0);

  auto gather = [&](const VectorXd& full) {
    VectorXd out(n_b);
    for (Index k = 0; k < n_b; ++k) out[k] = full[bounded[k]];
    return out;
  };
  auto scatter_add = [&](VectorXd& full, const VectorXd& part, double sign) {
    for (Index k = 0; k < n_b; ++k) full[bounded[k]] += sign * part[k];
  };

  // Starting point.
  VectorXd v = warm && warm->v.size() == n ? warm->v : VectorXd::Zero(n);
  const double floor_s = warm ? 1e-2 : 1.0;
  VectorXd s(n_in), y(n_in), t(n_b), z(n_b);
  VectorXd lam = VectorXd::Zero(n_eq);
  {
    VectorXd slack = p.b_in - a_in * v;
    for (Index i = 0; i < n_in; ++i) s[i] = std::max(slack[i], floor_s);
    VectorXd vb = gather(v);
    for (Index k = 0; k < n_b; ++k) t[k] = std::max(vb[k] - lower_b[k], floor_s);
    y.setOnes();
    z.setOnes();
  }

  const double c_norm = inf_norm(p.c);
  Solution sol;
  sol.status = SolveStatus::max_iterations;
  double best_primal = std::numeric_limits<double>::infinity();
  int stall = 0;
  struct Iterate {
    double merit = std::numeric_limits<double>::infinity();
    VectorXd v, s, y, t, z, lam;
    KktResiduals kkt;
    int iteration = 0;
  } best;
  int since_best = 0;

  int iter = 0;
  for (;; ++iter) {
    const VectorXd qv = has_q ? VectorXd(q_dense * v) : VectorXd::Zero(n);
    VectorXd r_d = qv + p.c;
    if (n_eq > 0) r_d += a_eq_t * lam;
    if (n_in > 0) r_d += a_in.transpose() * y;
    scatter_add(r_d, z, -1.0);
    const VectorXd r_eq = p.b_eq - a_eq * v;
    const VectorXd r_in = p.b_in - a_in * v - s;
    const VectorXd r_b = gather(v) - lower_b - t;

    const double objective = 0.5 * v.dot(qv) + p.c.dot(v);
    const double gap = s.dot(y) + t.dot(z);
    const double mu = n_comp > 0 ? gap / static_cast<double>(n_comp) : 0.0;
    const double primal_inf = std::max({inf_norm(r_eq), inf_norm(r_in), inf_norm(r_b)});
    const VectorXd aty = n_in > 0 ? VectorXd(a_in.transpose() * y) : VectorXd::Zero(n);
    const VectorXd atl = n_eq > 0 ? VectorXd(a_eq_t * lam) : VectorXd::Zero(n);
    const double dual_scale = std::max({1.0, c_norm, inf_norm(qv), inf_norm(aty), inf_norm(atl), inf_norm(z)});
    const double dual_inf = inf_norm(r_d) / dual_scale;
    const double comp = gap / std::max(1.0, std::abs(objective));

    sol.kkt = {primal_inf, dual_inf, comp};
    sol.iterations = iter;
    if (primal_inf <= tol.primal && dual_inf <= tol.dual && comp <= tol.complementarity) {
      sol.status = SolveStatus::optimal;
      break;
    }
    // Near the end rounding can make the residuals drift up again; remember
    // the best iterate and fall back to it when progress stops.
    const double merit = std::max({primal_inf / tol.primal, dual_inf / tol.dual, comp / tol.complementarity});
    if (merit < 0.5 * best.merit) {
      best = {merit, v, s, y, t, z, lam, sol.kkt, iter};
      since_best = 0;
    } else {
      ++since_best;
    }
    if (iter >= tol.max_iterations || (since_best >= 8 && best.merit < 1e6)) {
      if (best.merit < merit) {
        v = best.v;
        s = best.s;
        y = best.y;
        t = best.t;
        z = best.z;
        lam = best.lam;
        sol.kkt = best.kkt;
        sol.iterations = best.iteration;
      }
      if (std::min(best.merit, merit) <= 1.0) {
        sol.status = SolveStatus::optimal;
      } else {
        sol.status = sol.kkt.primal > 1e3 * tol.primal ? SolveStatus::infeasible : SolveStatus::max_iterations;
        sol.message = iter >= tol.max_iterations ? "iteration limit reached" : "no further progress";
      }
      break;
    }
    // Infeasibility: primal residual stuck while the multipliers diverge.
    if (primal_inf < 0.5 * best_primal) {
      best_primal = primal_inf;
      stall = 0;
    } else {
      ++stall;
    }
    const double dual_size = std::max(inf_norm(y), inf_norm(z));
    if (primal_inf > tol.primal && ((dual_size > 1e12 * (1.0 + c_norm)) || (stall > 30 && mu < 1e-10))) {
      sol.status = SolveStatus::infeasible;
      sol.message = "primal residual does not decrease while multipliers diverge";
      break;
    }

    // Normal matrix H = Q + A_in' W A_in + D on bounded coordinates.
    MatrixXd h = q_dense;
    const VectorXd w_in = y.cwiseQuotient(s);
    for (Index r = 0; r < n_in; ++r) {
      const double w = w_in[r];
      for (SparseMatrix::InnerIterator i(a_in, r); i; ++i) {
        const double wi = w * i.value();
        for (SparseMatrix::InnerIterator j(a_in, r); j; ++j) h(i.col(), j.col()) += wi * j.value();
      }
    }
    const VectorXd d_b = z.cwiseQuotient(t);
    for (Index k = 0; k < n_b; ++k) h(bounded[k], bounded[k]) += d_b[k];

    const double kappa = std::max(1.0, has_q ? q_dense.diagonal().cwiseAbs().maxCoeff() : 1.0);
    ReducedKkt kkt(std::move(h), a_eq, a_eq_t, kappa);
    if (!kkt.ok()) {
      sol.status = SolveStatus::numerical_failure;
      sol.message = "normal matrix factorization failed";
      break;
    }

    // Full Newton system for given right-hand sides:
    //   Q dv + A_eq'dl + A_in'dy - E dz = -rd,   A_eq dv = req,
    //   A_in dv + ds = rin,   dt = E'dv + rb,   S dy + Y ds = rsy,   T dz + Z dt = rtz.
    auto reduce_and_solve = [&](const VectorXd& rd, const VectorXd& req, const VectorXd& rin, const VectorXd& rb,
                                const VectorXd& rsy, const VectorXd& rtz, VectorXd& dv, VectorXd& dl, VectorXd& ds,
                                VectorXd& dy, VectorXd& dt, VectorXd& dz) {
      VectorXd rhs = -rd;
      if (n_in > 0) rhs -= a_in.transpose() * (rsy - y.cwiseProduct(rin)).cwiseQuotient(s);
      scatter_add(rhs, (rtz - z.cwiseProduct(rb)).cwiseQuotient(t), 1.0);
      kkt.solve(rhs, req, dv, dl);
      ds = rin - a_in * dv;
      dy = (rsy - y.cwiseProduct(ds)).cwiseQuotient(s);
      dt = gather(dv) + rb;
      dz = (rtz - z.cwiseProduct(dt)).cwiseQuotient(t);
    };
    const VectorXd zero_in = VectorXd::Zero(n_in), zero_b = VectorXd::Zero(n_b);
    auto newton = [&](const VectorXd& r_sy, const VectorXd& r_tz, VectorXd& dv, VectorXd& dl, VectorXd& ds,
                      VectorXd& dy, VectorXd& dt, VectorXd& dz) {
      reduce_and_solve(r_d, r_eq, r_in, r_b, r_sy, r_tz, dv, dl, ds, dy, dt, dz);
      // Refinement on the unreduced stationarity and equality rows; the
      // remaining rows hold exactly by back-substitution.
      double prev = std::numeric_limits<double>::infinity();
      VectorXd cv, cl, cs, cy, ct, cz;
      auto apply = [&](double sign) {
        dv += sign * cv;
        if (n_eq > 0) dl += sign * cl;
        ds += sign * cs;
        dy += sign * cy;
        dt += sign * ct;
        dz += sign * cz;
      };
      for (int pass = 0; pass < 30; ++pass) {
        VectorXd e_d = r_d + a_eq_t * dl;
        if (has_q) e_d += q_dense * dv;
        if (n_in > 0) e_d += a_in.transpose() * dy;
        scatter_add(e_d, dz, -1.0);
        const VectorXd e_eq = r_eq - a_eq * dv;
        const double err = std::max(inf_norm(e_d) / (1.0 + inf_norm(r_d)), inf_norm(e_eq) / (1.0 + inf_norm(r_eq)));
        if (err >= prev) {
          apply(-1.0);
          break;
        }
        if (err <= 1e-15 || err > 0.9 * prev) break;
        prev = err;
        reduce_and_solve(e_d, e_eq, zero_in, zero_b, zero_in, zero_b, cv, cl, cs, cy, ct, cz);
        apply(1.0);
      }
    };

    VectorXd dv, dl, ds, dy, dt, dz;
    double step_p = 1.0, step_d = 1.0;
    if (n_comp > 0) {
      // Predictor.
      newton(-s.cwiseProduct(y), -t.cwiseProduct(z), dv, dl, ds, dy, dt, dz);
      const double ap = std::min(max_step(s, ds, 1.0), max_step(t, dt, 1.0));
      const double ad = std::min(max_step(y, dy, 1.0), max_step(z, dz, 1.0));
      const double mu_aff = ((s + ap * ds).dot(y + ad * dy) + (t + ap * dt).dot(z + ad * dz)) / n_comp;
      const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
      // Corrector.
      const VectorXd r_sy = VectorXd::Constant(n_in, sigma * mu) - s.cwiseProduct(y) - ds.cwiseProduct(dy);
      const VectorXd r_tz = VectorXd::Constant(n_b, sigma * mu) - t.cwiseProduct(z) - dt.cwiseProduct(dz);
      newton(r_sy, r_tz, dv, dl, ds, dy, dt, dz);
      const double eta = std::max(0.9, 1.0 - 10.0 * mu / std::max(1.0, std::abs(objective)));
      step_p = std::min(max_step(s, ds, std::min(eta, 0.995)), max_step(t, dt, std::min(eta, 0.995)));
      step_d = std::min(max_step(y, dy, std::min(eta, 0.995)), max_step(z, dz, std::min(eta, 0.995)));
      if (has_q) step_p = step_d = std::min(step_p, step_d);
    } else {
      newton(VectorXd(0), VectorXd(0), dv, dl, ds, dy, dt, dz);
    }

    if (!dv.allFinite() || (n_eq > 0 && !dl.allFinite())) {
      sol.status = SolveStatus::numerical_failure;
      sol.message = "non-finite Newton direction";
      break;
    }
    v += step_p * dv;
    s += step_p * ds;
    t += step_p * dt;
    if (n_eq > 0) lam += step_d * dl;
    y += step_d * dy;
    z += step_d * dz;
  }

  sol.v = v;
  sol.objective_value = p.objective(v);
  sol.eq_multipliers = lam;
  sol.in_multipliers = y;
  sol.bound_multipliers = VectorXd::Zero(n);
  for (Index k = 0; k < n_b; ++k) sol.bound_multipliers[bounded[k]] = z[k];
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return sol;
}

}  // namespace frontier
