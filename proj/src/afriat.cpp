#include "frontier/afriat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "frontier/isotonic.hpp"

namespace frontier {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kLogGuard = 1e-6;

// Appends sign * (hyperplane j evaluated at observation k) to `row`.
void add_plane(const Dataset& ds, const Layout& L, Index row, Index j, Index k, double sign, std::vector<Triplet>& t) {
  if (L.has_alpha) t.emplace_back(row, L.alpha + j, sign);
  for (Index c = 0; c < L.m; ++c) t.emplace_back(row, L.beta + j * L.m + c, sign * ds.x(k, c));
  for (Index c = 0; c < L.s; ++c) t.emplace_back(row, L.delta + j * L.s + c, sign * (*ds.b)(k, c));
  for (Index c = 0; c < L.q; ++c) t.emplace_back(row, L.gamma + j * L.q + c, -sign * ds.y(k, c));
}

// Row i holds the coefficients of hyperplane i at observation i.
SparseMatrix own_planes(const Dataset& ds, const Layout& L) {
  std::vector<Triplet> t;
  for (Index i = 0; i < L.n; ++i) add_plane(ds, L, i, i, i, 1.0, t);
  return sparse_from_triplets(L.n, L.size, t);
}

void add_afriat_rows(const Dataset& ds, const ModelSpec& spec, const Layout& L, const std::vector<AfriatPair>& rows,
                     Index offset, std::vector<Triplet>& t) {
  const double sign = spec.fun == FunctionType::production ? 1.0 : -1.0;
  Index r = offset;
  for (const auto& pr : rows) {
    add_plane(ds, L, r, pr.i, pr.i, sign, t);
    add_plane(ds, L, r, pr.j, pr.i, -sign, t);
    ++r;
  }
}

void add_normalization_rows(const ModelSpec& spec, const Layout& L, Index offset, std::vector<Triplet>& t) {
  for (Index i = 0; i < L.n; ++i) {
    for (Index c = 0; c < L.m; ++c)
      if (spec.gx[c] != 0.0) t.emplace_back(offset + i, L.beta + i * L.m + c, spec.gx[c]);
    for (Index c = 0; c < L.s; ++c)
      if (spec.gb[c] != 0.0) t.emplace_back(offset + i, L.delta + i * L.s + c, spec.gb[c]);
    for (Index c = 0; c < L.q; ++c)
      if (spec.gy[c] != 0.0) t.emplace_back(offset + i, L.gamma + i * L.q + c, spec.gy[c]);
  }
}

VectorXd lower_bounds(const Layout& L) {
  VectorXd lower = VectorXd::Constant(L.size, -std::numeric_limits<double>::infinity());
  lower.segment(L.beta, L.n * L.m).setZero();
  lower.segment(L.delta, L.n * L.s).setZero();
  lower.segment(L.gamma, L.n * L.q).setZero();
  if (L.has_eps && L.split) lower.segment(L.eps, 2 * L.n).setZero();
  return lower;
}

// Quadratic and linear objective terms shared by the affine and smooth paths
// (everything except the substituted squared loss).
void residual_objective(const ModelSpec& spec, const Layout& L, double ridge, std::vector<Triplet>& tq, VectorXd& c) {
  if (L.has_eps) {
    for (Index i = 0; i < L.n; ++i) {
      if (!L.split) {
        tq.emplace_back(L.eps + i, L.eps + i, 2.0);
      } else if (spec.family == Family::cqr) {
        c[L.eps + i] = spec.tau;
        c[L.eps_neg + i] = 1.0 - spec.tau;
      } else {
        tq.emplace_back(L.eps + i, L.eps + i, 2.0 * spec.tau);
        tq.emplace_back(L.eps_neg + i, L.eps_neg + i, 2.0 * (1.0 - spec.tau));
      }
    }
  }
  if (ridge > 0.0) {
    const double w = L.split ? std::max(spec.tau, 1.0 - spec.tau) : 1.0;
    const Index first = L.beta;
    const Index last = L.gamma + L.n * L.q;  // beta, delta, gamma are contiguous
    for (Index k = first; k < last; ++k) tq.emplace_back(k, k, 2.0 * ridge * w);
  }
}

AffineProblem build_affine(const Dataset& ds, const ModelSpec& spec, const Layout& L,
                           const std::vector<AfriatPair>& rows, double ridge) {
  AffineProblem p;
  std::vector<Triplet> tq;
  p.c = VectorXd::Zero(L.size);
  residual_objective(spec, L, ridge, tq, p.c);

  const Index n = L.n;
  std::vector<Triplet> te;
  std::vector<double> be;
  if (!L.has_eps) {
    // sum_i (target_i - a_i'v)^2 with a_i the own-plane row.
    std::vector<Triplet> a;
    for (Index i = 0; i < n; ++i) {
      a.clear();
      add_plane(ds, L, 0, i, i, 1.0, a);
      const double target = spec.ddf ? 0.0 : ds.y(i, 0);
      for (const auto& u : a) {
        p.c[u.col()] -= 2.0 * target * u.value();
        for (const auto& w : a) tq.emplace_back(u.col(), w.col(), 2.0 * u.value() * w.value());
      }
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      add_plane(ds, L, i, i, i, 1.0, te);
      te.emplace_back(i, L.eps + i, 1.0);
      te.emplace_back(i, L.eps_neg + i, -1.0);
      be.push_back(spec.ddf ? 0.0 : ds.y(i, 0));
    }
  }
  if (spec.ddf) {
    const Index offset = static_cast<Index>(be.size());
    add_normalization_rows(spec, L, offset, te);
    be.insert(be.end(), n, 1.0);
  }
  p.q = sparse_from_triplets(L.size, L.size, tq);
  p.a_eq = sparse_from_triplets(static_cast<Index>(be.size()), L.size, te);
  p.b_eq = Eigen::Map<const VectorXd>(be.data(), static_cast<Index>(be.size()));

  std::vector<Triplet> ti;
  add_afriat_rows(ds, spec, L, rows, 0, ti);
  p.a_in = sparse_from_triplets(static_cast<Index>(rows.size()), L.size, ti);
  p.b_in = VectorXd::Zero(static_cast<Index>(rows.size()));
  p.lower = lower_bounds(L);
  return p;
}

struct SmoothData {
  VectorXd log_y;
  MatrixXd z;  // n x r, empty without contextual variables
  SparseMatrix planes;
  SparseMatrix fixed_jac;  // lambda and residual columns
  SparseMatrix q;
  VectorXd c;
};

// ln y_i = ln(plane_i(x_i)) + lambda'z_i + eps_i, eps_i = eps+_i - eps-_i when split.
SmoothProblem build_smooth(const Dataset& ds, const ModelSpec& spec, const Layout& L,
                           const std::vector<AfriatPair>& rows, double ridge, const VectorXd& start) {
  auto d = std::make_shared<SmoothData>();
  const Index n = L.n;
  d->log_y = ds.y.col(0).array().log().matrix();
  if (L.r > 0) d->z = *ds.z;
  d->planes = own_planes(ds, L);
  std::vector<Triplet> tf;
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < L.r; ++c) tf.emplace_back(i, L.lambda + c, -d->z(i, c));
    tf.emplace_back(i, L.eps + i, -1.0);
    if (L.split) tf.emplace_back(i, L.eps_neg + i, 1.0);
  }
  d->fixed_jac = sparse_from_triplets(n, L.size, tf);
  std::vector<Triplet> tq;
  d->c = VectorXd::Zero(L.size);
  residual_objective(spec, L, ridge, tq, d->c);
  d->q = sparse_from_triplets(L.size, L.size, tq);

  SmoothProblem p;
  p.objective = [d](const VectorXd& v) { return 0.5 * v.dot(d->q * v) + d->c.dot(v); };
  p.gradient = [d](const VectorXd& v) { return VectorXd(d->q * v + d->c); };
  p.hessian = [d](const VectorXd&) { return d->q; };
  p.num_smooth_equalities = n;
  p.constraints = [d, L](const VectorXd& v) {
    const VectorXd plane = d->planes * v;
    VectorXd h = d->log_y - plane.array().log().matrix() - v.segment(L.eps, L.n);
    if (L.split) h += v.segment(L.eps_neg, L.n);
    if (L.r > 0) h -= d->z * v.segment(L.lambda, L.r);
    return h;
  };
  p.jacobian = [d](const VectorXd& v) {
    const VectorXd inv = (d->planes * v).cwiseInverse();
    SparseMatrix j = (-inv).asDiagonal() * d->planes;
    j += d->fixed_jac;
    return j;
  };

  // Afriat rows, then the log guard -plane_i <= -kLogGuard.
  std::vector<Triplet> ti;
  add_afriat_rows(ds, spec, L, rows, 0, ti);
  const Index n_rows = static_cast<Index>(rows.size());
  for (Index i = 0; i < n; ++i) add_plane(ds, L, n_rows + i, i, i, -1.0, ti);
  p.a_in = sparse_from_triplets(n_rows + n, L.size, ti);
  p.b_in = VectorXd::Zero(n_rows + n);
  p.b_in.tail(n).setConstant(-kLogGuard);
  p.lower = lower_bounds(L);
  p.initial_point = start;
  return p;
}

VectorXd pack(const Layout& L, const FrontierEstimate& est) {
  VectorXd v = VectorXd::Zero(L.size);
  if (L.has_alpha) v.segment(L.alpha, L.n) = est.alpha;
  for (Index i = 0; i < L.n; ++i) {
    v.segment(L.beta + i * L.m, L.m) = est.beta.row(i).transpose();
    if (L.s > 0) v.segment(L.delta + i * L.s, L.s) = est.delta->row(i).transpose();
    if (L.q > 0) v.segment(L.gamma + i * L.q, L.q) = est.gamma->row(i).transpose();
  }
  if (L.r > 0 && est.z_coefficients) v.segment(L.lambda, L.r) = *est.z_coefficients;
  if (L.has_eps) {
    if (L.split) {
      v.segment(L.eps, L.n) = *est.residual_pos;
      v.segment(L.eps_neg, L.n) = *est.residual_neg;
    } else {
      v.segment(L.eps, L.n) = *est.residuals;
    }
  }
  return v;
}

FrontierEstimate extract(const Dataset& ds, const ModelSpec& spec, const Layout& L, const Solution& sol) {
  const VectorXd& v = sol.v;
  const Index n = L.n;
  FrontierEstimate est;
  est.spec = spec;
  est.alpha = L.has_alpha ? VectorXd(v.segment(L.alpha, n)) : VectorXd::Zero(n);
  auto block = [&](Index start, Index cols) {
    MatrixXd out(n, cols);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < cols; ++c) out(i, c) = std::max(0.0, v[start + i * cols + c]);
    return out;
  };
  est.beta = block(L.beta, L.m);
  if (spec.ddf) {
    est.gamma = block(L.gamma, L.q);
    if (L.s > 0) est.delta = block(L.delta, L.s);
  }
  if (L.r > 0) est.z_coefficients = v.segment(L.lambda, L.r);

  est.fitted = est.alpha + est.beta.cwiseProduct(ds.x).rowwise().sum();
  if (spec.ddf) {
    est.fitted -= est.gamma->cwiseProduct(ds.y).rowwise().sum();
    if (est.delta) est.fitted += est.delta->cwiseProduct(*ds.b).rowwise().sum();
  }

  VectorXd r(n);
  if (spec.cet == ErrorComposition::multiplicative) {
    if ((est.fitted.array() <= 0.0).any()) throw Error(ErrorKind::solver_failure, "multiplicative fit has a nonpositive hyperplane value");
    r = ds.y.col(0).array().log() - est.fitted.array().log();
    if (est.z_coefficients) r -= (*ds.z) * (*est.z_coefficients);
    est.phi = est.fitted.array() - 1.0;
  } else if (!spec.ddf) {
    r = ds.y.col(0) - est.fitted;
  } else if (!spec.split_residuals()) {
    r = est.fitted;
  } else {
    r = -est.fitted;
  }

  if (!spec.split_residuals()) {
    est.objective_value = r.squaredNorm();
    est.residuals = r;
  } else {
    const VectorXd pos = r.cwiseMax(0.0);
    const VectorXd neg = (-r).cwiseMax(0.0);
    if (spec.family == Family::cqr) {
      est.objective_value = spec.tau * pos.sum() + (1.0 - spec.tau) * neg.sum();
    } else {
      est.objective_value = spec.tau * pos.squaredNorm() + (1.0 - spec.tau) * neg.squaredNorm();
    }
    est.residual_pos = pos;
    est.residual_neg = neg;
  }

  est.diagnostics.status = sol.status;
  est.diagnostics.kkt = sol.kkt;
  est.diagnostics.iterations = sol.iterations;
  est.diagnostics.wall_time = sol.wall_time;
  est.diagnostics.message = sol.message;
  return est;
}

void require_usable(const Solution& sol) {
  if (sol.optimal()) return;
  if (sol.status == SolveStatus::infeasible) throw Error(ErrorKind::infeasible, "estimation problem is infeasible: " + sol.message);
  // An iteration cap on an essentially feasible point still yields a usable
  // estimate; the status travels with it.
  if (sol.status == SolveStatus::max_iterations && sol.kkt.primal <= 1e-6) return;
  throw Error(ErrorKind::solver_failure, std::string("solver ") + to_string(sol.status) +
                                             (sol.message.empty() ? "" : ": " + sol.message));
}

VectorXd multiplicative_start(const Dataset& ds, const ModelSpec& spec, const Layout& L,
                              const std::vector<AfriatPair>& rows, const FitOptions& opt) {
  const Index n = L.n;
  VectorXd v = VectorXd::Zero(L.size);
  bool ok = false;
  try {
    ModelSpec add = spec;
    add.cet = ErrorComposition::additive;
    add.use_contextual = false;
    const FrontierEstimate base = fit_with_rows(ds, add, rows, opt);
    if ((base.fitted.array() >= kLogGuard).all()) {
      if (L.has_alpha) v.segment(L.alpha, n) = base.alpha;
      for (Index i = 0; i < n; ++i) v.segment(L.beta + i * L.m, L.m) = base.beta.row(i).transpose();
      ok = true;
    }
  } catch (const Error&) {
    ok = false;
  }
  if (!ok) {
    // Flat start: one common hyperplane, which satisfies every Afriat row.
    v.setZero();
    const double level = std::exp(ds.y.col(0).array().log().mean());
    if (L.has_alpha) {
      v.segment(L.alpha, n).setConstant(level);
    } else {
      const double slope = level / std::max(ds.x.col(0).mean(), 1e-12);
      for (Index i = 0; i < n; ++i) v[L.beta + i * L.m] = slope;
    }
  }
  const VectorXd plane = own_planes(ds, L) * v;
  const VectorXd r = ds.y.col(0).array().log() - plane.array().max(kLogGuard).log();
  if (L.split) {
    v.segment(L.eps, n) = r.cwiseMax(0.0);
    v.segment(L.eps_neg, n) = (-r).cwiseMax(0.0);
  } else {
    v.segment(L.eps, n) = r;
  }
  return v;
}

}  // namespace

Layout make_layout(const Dataset& ds, const ModelSpec& spec) {
  Layout L;
  L.n = ds.n();
  L.m = ds.m();
  L.q = spec.ddf ? ds.q() : 0;
  L.s = spec.ddf ? ds.s() : 0;
  L.r = spec.use_contextual ? ds.r() : 0;
  L.has_alpha = spec.rts == ReturnsToScale::vrs;
  L.split = spec.split_residuals();
  L.has_eps = !(spec.family == Family::cnls && spec.cet == ErrorComposition::additive);
  Index k = 0;
  L.alpha = k;
  if (L.has_alpha) k += L.n;
  L.beta = k;
  k += L.n * L.m;
  L.delta = k;
  k += L.n * L.s;
  L.gamma = k;
  k += L.n * L.q;
  L.lambda = k;
  k += L.r;
  L.eps = k;
  L.eps_neg = k;
  if (L.has_eps) {
    k += L.n;
    if (L.split) {
      L.eps_neg = k;
      k += L.n;
    }
  }
  L.size = k;
  return L;
}

std::vector<AfriatPair> all_pairs(Index n) {
  std::vector<AfriatPair> out;
  out.reserve(static_cast<std::size_t>(n * (n > 0 ? n - 1 : 0)));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) out.push_back({i, j});
  return out;
}

std::vector<AfriatPair> admissible_pairs(const Dataset& ds, const ModelSpec& spec) {
  if (spec.isotonic) return gated_pairs(dominance_matrix(ds));
  return all_pairs(ds.n());
}

MatrixXd evaluate_planes(const Dataset& ds, const FrontierEstimate& est) {
  const Index n = ds.n();
  const Index s = est.delta ? est.delta->cols() : 0;
  const Index q = est.gamma ? est.gamma->cols() : 0;
  const Index k = 1 + ds.m() + s + q;
  MatrixXd points(n, k), coef(est.n(), k);
  points.col(0).setOnes();
  points.middleCols(1, ds.m()) = ds.x;
  coef.col(0) = est.alpha;
  coef.middleCols(1, ds.m()) = est.beta;
  if (s > 0) {
    points.middleCols(1 + ds.m(), s) = *ds.b;
    coef.middleCols(1 + ds.m(), s) = *est.delta;
  }
  if (q > 0) {
    points.rightCols(q) = -ds.y;
    coef.rightCols(q) = *est.gamma;
  }
  return points * coef.transpose();
}

std::vector<AfriatViolation> find_violations(const FrontierEstimate& est, const Dataset& ds, const ModelSpec& spec,
                                             double tol) {
  const MatrixXd planes = evaluate_planes(ds, est);
  const double sign = spec.fun == FunctionType::production ? 1.0 : -1.0;
  std::vector<AfriatViolation> out;
  auto consider = [&](Index i, Index j) {
    const double gap = sign * (planes(i, i) - planes(i, j));
    if (gap > tol) out.push_back({i, j, gap});
  };
  if (spec.isotonic) {
    for (const auto& pr : gated_pairs(dominance_matrix(ds))) consider(pr.i, pr.j);
  } else {
    for (Index i = 0; i < ds.n(); ++i)
      for (Index j = 0; j < ds.n(); ++j)
        if (i != j) consider(i, j);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const AfriatViolation& a, const AfriatViolation& b) { return a.magnitude > b.magnitude; });
  return out;
}

Index count_constraint_rows(const Dataset& ds, const ModelSpec& spec, Index afriat_rows) {
  return ds.n() * (spec.ddf ? 2 : 1) + afriat_rows;
}

FrontierEstimate fit_with_rows(const Dataset& ds, const ModelSpec& spec, const std::vector<AfriatPair>& rows,
                               const FitOptions& opt, const FrontierEstimate* warm) {
  check_model(ds, spec);
  const Layout L = make_layout(ds, spec);
  for (const auto& pr : rows) {
    if (pr.i < 0 || pr.j < 0 || pr.i >= L.n || pr.j >= L.n || pr.i == pr.j)
      throw Error(ErrorKind::invalid_argument, "Afriat pair out of range");
  }

  Solution sol;
  if (spec.cet == ErrorComposition::additive) {
    const AffineProblem p = build_affine(ds, spec, L, rows, opt.ridge);
    if (warm) {
      sol = solve_affine(p, opt.tol, WarmStart{pack(L, *warm)});
      if (!sol.optimal()) sol = solve_affine(p, opt.tol);
    } else {
      sol = solve_affine(p, opt.tol);
    }
  } else {
    const VectorXd lower = lower_bounds(L);
    auto run = [&](const VectorXd& start) {
      return solve_smooth(build_smooth(ds, spec, L, rows, opt.ridge, start.cwiseMax(lower)), opt.tol);
    };
    if (warm) {
      sol = run(pack(L, *warm));
      if (!sol.optimal()) sol = run(multiplicative_start(ds, spec, L, rows, opt));
    } else {
      sol = run(multiplicative_start(ds, spec, L, rows, opt));
    }
  }
  require_usable(sol);
  return extract(ds, spec, L, sol);
}

FrontierEstimate fit(const Dataset& ds, const ModelSpec& spec, const FitOptions& opt) {
  return fit_with_rows(ds, spec, admissible_pairs(ds, spec), opt);
}

}  // namespace frontier
