#include "frontier/stoned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace frontier {

namespace {

constexpr double pi = std::numbers::pi;
const double log_sqrt_2pi = 0.5 * std::log(2.0 * pi);

double normal_pdf(double x) { return std::exp(-0.5 * x * x - log_sqrt_2pi); }

// 1 / (b + 2 / (b + 3 / (b + ...))), the tail of the Laplace continued
// fraction of the Mills ratio; equals phi(b) / (1 - Phi(b)) - b.
double mills_tail(double b) {
  double t = 0.0;
  for (int k = 200; k >= 2; --k) t = k / (b + t);
  return 1.0 / (b + t);
}

// phi(b) / (1 - Phi(b)) - b, the JLMS kernel.
double jlms_kernel(double b) {
  if (b > 6.0) return mills_tail(b);
  return normal_pdf(b) / (0.5 * std::erfc(b / std::numbers::sqrt2)) - b;
}

void require_finite(const VectorXd& r, Index min_n, const char* who) {
  if (r.size() < min_n) {
    throw Error(ErrorKind::invalid_argument,
                std::string(who) + " needs at least " + std::to_string(min_n) + " residuals");
  }
  if (!r.allFinite()) throw Error(ErrorKind::invalid_argument, std::string(who) + ": residuals must be finite");
}

// Everything is computed for a production frontier (negatively skewed
// composite error); cost residuals are mirrored.
VectorXd oriented(const VectorXd& r, FunctionType fun) { return fun == FunctionType::production ? r : VectorXd(-r); }

void fill_scales(DecompositionResult& d, double su, double sv) {
  d.sigma_u = su;
  d.sigma_v = sv;
  d.sigma = std::sqrt(su * su + sv * sv);
  d.signal_to_noise = su / sv;
  d.mu = su * std::sqrt(2.0 / pi);
}

double median(std::vector<double> v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  const double upper = v[h];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + h));
}

}  // namespace

const char* to_string(DecompositionMethod m) {
  switch (m) {
    case DecompositionMethod::mom: return "mom";
    case DecompositionMethod::qle: return "qle";
    case DecompositionMethod::kde: return "kde";
  }
  return "mom";
}

DecompositionMethod parse_decomposition_method(std::string_view s) {
  if (s == "mom") return DecompositionMethod::mom;
  if (s == "qle") return DecompositionMethod::qle;
  if (s == "kde") return DecompositionMethod::kde;
  throw Error(ErrorKind::invalid_argument, "unknown decomposition method '" + std::string(s) + "'");
}

double inverse_mills(double a) {
  if (a > 6.0) return a + mills_tail(a);
  return normal_pdf(a) / (0.5 * std::erfc(a / std::numbers::sqrt2));
}

double log_normal_cdf(double x) {
  if (x > -6.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  // Phi(x) = phi(x) / (b + tail(b)) with b = -x.
  const double b = -x;
  return -0.5 * x * x - log_sqrt_2pi - std::log(b + mills_tail(b));
}

DecompositionResult decompose_mom(const VectorXd& residuals, FunctionType fun) {
  require_finite(residuals, 3, "decompose_mom");
  const double n = static_cast<double>(residuals.size());
  const VectorXd c = residuals.array() - residuals.mean();
  const double m2 = c.squaredNorm() / n;
  const double m3 = c.array().cube().sum() / n;

  DecompositionResult d;
  d.method = DecompositionMethod::mom;
  d.function_type = fun;
  d.m2 = m2;
  d.m3 = m3;
  const double m3_signed = fun == FunctionType::production ? -m3 : m3;
  if (!(m3_signed > 0.0)) {
    throw Error(ErrorKind::wrong_skew,
                fun == FunctionType::production
                    ? "wrong skew: production residuals need a negative third central moment, got " + std::to_string(m3)
                    : "wrong skew: cost residuals need a positive third central moment, got " + std::to_string(m3));
  }
  // Third central moment of a half-normal with scale s: s^3 sqrt(2/pi) (4/pi - 1).
  const double su = std::cbrt(m3_signed / (std::sqrt(2.0 / pi) * (4.0 / pi - 1.0)));
  const double sv2 = m2 - (pi - 2.0) / pi * su * su;
  if (!(sv2 > 0.0)) {
    throw Error(ErrorKind::variance_underflow,
                "noise variance underflow: M2 - (pi - 2)/pi sigma_u^2 = " + std::to_string(sv2));
  }
  fill_scales(d, su, std::sqrt(sv2));
  return d;
}

double qle_log_likelihood(const VectorXd& r, double lambda) {
  const double n = static_cast<double>(r.size());
  const double l2 = lambda * lambda;
  const double sigma = std::sqrt(r.squaredNorm() / n / (1.0 - 2.0 * l2 / (pi * (1.0 + l2))));
  const double shift = std::numbers::sqrt2 * lambda * sigma / std::sqrt(pi * (1.0 + l2));
  double value = -n * std::log(sigma);
  double sq = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    const double e = r[i] - shift;
    value += log_normal_cdf(-e * lambda / sigma);
    sq += e * e;
  }
  return value - sq / (2.0 * sigma * sigma);
}

DecompositionResult decompose_qle(const VectorXd& residuals, FunctionType fun, const QleConfig& cfg) {
  require_finite(residuals, 3, "decompose_qle");
  if (!(cfg.lambda_min > 0.0 && cfg.lambda_max > cfg.lambda_min) || cfg.grid_points < 3) {
    throw Error(ErrorKind::invalid_argument, "decompose_qle: invalid search configuration");
  }
  const VectorXd r = oriented(residuals, fun);
  const double centered = (r.array() - r.mean()).square().sum();
  if (!(centered > 0.0)) throw Error(ErrorKind::degenerate, "decompose_qle: residuals have zero centered variance");

  auto f = [&](double l) { return qle_log_likelihood(r, l); };
  // Log-spaced scan to bracket the global maximum, then golden section.
  const Index g = cfg.grid_points;
  std::vector<double> grid(static_cast<std::size_t>(g));
  const double step = std::log(cfg.lambda_max / cfg.lambda_min) / static_cast<double>(g - 1);
  Index best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < g; ++k) {
    grid[k] = cfg.lambda_min * std::exp(step * static_cast<double>(k));
    const double v = f(grid[k]);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  if (!std::isfinite(best_value)) throw Error(ErrorKind::non_convergence, "decompose_qle: likelihood is not finite");
  double a = grid[std::max<Index>(best - 1, 0)];
  double b = grid[std::min<Index>(best + 1, g - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  for (; it < cfg.max_iterations && (b - a) > cfg.tolerance * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (it == cfg.max_iterations) {
    throw Error(ErrorKind::non_convergence, "decompose_qle: golden section did not converge");
  }
  double lambda = 0.5 * (a + b);
  double value = f(lambda);
  if (best_value > value) {  // bracket endpoint on the search boundary
    lambda = grid[best];
    value = best_value;
  }

  const double l2 = lambda * lambda;
  const double sigma = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()) / (1.0 - 2.0 * l2 / (pi * (1.0 + l2))));
  DecompositionResult out;
  out.method = DecompositionMethod::qle;
  out.function_type = fun;
  out.log_likelihood = value;
  fill_scales(out, sigma * lambda / std::sqrt(1.0 + l2), sigma / std::sqrt(1.0 + l2));
  return out;
}

DecompositionResult decompose_kde(const VectorXd& residuals, FunctionType fun, const KdeConfig& cfg) {
  require_finite(residuals, 10, "decompose_kde");
  if (cfg.bandwidth < 0.0) throw Error(ErrorKind::invalid_argument, "decompose_kde: bandwidth must be positive");
  if (cfg.grid_points < 5) throw Error(ErrorKind::invalid_argument, "decompose_kde: grid needs at least 5 points");
  const VectorXd r = oriented(residuals, fun);
  const Index n = r.size();
  double h = cfg.bandwidth;
  if (h == 0.0) {
    const double sd = std::sqrt((r.array() - r.mean()).square().sum() / static_cast<double>(n - 1));
    h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  }
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "decompose_kde: bandwidth must be positive");

  std::vector<double> e(r.data(), r.data() + n);
  std::sort(e.begin(), e.end());
  const Index g = cfg.grid_points;
  const double lo = e.front() - cfg.grid_padding * h;
  const double hi = e.back() + cfg.grid_padding * h;
  const double dz = (hi - lo) / static_cast<double>(g - 1);
  VectorXd z(g), dens(g);
  const double cut = 9.0 * h;  // Gaussian tail beyond 9h is below 1e-17
  const double norm = 1.0 / (static_cast<double>(n) * h);
  for (Index k = 0; k < g; ++k) {
    z[k] = lo + dz * static_cast<double>(k);
    auto first = std::lower_bound(e.begin(), e.end(), z[k] - cut);
    auto last = std::upper_bound(first, e.end(), z[k] + cut);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += normal_pdf((z[k] - *it) / h);
    dens[k] = norm * sum;
  }
  VectorXd deriv(g);
  deriv[0] = (dens[1] - dens[0]) / dz;
  deriv[g - 1] = (dens[g - 1] - dens[g - 2]) / dz;
  for (Index k = 1; k + 1 < g; ++k) deriv[k] = (dens[k + 1] - dens[k - 1]) / (2.0 * dz);

  // Steepest descent of the density in the right tail.
  const double med = median(e);
  Index start = 0;
  while (start < g && z[start] < med) ++start;
  Index arg = start;
  for (Index k = start; k < g; ++k)
    if (deriv[k] < deriv[arg]) arg = k;
  if (arg == start || arg == g - 1) {
    throw Error(ErrorKind::degenerate, "decompose_kde: no interior maximum of -f' in the right tail; grid too coarse");
  }
  if (z[arg] < 0.0) throw Error(ErrorKind::degenerate, "decompose_kde: estimated expected inefficiency is negative");

  DecompositionResult out;
  out.method = DecompositionMethod::kde;
  out.function_type = fun;
  out.mu = z[arg];
  out.bandwidth = h;
  return out;
}

EfficiencyResult jlms_conditional(const VectorXd& residuals, const DecompositionResult& decomp, FunctionType fun) {
  if (decomp.method == DecompositionMethod::kde) {
    throw Error(ErrorKind::unsupported, "jlms_conditional needs a mom or qle decomposition");
  }
  if (!decomp.sigma_u || !decomp.sigma_v || !(*decomp.sigma_u > 0.0) || !(*decomp.sigma_v > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "jlms_conditional needs positive sigma_u and sigma_v");
  }
  if (!residuals.allFinite()) throw Error(ErrorKind::invalid_argument, "jlms_conditional: residuals must be finite");
  const double su = *decomp.sigma_u, sv = *decomp.sigma_v;
  const double s2 = su * su + sv * sv;
  const double sigma = std::sqrt(s2);
  const double lambda = su / sv;
  const double sign = fun == FunctionType::production ? 1.0 : -1.0;

  EfficiencyResult out;
  out.sigma_star = su * sv / sigma;
  out.mu_star = -sign * residuals * (su * su / s2);
  out.conditional_inefficiency.resize(residuals.size());
  for (Index i = 0; i < residuals.size(); ++i) {
    const double b = sign * residuals[i] * lambda / sigma;
    out.conditional_inefficiency[i] = std::max(0.0, out.sigma_star * jlms_kernel(b));
  }
  return out;
}

VectorXd technical_efficiency(const Dataset& ds, const FrontierEstimate& est, const EfficiencyResult& eff,
                              const ModelSpec& spec) {
  const VectorXd& u = eff.conditional_inefficiency;
  if (u.size() != ds.n() || est.n() != ds.n()) {
    throw Error(ErrorKind::invalid_argument, "technical_efficiency: sizes of data, estimate and efficiency differ");
  }
  if (spec.ddf) throw Error(ErrorKind::unsupported, "technical_efficiency is defined for single-output frontiers");
  const bool production = spec.fun == FunctionType::production;
  if (spec.cet == ErrorComposition::multiplicative) {
    return production ? VectorXd((-u).array().exp()) : VectorXd(u.array().exp());
  }
  const VectorXd y = ds.response();
  VectorXd te(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    if (y[i] == 0.0) {
      throw Error(ErrorKind::data, "technical_efficiency: zero output at observation " + std::to_string(i));
    }
    te[i] = (production ? y[i] - u[i] : y[i] + u[i]) / y[i];
  }
  return te;
}

double unconditional_expected_inefficiency(const DecompositionResult& decomp) { return decomp.mu; }

}  // namespace frontier
