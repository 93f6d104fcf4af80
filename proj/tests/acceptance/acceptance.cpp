// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frontier/afriat.hpp"
#include "frontier/cnls.hpp"
#include "frontier/constraint_gen.hpp"
#include "frontier/cqer.hpp"
#include "frontier/ddf.hpp"
#include "frontier/isotonic.hpp"
#include "frontier/stoned.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace frontier;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Collects failures for one criterion.
struct Verdict {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool passed() const { return failures.empty(); }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------

Verdict exact_fit() {
  Verdict v;
  const Dataset ds = support::concave_sample(20, 2, 101);
  auto timed = [&](const std::string& name, const std::function<FrontierEstimate()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const FrontierEstimate e = f();
    const double t = seconds_since(t0);
    v.expect(e.objective_value <= 1e-8, name + " objective " + fmt(e.objective_value));
    v.expect(t < 1.0, name + " took " + fmt(t) + " s");
    v.detail += name + "=" + fmt(e.objective_value) + " ";
  };
  timed("cnls", [&] { return fit_cnls(ds, {}); });
  for (double tau : {0.1, 0.5, 0.9}) {
    CqerSpec s;
    s.tau = tau;
    timed("cqr" + fmt(tau), [&] { return fit_cqr(ds, s); });
    timed("cer" + fmt(tau), [&] { return fit_cer(ds, s); });
  }
  timed("icnls", [&] { return fit_icnls(ds, {}); });
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_ls = 0.0, worst_q = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Dataset ds = support::noisy_sample(4 + static_cast<Index>(k % 2), 1, 200 + k, 0.6);
    const double got = fit_cnls(ds, {}).objective_value;
    const double ref = oracle::cnls_grid_1d(ds.x.col(0), ds.response());
    worst_ls = std::max(worst_ls, std::abs(got - ref) / std::max(ref, 1e-12));
  }
  for (std::uint64_t k = 0; k < 10; ++k) {
    const double tau = 0.2 + 0.07 * static_cast<double>(k);
    CqerSpec s;
    s.tau = tau;
    double got = 0.0, ref = 0.0;
    if (k % 3 == 0) {
      const Dataset ds = support::noisy_sample(4, 1, 300 + k, 0.8);
      got = fit_cqr(ds, s).objective_value;
      ref = oracle::cqr_vertex(ds.x, ds.response(), tau);
    } else {
      const Dataset ds = support::noisy_sample(3, k % 3 == 1 ? 2 : 1, 300 + k, 0.8);
      got = fit_cqr(ds, s).objective_value;
      ref = oracle::cqr_vertex(ds.x, ds.response(), tau);
    }
    worst_q = std::max(worst_q, rel_diff(got, ref));
  }
  const double t = seconds_since(t0);
  v.expect(worst_ls <= 1e-5, "cnls relative gap " + fmt(worst_ls));
  v.expect(worst_q <= 1e-8, "cqr relative gap " + fmt(worst_q));
  v.expect(t < 30.0, "took " + fmt(t) + " s");
  v.detail = "cnls_gap=" + fmt(worst_ls) + " cqr_gap=" + fmt(worst_q) + " time=" + fmt(t) + "s";
  return v;
}

Verdict symmetric_expectile() {
  Verdict v;
  DgpConfig cfg;
  cfg.n = 100;
  cfg.seed = 3;
  const Dataset ds = generate_dgp(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  CqerSpec s;
  s.tau = 0.5;
  const auto cer = fit_cer(ds, s);
  const auto ls = fit_cnls(ds, {});
  const double t = seconds_since(t0);
  const double gap = support::max_abs_diff(cer.composite_residuals(), *ls.residuals);
  v.expect(gap <= 1e-6, "residual gap " + fmt(gap));
  v.expect(t < 10.0, "took " + fmt(t) + " s");
  v.detail = "max_gap=" + fmt(gap) + " time=" + fmt(t) + "s";
  return v;
}

Verdict generation_agreement() {
  Verdict v;
  DgpConfig cfg;
  cfg.n = 500;
  cfg.seed = 0;
  const Dataset ds = generate_dgp(cfg);
  ModelSpec spec;
  const auto t0 = std::chrono::steady_clock::now();
  GenConfig gc;
  gc.initial_strategy = InitialStrategy::k_nearest;
  gc.k = 10;
  const GenResult g = fit_generated(ds, spec, gc);
  const double t_gen = seconds_since(t0);
  const FrontierEstimate direct = fit(ds, spec);
  const double t = seconds_since(t0);

  const double rel = rel_diff(g.estimate.objective_value, direct.objective_value);
  const Index rows = static_cast<Index>(g.state.active_pairs.size());
  const Index limit = 500 * 499 / 10;
  const auto viol = oracle::afriat_violations(g.estimate.alpha, g.estimate.beta, ds.x, true, 1e-6);
  v.expect(g.state.converged, "generation did not converge");
  v.expect(rel <= 1e-4, "relative objective gap " + fmt(rel));
  v.expect(rows < limit, "kept " + std::to_string(rows) + " Afriat rows");
  v.expect(viol.empty(), std::to_string(viol.size()) + " violations");
  v.expect(t < 300.0, "took " + fmt(t) + " s");
  v.detail = "rel_gap=" + fmt(rel) + " afriat_rows=" + std::to_string(rows) + "/" + std::to_string(limit) +
             " rounds=" + std::to_string(g.state.iteration) + " total_constraints=" +
             std::to_string(g.state.total_constraints) + " gen=" + fmt(t_gen) + "s total=" + fmt(t) + "s";
  return v;
}

std::vector<double> ranks(const VectorXd& x) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return x[a] < x[b]; });
  std::vector<double> r(idx.size());
  for (std::size_t a = 0; a < idx.size();) {
    std::size_t b = a;
    while (b + 1 < idx.size() && x[idx[b + 1]] == x[idx[a]]) ++b;
    for (std::size_t k = a; k <= b; ++k) r[static_cast<std::size_t>(idx[k])] = 0.5 * static_cast<double>(a + b);
    a = b + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i] / n, mb += b[i] / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Verdict corrected_cnls() {
  Verdict v;
  DgpConfig cfg;
  cfg.n = 100;
  cfg.seed = 8;
  const Dataset ds = generate_dgp(cfg);
  const auto e = fit_cnls(ds, {});
  const auto adj = c2nls_adjust(e);
  const double top = adj.adjusted_residuals.maxCoeff();
  const auto before = ranks(*e.residuals);
  const auto after = ranks(adj.adjusted_residuals);
  const double rho = pearson(before, after);
  v.expect(top == 0.0, "max residual " + fmt(top));
  v.expect(before == after && rho >= 1.0 - 1e-15, "rank correlation " + fmt(rho));
  v.detail = "max_residual=" + fmt(top) + " rank_corr=" + fmt(rho);
  return v;
}

VectorXd mc_residuals(Index n, double su, double sv, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  VectorXd r(n);
  for (Index i = 0; i < n; ++i) {
    const double noise = sv * z(eng);
    r[i] = noise - su * std::abs(z(eng));
  }
  return r.array() - r.mean();
}

Verdict decomposition_recovery() {
  Verdict v;
  const double su = 0.7, sv = 0.3, mu = su * std::sqrt(2.0 / pi);
  const auto t0 = std::chrono::steady_clock::now();
  const VectorXd r = mc_residuals(100000, su, sv, 2024);
  const auto mom = decompose_mom(r, FunctionType::production);
  const auto qle = decompose_qle(r, FunctionType::production);
  const auto kde = decompose_kde(r, FunctionType::production);
  const double t = seconds_since(t0);
  for (const auto* d : {&mom, &qle}) {
    const std::string name = to_string(d->method);
    v.expect(std::abs(*d->sigma_u - su) <= 0.07, name + " sigma_u " + fmt(*d->sigma_u));
    v.expect(std::abs(*d->sigma_v - sv) <= 0.06, name + " sigma_v " + fmt(*d->sigma_v));
  }
  v.expect(std::abs(kde.mu - mu) <= 0.05, "kde mu " + fmt(kde.mu) + " vs " + fmt(mu));
  v.expect(t < 60.0, "took " + fmt(t) + " s");
  v.detail = "mom=(" + fmt(*mom.sigma_u) + "," + fmt(*mom.sigma_v) + ") qle=(" + fmt(*qle.sigma_u) + "," +
             fmt(*qle.sigma_v) + ") kde_mu=" + fmt(kde.mu) + " target_mu=" + fmt(mu) + " time=" + fmt(t) + "s";
  return v;
}

Verdict jlms_oracle() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const double scales[5][2] = {{0.2, 0.1}, {0.5, 0.5}, {1.0, 0.3}, {0.3, 1.0}, {2.0, 0.7}};
  const double eps[5] = {-1.5, -0.3, 0.0, 0.4, 2.0};
  double worst = 0.0;
  for (const auto& s : scales) {
    DecompositionResult d;
    d.sigma_u = s[0];
    d.sigma_v = s[1];
    const VectorXd e = Eigen::Map<const VectorXd>(eps, 5);
    for (FunctionType fun : {FunctionType::production, FunctionType::cost}) {
      const auto got = jlms_conditional(e, d, fun);
      for (Index i = 0; i < 5; ++i) {
        const double ref = oracle::jlms_quadrature(eps[i], s[0], s[1], fun == FunctionType::production);
        worst = std::max(worst, std::abs(got.conditional_inefficiency[i] - ref) / std::max(1.0, ref));
      }
    }
  }
  const double t = seconds_since(t0);
  v.expect(worst <= 1e-6, "worst gap " + fmt(worst));
  v.expect(t < 5.0, "took " + fmt(t) + " s");
  v.detail = "combos=25x2 worst_gap=" + fmt(worst) + " time=" + fmt(t) + "s";
  return v;
}

void check_structure(Verdict& v, const std::string& name, const Dataset& ds, const FrontierEstimate& e) {
  const ModelSpec& s = e.spec;
  v.expect(e.diagnostics.status == SolveStatus::optimal, name + " not optimal");
  v.expect(e.beta.minCoeff() >= -1e-9, name + " negative beta");
  if (s.rts == ReturnsToScale::crs) v.expect(e.alpha.isZero(0.0), name + " crs intercept");
  const bool production = s.fun == FunctionType::production;
  if (!s.ddf) {
    v.expect(oracle::afriat_violations(e.alpha, e.beta, ds.x, production, 1e-6).empty(), name + " afriat");
  } else {
    const Index n = ds.n();
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        auto plane = [&](Index p) {
          double val = e.alpha[p] + e.beta.row(p).dot(ds.x.row(i)) - e.gamma->row(p).dot(ds.y.row(i));
          if (e.delta) val += e.delta->row(p).dot(ds.b->row(i));
          return val;
        };
        worst = std::max(worst, (production ? 1.0 : -1.0) * (plane(i) - plane(j)));
      }
      double norm = e.beta.row(i).dot(s.gx) + e.gamma->row(i).dot(s.gy);
      if (e.delta) norm += e.delta->row(i).dot(s.gb);
      v.expect(std::abs(norm - 1.0) <= 1e-9, name + " normalization " + fmt(norm));
    }
    v.expect(worst <= 1e-6, name + " afriat " + fmt(worst));
    v.expect(e.gamma->minCoeff() >= -1e-9, name + " negative gamma");
  }
  if (s.split_residuals()) {
    v.expect(e.residual_pos->minCoeff() >= -1e-9 && e.residual_neg->minCoeff() >= -1e-9, name + " sign");
    v.expect(e.residual_pos->cwiseMin(*e.residual_neg).maxCoeff() <= 1e-6, name + " complementarity");
  } else if (s.rts == ReturnsToScale::vrs && s.cet == ErrorComposition::additive) {
    v.expect(std::abs(e.residuals->sum()) <= 1e-6 * static_cast<double>(ds.n()), name + " residual sum");
  }
}

Verdict structural_invariants() {
  Verdict v;
  Dataset ds = support::noisy_sample(30, 2, 77, 0.3);
  ds.y = ds.y.cwiseMax(0.2);
  ds.z = MatrixXd(30, 1);
  for (Index i = 0; i < 30; ++i) (*ds.z)(i, 0) = std::sin(static_cast<double>(i));
  ds.z_names = {"z1"};
  int fits = 0;
  for (Family f : {Family::cnls, Family::cqr, Family::cer})
    for (ErrorComposition cet : {ErrorComposition::additive, ErrorComposition::multiplicative})
      for (FunctionType fun : {FunctionType::production, FunctionType::cost})
        for (ReturnsToScale rts : {ReturnsToScale::vrs, ReturnsToScale::crs})
          for (bool z : {false, true}) {
            if (z && cet == ErrorComposition::additive) continue;
            ModelSpec s;
            s.family = f;
            s.cet = cet;
            s.fun = fun;
            s.rts = rts;
            s.tau = 0.3;
            s.use_contextual = z;
            const std::string name = std::string(to_string(f)) + "/" + to_string(cet) + "/" + to_string(fun) +
                                     "/" + to_string(rts) + (z ? "/z" : "");
            try {
              check_structure(v, name, ds, fit(ds, s));
              ++fits;
            } catch (const Error& e) {
              v.expect(false, name + " threw: " + e.what());
            }
          }

  Dataset d2 = ds;
  d2.z.reset();
  d2.z_names.clear();
  MatrixXd y(30, 2);
  y.col(0) = ds.y.col(0);
  y.col(1) = 0.5 * ds.y.col(0) + 0.1 * ds.x.col(0);
  d2.y = y;
  d2.y_names = {"y1", "y2"};
  d2.b = MatrixXd(0.2 * ds.x.col(1));
  d2.b_names = {"b1"};
  for (Family f : {Family::cnls, Family::cqr, Family::cer})
    for (FunctionType fun : {FunctionType::production, FunctionType::cost}) {
      ModelSpec s;
      s.family = f;
      s.fun = fun;
      s.tau = 0.6;
      s.ddf = true;
      s.gx = Eigen::Vector2d(0.5, 0.0);
      s.gy = Eigen::Vector2d(1.0, 1.0);
      s.gb = VectorXd::Ones(1);
      const std::string name = std::string("ddf/") + to_string(f) + "/" + to_string(fun);
      try {
        check_structure(v, name, d2, fit(d2, s));
        ++fits;
      } catch (const Error& e) {
        v.expect(false, name + " threw: " + e.what());
      }
    }
  v.detail = "fits=" + std::to_string(fits);
  return v;
}

Verdict isotonic_reductions() {
  Verdict v;
  const Dataset ds = support::noisy_sample(15, 2, 55);
  const auto ones = DominanceMatrix::ones(15);
  const auto id = DominanceMatrix::identity(15);
  const double cnls = fit_cnls(ds, {}).objective_value;
  const double a = fit_icnls(ds, {}, &ones).objective_value;
  const double b = fit_icnls(ds, {}, &id).objective_value;
  v.expect(std::abs(a - cnls) <= 1e-8 * std::max(1.0, cnls), "all-ones gap " + fmt(a - cnls));
  v.expect(b <= 1e-8, "identity objective " + fmt(b));
  int below = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Dataset r = support::noisy_sample(12, 1 + static_cast<Index>(k % 2), 500 + k);
    const double i = fit_icnls(r, {}).objective_value;
    const double c = fit_cnls(r, {}).objective_value;
    if (i <= c + 1e-9 * std::max(1.0, c)) ++below;
  }
  v.expect(below == 10, std::to_string(10 - below) + " instances with ICNLS above CNLS");
  v.detail = "all_ones_gap=" + fmt(std::abs(a - cnls)) + " identity=" + fmt(b) + " below=" + std::to_string(below) +
             "/10";
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict cli_pipeline() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / ("frontier_acceptance_" + std::to_string(::getpid()));
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / std::to_string(run);
    fs::create_directories(dir);
    const std::string cli = std::string("\"") + FRONTIER_CLI + "\"";
    const std::string cmd = "cd \"" + dir.string() + "\" && " + cli +
                            " dgp --n 200 --seed 11 --noise-sd 0.3 --inefficiency-sd 0.7 -o data.csv && " + cli +
                            " fit data.csv --x x1,x2 --y y -o fit.json --csv fit.csv && " + cli +
                            " stoned fit.json --method mom -o stoned.json --csv stoned.csv && " + cli +
                            " plotdata stoned.json --prefix plot --surface x1,x2 --grid 10 --gnuplot > manifest.json";
    const int rc = std::system(cmd.c_str());
    v.expect(rc == 0, "pipeline exit status " + std::to_string(rc));
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& entry : fs::directory_iterator(dir)) files.emplace_back(entry.path().filename(), slurp(entry));
    std::sort(files.begin(), files.end());
    runs.push_back(files);
  }
  const double t = seconds_since(t0);
  v.expect(runs[0] == runs[1], "outputs differ between runs");

  const fs::path dir = root / "0";
  try {
    const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
    v.expect(fit.at("schema_version") == 1 && fit.at("n") == 200, "fit document header");
    v.expect(fit.at("residuals").size() == 200 && fit.at("fitted").size() == 200, "fit document vectors");
    const auto st = nlohmann::json::parse(slurp(dir / "stoned.json"));
    v.expect(st.contains("decomposition") && st.contains("efficiency"), "stoned document sections");
    v.expect(st.at("efficiency").at("technical_efficiency").size() == 200, "efficiency vector");
    const auto man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    v.expect(man.at("files").size() >= 4, "plot manifest");
  } catch (const std::exception& e) {
    v.expect(false, std::string("schema: ") + e.what());
  }
  for (const char* csv : {"fit.csv", "stoned.csv"}) {
    const std::string text = slurp(dir / csv);
    v.expect(std::count(text.begin(), text.end(), '\n') == 201, std::string(csv) + " rows");
  }
  v.expect(t < 30.0, "took " + fmt(t) + " s");
  v.detail = "files=" + std::to_string(runs[0].size()) + " time=" + fmt(t) + "s";
  std::error_code ec;
  fs::remove_all(root, ec);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "exact fit on concave data", exact_fit},
      {2, "small-instance oracle equivalence", oracle_equivalence},
      {3, "symmetric expectile equals least squares", symmetric_expectile},
      {4, "constraint generation agreement", generation_agreement},
      {5, "corrected residuals", corrected_cnls},
      {6, "decomposition recovery", decomposition_recovery},
      {7, "conditional inefficiency quadrature", jlms_oracle},
      {8, "structural invariants", structural_invariants},
      {9, "isotonic reductions", isotonic_reductions},
      {10, "command-line pipeline", cli_pipeline},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    std::string line = std::string(v.passed() ? "PASS" : "FAIL") + " " + std::to_string(c.id) + " " + c.name;
    if (!v.detail.empty()) line += " [" + v.detail + "]";
    for (const auto& f : v.failures) line += " ; " + f;
    std::cout << line << std::endl;
    if (!v.passed()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
