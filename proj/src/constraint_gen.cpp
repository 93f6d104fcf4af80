#include "frontier/constraint_gen.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>
#include <utility>

namespace frontier {

const char* to_string(InitialStrategy s) {
  return s == InitialStrategy::regression_only ? "regression-only" : "k-nearest";
}

InitialStrategy parse_initial_strategy(std::string_view s) {
  if (s == "regression-only" || s == "regression_only") return InitialStrategy::regression_only;
  if (s == "k-nearest" || s == "k_nearest") return InitialStrategy::k_nearest;
  throw Error(ErrorKind::invalid_argument, "unknown initial strategy '" + std::string(s) + "'");
}

std::vector<AfriatPair> initial_pairs(const Dataset& ds, const GenConfig& cfg) {
  std::vector<AfriatPair> out;
  if (cfg.initial_strategy == InitialStrategy::regression_only) return out;
  if (cfg.k < 0) throw Error(ErrorKind::invalid_argument, "k must be non-negative");
  const Index n = ds.n();
  const Index k = std::min(cfg.k, n - 1);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) dist[j] = (ds.x.row(i) - ds.x.row(j)).squaredNorm();
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return dist[a] < dist[b]; });
    Index taken = 0;
    for (Index j : order) {
      if (taken == k) break;
      if (j == i) continue;
      out.push_back({i, j});
      ++taken;
    }
  }
  std::sort(out.begin(), out.end(), [](const AfriatPair& a, const AfriatPair& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GenResult fit_generated(const Dataset& ds, const ModelSpec& spec, const GenConfig& cfg, const FitOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (spec.ddf || spec.isotonic) {
    throw Error(ErrorKind::unsupported, "constraint generation covers the non-directional, non-isotonic models");
  }
  if (!(cfg.violation_tol > 0.0)) throw Error(ErrorKind::invalid_argument, "violation tolerance must be positive");
  if (cfg.batch_limit < 0) throw Error(ErrorKind::invalid_argument, "batch limit must be non-negative");
  if (cfg.max_rounds < 0) throw Error(ErrorKind::invalid_argument, "max_rounds must be non-negative");
  check_model(ds, spec);

  const Index n = ds.n();
  const Index batch = cfg.batch_limit > 0 ? cfg.batch_limit : std::max<Index>(n, 1000);

  GenResult out;
  GenState& st = out.state;
  st.active_pairs = initial_pairs(ds, cfg);
  std::set<std::pair<Index, Index>> present;
  for (const auto& p : st.active_pairs) present.emplace(p.i, p.j);
  st.violations_added_per_round.push_back(count_constraint_rows(ds, spec, static_cast<Index>(st.active_pairs.size())));

  FrontierEstimate est = fit_with_rows(ds, spec, st.active_pairs, opt);
  st.objective_trace.push_back(est.objective_value);
  int solver_iterations = est.diagnostics.iterations;

  for (;;) {
    const auto viol = find_violations(est, ds, spec, cfg.violation_tol);
    if (viol.empty()) {
      st.converged = true;
      break;
    }
    if (st.iteration >= cfg.max_rounds) break;
    Index added = 0;
    for (const auto& v : viol) {
      if (added == batch) break;
      if (!present.emplace(v.i, v.j).second) continue;
      st.active_pairs.push_back({v.i, v.j});
      ++added;
    }
    if (added == 0) break;  // violated rows already present: solver accuracy limit
    st.violations_added_per_round.push_back(added);
    ++st.iteration;
    est = fit_with_rows(ds, spec, st.active_pairs, opt, &est);
    st.objective_trace.push_back(est.objective_value);
    solver_iterations += est.diagnostics.iterations;
  }

  st.total_constraints = std::accumulate(st.violations_added_per_round.begin(), st.violations_added_per_round.end(), Index{0});
  st.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  est.diagnostics.iterations = solver_iterations;
  est.diagnostics.wall_time = st.runtime;
  if (!st.converged) {
    est.diagnostics.status = SolveStatus::max_iterations;
    est.diagnostics.message = "constraint generation stopped with violated Afriat rows";
  }
  out.estimate = std::move(est);
  return out;
}

}  // namespace frontier
