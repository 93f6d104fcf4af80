#pragma once

#include <vector>

#include "frontier/afriat.hpp"
#include "frontier/model.hpp"

namespace frontier {

enum class InitialStrategy { regression_only, k_nearest };

const char* to_string(InitialStrategy s);
InitialStrategy parse_initial_strategy(std::string_view s);

struct GenConfig {
  InitialStrategy initial_strategy = InitialStrategy::regression_only;
  Index k = 3;                 // neighbours per observation for k_nearest
  double violation_tol = 1e-6;
  Index batch_limit = 0;       // rows added per round; 0 means max(n, 1000)
  int max_rounds = 100;
};

struct GenState {
  std::vector<AfriatPair> active_pairs;  // in insertion order
  int iteration = 0;                     // rounds solved after the initial one
  // Entry 0 is the size of the initial subproblem (equality rows plus seed
  // rows), later entries the Afriat rows added in each round.
  std::vector<Index> violations_added_per_round;
  Index total_constraints = 0;
  std::vector<double> objective_trace;
  double runtime = 0.0;
  bool converged = false;
};

struct GenResult {
  FrontierEstimate estimate;
  GenState state;
};

/// Initial Afriat rows for the chosen strategy, deduplicated, sorted by (i, j).
std::vector<AfriatPair> initial_pairs(const Dataset& ds, const GenConfig& cfg);

/// Solves over a relaxed Afriat set and adds the most violated rows until
/// none exceeds cfg.violation_tol. Each round is warm started from the
/// previous estimate. Hitting max_rounds returns the last estimate with
/// state.converged = false and diagnostics.status = max_iterations.
GenResult fit_generated(const Dataset& ds, const ModelSpec& spec, const GenConfig& cfg = {},
                        const FitOptions& opt = {});

}  // namespace frontier
