#pragma once

#include <vector>

#include "frontier/model.hpp"

namespace frontier {

/// Ordered pair (i, j): hyperplane i against hyperplane j, evaluated at x_i.
struct AfriatPair {
  Index i = 0;
  Index j = 0;
  bool operator==(const AfriatPair&) const = default;
};

struct AfriatViolation {
  Index i = 0;
  Index j = 0;
  double magnitude = 0.0;
};

/// Position of every coefficient block inside the decision vector.
struct Layout {
  Index n = 0, m = 0, q = 0, r = 0, s = 0;
  bool has_alpha = true;
  bool has_eps = true;  // false when the squared loss is substituted out
  bool split = false;   // eps+ / eps- instead of a single eps
  Index alpha = 0, beta = 0, delta = 0, gamma = 0, lambda = 0, eps = 0, eps_neg = 0;
  Index size = 0;
};

Layout make_layout(const Dataset& ds, const ModelSpec& spec);

/// Every ordered pair i != j, row-major.
std::vector<AfriatPair> all_pairs(Index n);

/// Pairs allowed by the model: all pairs, or the dominance-gated ones for
/// isotonic specs.
std::vector<AfriatPair> admissible_pairs(const Dataset& ds, const ModelSpec& spec);

/// planes(k, j) = hyperplane j evaluated at observation k:
///   alpha_j + beta_j'x_k (+ delta_j'b_k - gamma_j'y_k).
MatrixXd evaluate_planes(const Dataset& ds, const FrontierEstimate& est);

/// Afriat violations above tol over the admissible pairs, sorted by
/// decreasing magnitude (ties by i, then j).
std::vector<AfriatViolation> find_violations(const FrontierEstimate& est, const Dataset& ds, const ModelSpec& spec,
                                        double tol);

/// Estimates the model with exactly the given Afriat rows. `warm`, when
/// given, must come from the same dataset and spec; it seeds the solver.
FrontierEstimate fit_with_rows(const Dataset& ds, const ModelSpec& spec, const std::vector<AfriatPair>& rows,
                               const FitOptions& opt = {}, const FrontierEstimate* warm = nullptr);

/// Full-constraint estimate: all admissible rows.
FrontierEstimate fit(const Dataset& ds, const ModelSpec& spec, const FitOptions& opt = {});

/// Total Afriat rows plus equality rows of a subproblem with `afriat_rows`
/// Afriat rows (bounds excluded).
Index count_constraint_rows(const Dataset& ds, const ModelSpec& spec, Index afriat_rows);

}  // namespace frontier
