#pragma once

#include "frontier/afriat.hpp"
#include "frontier/model.hpp"

namespace frontier {

/// Additive CNLS (quadratic program) or multiplicative CNLS (log-transformed
/// smooth problem, optionally with contextual variables), all Afriat rows.
FrontierEstimate fit_cnls(const Dataset& ds, const CnlsSpec& spec, const FitOptions& opt = {});

struct C2nlsAdjustment {
  VectorXd adjusted_residuals;  // eps_i - max_j eps_j
  VectorXd adjusted_alpha;      // alpha_i + max_j eps_j
  double shift = 0.0;
};

/// Corrected CNLS: shifts the residuals so that the largest one is zero.
/// Requires an additive least-squares estimate.
C2nlsAdjustment c2nls_adjust(const FrontierEstimate& est);

}  // namespace frontier
