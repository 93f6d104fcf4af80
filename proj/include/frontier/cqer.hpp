#pragma once

#include "frontier/afriat.hpp"
#include "frontier/model.hpp"

namespace frontier {

/// Convex quantile regression (linear program in the additive case).
FrontierEstimate fit_cqr(const Dataset& ds, const CqerSpec& spec, const FitOptions& opt = {});

/// Convex expectile regression (quadratic program in the additive case).
FrontierEstimate fit_cer(const Dataset& ds, const CqerSpec& spec, const FitOptions& opt = {});

}  // namespace frontier
