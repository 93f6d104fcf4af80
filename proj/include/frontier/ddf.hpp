#pragma once

#include "frontier/afriat.hpp"
#include "frontier/model.hpp"

namespace frontier {

/// Least-squares directional distance function model. Residuals follow
///   gamma_i'y_i = alpha_i + beta_i'x_i (+ delta_i'b_i) - eps_i.
FrontierEstimate fit_cnls_ddf(const Dataset& ds, const DdfSpec& spec, const FitOptions& opt = {});

/// Quantile / expectile DDF models. Residuals follow
///   gamma_i'y_i = alpha_i + beta_i'x_i (+ delta_i'b_i) + eps+_i - eps-_i,
/// so eps+ - eps- carries the opposite sign of the least-squares eps.
FrontierEstimate fit_cqer_ddf(const Dataset& ds, const DdfSpec& spec, const FitOptions& opt = {});

}  // namespace frontier
