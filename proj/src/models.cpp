#include <algorithm>
#include <cmath>

#include "frontier/cnls.hpp"
#include "frontier/cqer.hpp"
#include "frontier/ddf.hpp"

namespace frontier {

ModelSpec CnlsSpec::to_model() const {
  ModelSpec m;
  m.family = Family::cnls;
  m.cet = error_composition;
  m.fun = function_type;
  m.rts = rts;
  m.use_contextual = use_contextual;
  return m;
}

ModelSpec CqerSpec::to_model() const {
  ModelSpec m;
  m.family = flavor == Flavor::quantile ? Family::cqr : Family::cer;
  m.cet = error_composition;
  m.fun = function_type;
  m.rts = rts;
  m.tau = tau;
  m.use_contextual = use_contextual;
  return m;
}

ModelSpec DdfSpec::to_model() const {
  ModelSpec m;
  m.family = flavor;
  m.fun = function_type;
  m.tau = tau;
  m.ddf = true;
  m.gx = gx;
  m.gy = gy;
  m.gb = gb;
  return m;
}

VectorXd FrontierEstimate::composite_residuals() const {
  if (residuals) return *residuals;
  if (residual_pos && residual_neg) return *residual_pos - *residual_neg;
  throw Error(ErrorKind::contract, "estimate carries no residuals");
}

ValidationRequirements requirements_for(const ModelSpec& spec) {
  ValidationRequirements req;
  req.positive_y = spec.cet == ErrorComposition::multiplicative;
  req.require_z = spec.use_contextual;
  req.require_b = spec.ddf && spec.gb.size() > 0;
  req.single_output = !spec.ddf;
  return req;
}

void check_model(const Dataset& ds, const ModelSpec& spec) {
  if (spec.family != Family::cnls && !(spec.tau > 0.0 && spec.tau < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "tau must lie strictly between 0 and 1");
  }
  if (spec.use_contextual && spec.cet == ErrorComposition::additive) {
    throw Error(ErrorKind::unsupported, "contextual variables are supported for multiplicative models only");
  }
  if (spec.ddf) {
    if (spec.cet != ErrorComposition::additive) throw Error(ErrorKind::unsupported, "DDF models are additive");
    if (spec.rts != ReturnsToScale::vrs) throw Error(ErrorKind::unsupported, "DDF models use variable returns to scale");
    if (spec.use_contextual) throw Error(ErrorKind::unsupported, "DDF models do not take contextual variables");
    if (spec.isotonic) throw Error(ErrorKind::unsupported, "isotonic DDF models are not available");
    if (spec.gx.size() != ds.m()) throw Error(ErrorKind::invalid_argument, "gx must have one entry per input");
    if (spec.gy.size() != ds.q()) throw Error(ErrorKind::invalid_argument, "gy must have one entry per output");
    if (spec.gb.size() != ds.s()) {
      throw Error(ErrorKind::invalid_argument,
                  ds.b ? "gb must have one entry per undesirable output" : "gb given but the dataset has no undesirable outputs");
    }
    bool positive = false;
    for (const VectorXd* g : {&spec.gx, &spec.gy, &spec.gb}) {
      if (!g->allFinite()) throw Error(ErrorKind::invalid_argument, "direction vectors must be finite");
      positive = positive || (g->array() > 0.0).any();
    }
    if (!positive) throw Error(ErrorKind::invalid_argument, "direction vectors need at least one positive entry");
  }
  ensure_valid(ds, requirements_for(spec));
}

FrontierEstimate fit_cnls(const Dataset& ds, const CnlsSpec& spec, const FitOptions& opt) {
  return fit(ds, spec.to_model(), opt);
}

C2nlsAdjustment c2nls_adjust(const FrontierEstimate& est) {
  if (!est.residuals || est.spec.family != Family::cnls) {
    throw Error(ErrorKind::contract, "quantile residuals not decomposable: C2NLS needs a least-squares estimate");
  }
  if (est.spec.cet != ErrorComposition::additive || est.spec.ddf) {
    throw Error(ErrorKind::contract, "C2NLS applies to additive CNLS estimates");
  }
  const VectorXd& eps = *est.residuals;
  if (eps.size() == 0) throw Error(ErrorKind::contract, "empty residual vector");
  C2nlsAdjustment out;
  out.shift = eps.maxCoeff();
  out.adjusted_residuals = eps.array() - out.shift;
  out.adjusted_alpha = est.alpha.array() + out.shift;
  return out;
}

FrontierEstimate fit_cqr(const Dataset& ds, const CqerSpec& spec, const FitOptions& opt) {
  CqerSpec s = spec;
  s.flavor = Flavor::quantile;
  return fit(ds, s.to_model(), opt);
}

FrontierEstimate fit_cer(const Dataset& ds, const CqerSpec& spec, const FitOptions& opt) {
  CqerSpec s = spec;
  s.flavor = Flavor::expectile;
  return fit(ds, s.to_model(), opt);
}

FrontierEstimate fit_cnls_ddf(const Dataset& ds, const DdfSpec& spec, const FitOptions& opt) {
  DdfSpec s = spec;
  s.flavor = Family::cnls;
  return fit(ds, s.to_model(), opt);
}

FrontierEstimate fit_cqer_ddf(const Dataset& ds, const DdfSpec& spec, const FitOptions& opt) {
  if (spec.flavor == Family::cnls) throw Error(ErrorKind::invalid_argument, "fit_cqer_ddf needs a quantile or expectile flavor");
  return fit(ds, spec.to_model(), opt);
}

}  // namespace frontier
