#pragma once

#include <optional>

#include "frontier/dataset.hpp"
#include "frontier/model.hpp"

namespace frontier {

enum class DecompositionMethod { mom, qle, kde };

const char* to_string(DecompositionMethod m);
DecompositionMethod parse_decomposition_method(std::string_view s);

/// Variance split of the composite error. KDE fills mu only.
struct DecompositionResult {
  std::optional<double> sigma_u;
  std::optional<double> sigma_v;
  std::optional<double> signal_to_noise;  // lambda = sigma_u / sigma_v
  std::optional<double> sigma;
  double mu = 0.0;  // E[u]
  DecompositionMethod method = DecompositionMethod::mom;
  FunctionType function_type = FunctionType::production;
  // Method intermediates.
  std::optional<double> m2, m3;          // mom
  std::optional<double> log_likelihood;  // qle, at the returned lambda
  std::optional<double> bandwidth;       // kde
};

struct KdeConfig {
  double bandwidth = 0.0;  // 0 selects Silverman's rule 1.06 sd n^(-1/5)
  Index grid_points = 1000;
  double grid_padding = 3.0;  // grid spans [min - pad h, max + pad h]
};

struct QleConfig {
  double lambda_min = 1e-6;
  double lambda_max = 1e3;
  Index grid_points = 400;  // log-spaced bracketing scan
  int max_iterations = 500;
  double tolerance = 1e-12;  // relative width of the final bracket
};

struct EfficiencyResult {
  VectorXd conditional_inefficiency;  // E[u_i | eps_i]
  VectorXd technical_efficiency;      // filled by technical_efficiency()
  VectorXd mu_star;                   // -/+ eps_i sigma_u^2 / sigma^2
  double sigma_star = 0.0;
};

DecompositionResult decompose_mom(const VectorXd& residuals, FunctionType fun);
DecompositionResult decompose_qle(const VectorXd& residuals, FunctionType fun, const QleConfig& cfg = {});
DecompositionResult decompose_kde(const VectorXd& residuals, FunctionType fun, const KdeConfig& cfg = {});

/// Quasi-likelihood profile in lambda for residuals already in production
/// orientation.
double qle_log_likelihood(const VectorXd& residuals, double lambda);

/// phi(a) / (1 - Phi(a)), accurate over the whole real line.
double inverse_mills(double a);
/// log Phi(x) without underflow.
double log_normal_cdf(double x);

/// Conditional mean of u given the composite residual (half-normal u,
/// normal v). Needs a mom or qle decomposition with positive scales.
EfficiencyResult jlms_conditional(const VectorXd& residuals, const DecompositionResult& decomp, FunctionType fun);

/// exp(-E[u|e]) / exp(E[u|e]) for multiplicative production / cost,
/// (y - E[u|e]) / y and (y + E[u|e]) / y for the additive ones.
VectorXd technical_efficiency(const Dataset& ds, const FrontierEstimate& est, const EfficiencyResult& eff,
                              const ModelSpec& spec);

double unconditional_expected_inefficiency(const DecompositionResult& decomp);

}  // namespace frontier
