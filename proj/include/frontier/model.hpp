#pragma once

#include <optional>
#include <string>

#include "frontier/dataset.hpp"
#include "frontier/solver.hpp"
#include "frontier/types.hpp"

namespace frontier {

/// Declarative description of one Afriat-family estimation problem. The
/// family-specific spec structs below convert into this form.
struct ModelSpec {
  Family family = Family::cnls;  // cnls: squared loss, cqr: quantile, cer: expectile
  ErrorComposition cet = ErrorComposition::additive;
  FunctionType fun = FunctionType::production;
  ReturnsToScale rts = ReturnsToScale::vrs;
  double tau = 0.5;  // quantile / expectile level, ignored for cnls
  bool use_contextual = false;
  bool isotonic = false;  // Afriat rows gated by the dominance matrix

  // Directional distance function. Directions are constant across
  // observations; gb is used iff the dataset carries undesirable outputs.
  bool ddf = false;
  VectorXd gx;
  VectorXd gy;
  VectorXd gb;

  bool split_residuals() const { return family != Family::cnls; }
};

struct CnlsSpec {
  ErrorComposition error_composition = ErrorComposition::additive;
  FunctionType function_type = FunctionType::production;
  ReturnsToScale rts = ReturnsToScale::vrs;
  bool use_contextual = false;

  ModelSpec to_model() const;
};

enum class Flavor { quantile, expectile };

struct CqerSpec {
  double tau = 0.5;
  Flavor flavor = Flavor::quantile;
  ErrorComposition error_composition = ErrorComposition::additive;
  FunctionType function_type = FunctionType::production;
  ReturnsToScale rts = ReturnsToScale::vrs;
  bool use_contextual = false;

  ModelSpec to_model() const;
};

struct DdfSpec {
  VectorXd gx;
  VectorXd gy;
  VectorXd gb;  // empty unless the dataset has undesirable outputs
  Family flavor = Family::cnls;
  double tau = 0.5;
  FunctionType function_type = FunctionType::production;

  ModelSpec to_model() const;
};

struct FitOptions {
  ToleranceConfig tol;
  // Tiny ridge weight on slope-type coefficients (beta, gamma, delta). It
  // selects a bounded representative among the optimal coefficient sets and
  // moves fitted values by O(ridge).
  double ridge = 1e-10;
};

struct SolveSummary {
  SolveStatus status = SolveStatus::numerical_failure;
  KktResiduals kkt;
  int iterations = 0;
  double wall_time = 0.0;
  std::string message;
};

/// Per-observation hyperplanes and residuals of one fit. Residuals and
/// fitted values are the canonical output: coefficients are not unique.
struct FrontierEstimate {
  ModelSpec spec;
  VectorXd alpha;                         // n, zero under crs
  MatrixXd beta;                          // n x m
  std::optional<MatrixXd> gamma;          // n x q, ddf only
  std::optional<MatrixXd> delta;          // n x s, ddf with undesirable outputs
  std::optional<VectorXd> z_coefficients; // r, contextual models
  std::optional<VectorXd> residuals;      // cnls family
  std::optional<VectorXd> residual_pos;   // cqr / cer
  std::optional<VectorXd> residual_neg;
  std::optional<VectorXd> phi;            // multiplicative: alpha_i + beta_i'x_i - 1
  VectorXd fitted;                        // own hyperplane at own observation
  double objective_value = 0.0;
  SolveSummary diagnostics;

  Index n() const { return alpha.size(); }
  /// residuals, or residual_pos - residual_neg for the split families.
  VectorXd composite_residuals() const;
};

/// Throws Error(invalid_argument / data / unsupported) when the spec cannot be
/// estimated on this dataset.
void check_model(const Dataset& ds, const ModelSpec& spec);

ValidationRequirements requirements_for(const ModelSpec& spec);

}  // namespace frontier
