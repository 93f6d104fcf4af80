#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace frontier {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Error categories surfaced by the library. The CLI reports them verbatim
/// in its machine-readable error document.
enum class ErrorKind {
  invalid_argument,
  io,
  unknown_column,
  non_numeric,
  data,
  infeasible,
  solver_failure,
  wrong_skew,
  variance_underflow,
  non_convergence,
  degenerate,
  unsupported,
  geometry,
  contract,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class ErrorComposition { additive, multiplicative };
enum class FunctionType { production, cost };
enum class ReturnsToScale { vrs, crs };

/// Residual loss of the estimator: least squares (CNLS), asymmetric absolute
/// deviations (quantile) or asymmetric squares (expectile).
enum class Family { cnls, cqr, cer };

const char* to_string(ErrorComposition v);
const char* to_string(FunctionType v);
const char* to_string(ReturnsToScale v);
const char* to_string(Family v);

// Accept both the long names above and the short CLI spellings
// (add/mult, prod/cost).
ErrorComposition parse_error_composition(std::string_view s);
FunctionType parse_function_type(std::string_view s);
ReturnsToScale parse_returns_to_scale(std::string_view s);
Family parse_family(std::string_view s);

}  // namespace frontier
