#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frontier/types.hpp"

namespace frontier {

/// Observation blocks of one estimation problem. Rows are observations
/// (decision making units), columns are variables. Treated as immutable once
/// built; every estimator takes it by const reference.
struct Dataset {
  MatrixXd x;                 // n x m inputs
  MatrixXd y;                 // n x q outputs
  std::optional<MatrixXd> z;  // n x r contextual variables
  std::optional<MatrixXd> b;  // n x s undesirable outputs
  std::vector<std::string> x_names;
  std::vector<std::string> y_names;
  std::vector<std::string> z_names;
  std::vector<std::string> b_names;

  Index n() const { return x.rows(); }
  Index m() const { return x.cols(); }
  Index q() const { return y.cols(); }
  Index r() const { return z ? z->cols() : 0; }
  Index s() const { return b ? b->cols() : 0; }

  /// First output column; the single-output estimators read only this.
  VectorXd response() const { return y.col(0); }
};

struct ValidationRequirements {
  bool positive_y = false;     // multiplicative models take logs of y
  bool require_z = false;
  bool require_b = false;
  bool single_output = false;  // q == 1 for non-DDF models
};

struct Violation {
  std::string rule;
  std::string block;  // "x", "y", "z", "b" or empty for global rules
  Index row = -1;
  Index col = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks every Dataset invariant plus the model-conditional requirements and
/// reports all violations at once.
ValidationReport validate(const Dataset& ds, const ValidationRequirements& req = {});

/// Throws Error(data) carrying the full report when validation fails.
void ensure_valid(const Dataset& ds, const ValidationRequirements& req = {});

/// Reads a comma-separated file with a mandatory header row and projects the
/// selected columns, in selection order, into the dataset blocks.
Dataset load_csv(const std::string& path, const std::vector<std::string>& x_select,
                 const std::vector<std::string>& y_select,
                 const std::vector<std::string>& z_select = {},
                 const std::vector<std::string>& b_select = {});

/// Same as load_csv but from an already opened stream; `source` is used in
/// error messages only.
Dataset read_csv(std::istream& in, const std::string& source,
                 const std::vector<std::string>& x_select,
                 const std::vector<std::string>& y_select,
                 const std::vector<std::string>& z_select = {},
                 const std::vector<std::string>& b_select = {});

/// Writes x, y, z, b blocks (in that order) with 17 significant digits, so
/// that reading the file back reproduces every value exactly.
void write_csv(std::ostream& out, const Dataset& ds);
void write_csv(const std::string& path, const Dataset& ds);

struct DgpConfig {
  Index n = 500;
  double input_low = 1.0;
  double input_high = 10.0;
  double noise_sd = 0.7;
  double inefficiency_sd = 0.0;  // scale of an optional half-normal term subtracted from y
  std::uint64_t seed = 0;
};

/// Synthetic two-input production data y = x1^0.4 * x2^0.4 + u,
/// x ~ U[low, high], u ~ N(0, noise_sd^2), minus |N(0, inefficiency_sd^2)| when set.
///
/// Random stream: std::mt19937_64 seeded with `seed`. Uniforms are drawn
/// first for all x entries in row-major order, each from the top 53 bits of
/// one engine output; normals follow, one per row, from the Marsaglia polar
/// method on the same engine, then the half-normal inefficiency draws when
/// inefficiency_sd > 0. The engine's output sequence is fixed by the
/// C++ standard, so the data are identical across platforms up to libm
/// rounding in log/sqrt.
Dataset generate_dgp(const DgpConfig& cfg);

}  // namespace frontier
