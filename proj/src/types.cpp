#include "frontier/types.hpp"

namespace frontier {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::io: return "io";
    case ErrorKind::unknown_column: return "unknown_column";
    case ErrorKind::non_numeric: return "non_numeric";
    case ErrorKind::data: return "data";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::solver_failure: return "solver_failure";
    case ErrorKind::wrong_skew: return "wrong_skew";
    case ErrorKind::variance_underflow: return "variance_underflow";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::contract: return "contract";
  }
  return "unknown";
}

const char* to_string(ErrorComposition v) {
  return v == ErrorComposition::additive ? "additive" : "multiplicative";
}
const char* to_string(FunctionType v) { return v == FunctionType::production ? "production" : "cost"; }
const char* to_string(ReturnsToScale v) { return v == ReturnsToScale::vrs ? "vrs" : "crs"; }
const char* to_string(Family v) {
  switch (v) {
    case Family::cnls: return "cnls";
    case Family::cqr: return "cqr";
    case Family::cer: return "cer";
  }
  return "cnls";
}

ErrorComposition parse_error_composition(std::string_view s) {
  if (s == "add" || s == "additive") return ErrorComposition::additive;
  if (s == "mult" || s == "multiplicative") return ErrorComposition::multiplicative;
  throw Error(ErrorKind::invalid_argument, "unknown error composition '" + std::string(s) + "'");
}

FunctionType parse_function_type(std::string_view s) {
  if (s == "prod" || s == "production") return FunctionType::production;
  if (s == "cost") return FunctionType::cost;
  throw Error(ErrorKind::invalid_argument, "unknown function type '" + std::string(s) + "'");
}

ReturnsToScale parse_returns_to_scale(std::string_view s) {
  if (s == "vrs") return ReturnsToScale::vrs;
  if (s == "crs") return ReturnsToScale::crs;
  throw Error(ErrorKind::invalid_argument, "unknown returns to scale '" + std::string(s) + "'");
}

Family parse_family(std::string_view s) {
  if (s == "cnls") return Family::cnls;
  if (s == "cqr") return Family::cqr;
  if (s == "cer") return Family::cer;
  throw Error(ErrorKind::invalid_argument, "unknown model family '" + std::string(s) + "'");
}

}  // namespace frontier
