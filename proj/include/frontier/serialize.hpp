#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frontier/constraint_gen.hpp"
#include "frontier/dataset.hpp"
#include "frontier/model.hpp"
#include "frontier/stoned.hpp"

namespace frontier {

inline constexpr int schema_version = 1;

/// Everything one CLI run reports about an estimate. The observations travel
/// with the estimate so that later pipeline stages need no data file.
struct ResultDocument {
  FrontierEstimate estimate;
  Dataset data;
  std::optional<GenState> generation;
  std::optional<DecompositionResult> decomposition;
  std::optional<EfficiencyResult> efficiency;
};

/// Wall-clock fields are written only with record_timing, so that equal
/// inputs give byte-identical documents.
nlohmann::json to_json(const ResultDocument& doc, bool record_timing = false);

/// Inverse of to_json. Throws Error(invalid_argument) on a malformed document
/// or an unknown schema version.
ResultDocument result_from_json(const nlohmann::json& j);

/// {"error": {"kind": ..., "message": ...}}
nlohmann::json error_json(ErrorKind kind, const std::string& message);

SolveStatus parse_solve_status(std::string_view s);

}  // namespace frontier
