#pragma once

// JSON rendering of pipeline and spanner results (schema version "1").

#include "json.hpp"

#include "specspan/coreset.hpp"
#include "specspan/spanner.hpp"

namespace specspan {

inline constexpr const char* kReportVersion = "1";

/// Top-level pipeline report; `config` is echoed verbatim. Timings are the
/// only non-deterministic fields.
nlohmann::json pipeline_report_json(const PipelineReport& rep, const nlohmann::json& config);

nlohmann::json spanner_json(const Spanner& sp);

nlohmann::json solution_json(const Solution& sol);

}  // namespace specspan
