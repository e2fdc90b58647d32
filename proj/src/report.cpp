#include "specspan/report.hpp"

#include <cmath>

namespace specspan {

namespace {

// JSON has no infinities; non-finite values are written as null.
nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json solution_json(const Solution& sol) {
  return {{"indices", sol.indices}, {"value", number(sol.value)}};
}

nlohmann::json spanner_json(const Spanner& sp) {
  nlohmann::json tags = nlohmann::json::array();
  for (StageTag t : sp.stage_tags) tags.push_back(t == StageTag::VolumeGreedy ? "volume-greedy" : "d-spanner");
  return {{"indices", sp.indices},
          {"stage_tags", tags},
          {"size", sp.size()},
          {"alpha", number(sp.alpha)},
          {"k", sp.params.k},
          {"greedy_size", sp.greedy_size}};
}

nlohmann::json pipeline_report_json(const PipelineReport& rep, const nlohmann::json& config) {
  nlohmann::json parts = nlohmann::json::array();
  for (std::size_t i = 0; i < rep.coresets.size(); ++i)
    parts.push_back({{"part", i}, {"size", rep.part_sizes[i]}, {"coreset", rep.coresets[i]}});

  nlohmann::json reference = {{"kind", rep.reference_kind()}};
  if (const auto v = rep.reference_value()) reference["value"] = number(*v);
  if (rep.same_solver_reference) reference["same_solver"] = number(*rep.same_solver_reference);
  if (rep.brute_reference) reference["brute"] = number(*rep.brute_reference);

  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [stage, ms] : rep.timings_ms) timings[stage] = number(ms);

  nlohmann::json out = {{"config", config},
                        {"parts", parts},
                        {"coreset_sizes", rep.coreset_sizes()},
                        {"union_size", rep.union_indices.size()},
                        {"objective", number(rep.objective)},
                        {"solution", solution_json(rep.solution)},
                        {"reference", reference},
                        {"ratio", number(rep.ratio)},
                        {"guarantee", number(rep.guarantee)},
                        {"alpha_used", number(rep.alpha_used)},
                        {"comm_bytes", rep.comm_bytes},
                        {"timings_ms", timings},
                        {"seed", rep.seed},
                        {"version", kReportVersion}};
  if (rep.peak_retained > 0) out["peak_retained"] = rep.peak_retained;
  return out;
}

}  // namespace specspan
