#pragma once

#include <string>
#include <vector>

#include "gridbed/scenario/scenario.hpp"
#include "gridbed/scenario/trace.hpp"

namespace gridbed::scenario {

struct ReportBundle {
  std::string report_json;
  std::string demand_csv;
  std::string wastage_csv;
};

// Builds the full analysis report from a scenario and its trace lines. Pure
// with respect to its inputs (path statistics derive from the scenario seed
// alone), so rebuilding offline from a trace file reproduces the run-time
// report byte for byte.
ReportBundle build_report(const ScenarioSpec& spec, const std::vector<TraceLine>& lines,
                          const RunInfo& run, std::uint64_t trace_hash);

}  // namespace gridbed::scenario
