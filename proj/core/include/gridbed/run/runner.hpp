#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridbed/net/topology.hpp"
#include "gridbed/premises/premises.hpp"
#include "gridbed/scenario/report.hpp"
#include "gridbed/scenario/scenario.hpp"
#include "gridbed/scenario/trace.hpp"
#include "gridbed/sim/engine.hpp"

namespace gridbed::run {

net::Topology build_topology_from_scenario(const scenario::ScenarioSpec& spec);

premises::Appliance to_appliance(const scenario::ApplianceSpec& spec);

// Units with base profiles, appliances in initial state and occupancy
// traces (always-occupied where the scenario leaves them out). Profile
// synthesis draws from the given registry's named streams.
std::vector<premises::Unit> build_units(const scenario::ScenarioSpec& spec,
                                        sim::RngRegistry& rng);

// Actual per-appliance on-history of a finished run: scripted intervals
// replayed together with the applied commands found in the trace, in the
// same order the kernel dispatched them.
std::map<std::string, std::vector<sim::TimeInterval>> reconstruct_appliance_intervals(
    const scenario::ScenarioSpec& spec, const std::vector<scenario::TraceLine>& lines);

struct RunOptions {
  std::string out_dir;       // empty: keep everything in memory
  bool write_files = false;
};

struct RunResult {
  scenario::ScenarioSpec spec;
  std::vector<scenario::TraceLine> trace;
  scenario::RunInfo run;
  std::uint64_t trace_hash = 0;
  std::string trace_hash_hex;
  scenario::ReportBundle report;
  std::string trace_path;    // set when files were written
  std::string report_path;
};

// Executes a validated scenario end to end and builds its report. Throws
// ScenarioError when validation fails.
RunResult run_scenario(const scenario::ScenarioSpec& spec, const RunOptions& options = {});

}  // namespace gridbed::run
