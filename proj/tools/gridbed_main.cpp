// gridbed: scenario-driven simulator for a campus smart-grid testbed.
// Subcommands: validate (check a scenario), run (simulate and write trace +
// report), report (rebuild the report from an existing trace).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridbed/run/runner.hpp"
#include "gridbed/scenario/report.hpp"
#include "gridbed/scenario/scenario.hpp"
#include "gridbed/scenario/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gridbed::scenario::ScenarioError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// GRIDBED_OUT wins over --out when both are present.
std::string resolve_out_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("GRIDBED_OUT"); env && *env) return env;
  return flag_value;
}

int cmd_validate(const std::string& scenario_path) {
  const auto spec = gridbed::scenario::parse_scenario(read_file(scenario_path));
  const auto errors = gridbed::scenario::validate(spec);
  if (errors.empty()) {
    std::cout << "ok: " << spec.name << "\n";
    return kExitOk;
  }
  for (const auto& e : errors) std::cerr << "error: " << e << "\n";
  return kExitValidation;
}

int cmd_run(const std::string& scenario_path, const std::vector<std::string>& overrides,
            const std::string& out_flag, const std::string& seed_flag) {
  std::string text = read_file(scenario_path);
  std::vector<std::string> all_overrides = overrides;
  if (!seed_flag.empty()) all_overrides.push_back("seed=" + seed_flag);
  if (!all_overrides.empty()) text = gridbed::scenario::apply_overrides(text, all_overrides);

  const auto spec = gridbed::scenario::parse_scenario(text);
  const auto errors = gridbed::scenario::validate(spec);
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
    return kExitValidation;
  }

  gridbed::run::RunOptions options;
  options.out_dir = resolve_out_dir(out_flag);
  options.write_files = true;
  const auto result = gridbed::run::run_scenario(spec, options);

  std::cout << "scenario:  " << spec.name << "\n"
            << "seed:      " << spec.seed << "\n"
            << "events:    " << result.run.events_processed << "\n"
            << "final_ms:  " << result.run.final_time << "\n"
            << "trace:     " << result.trace_path << " (" << result.trace_hash_hex << ")\n"
            << "report:    " << result.report_path << "\n";
  return kExitOk;
}

int cmd_report(const std::string& trace_path, const std::string& out_flag) {
  const auto doc = gridbed::scenario::read_trace_file(trace_path);
  const auto bundle =
      gridbed::scenario::build_report(doc.scenario, doc.lines, doc.run, doc.file_hash);

  const std::filesystem::path out(resolve_out_dir(out_flag).empty() ? "." : resolve_out_dir(out_flag));
  std::filesystem::create_directories(out);
  const auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream file(out / name, std::ios::binary | std::ios::trunc);
    if (!file) throw gridbed::scenario::ScenarioError("cannot write: " + (out / name).string());
    file << content;
    return (out / name).string();
  };
  const auto report_path = write(doc.scenario.output.report, bundle.report_json);
  write(doc.scenario.output.demand_csv, bundle.demand_csv);
  write(doc.scenario.output.wastage_csv, bundle.wastage_csv);
  std::cout << "report:    " << report_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic smart-grid testbed simulator"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, out_dir, seed;
  std::vector<std::string> overrides;

  auto* validate = app.add_subcommand("validate", "check a scenario file without running it");
  validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

  auto* run = app.add_subcommand("run", "simulate a scenario and write trace + report");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--set", overrides, "dotted-path override, e.g. drm.threshold_kw=33");
  run->add_option("--out", out_dir, "output directory (default: current)");

  auto* report = app.add_subcommand("report", "rebuild the report from a trace file");
  report->add_option("trace", trace_path, "trace JSONL file")->required();
  report->add_option("--out", out_dir, "output directory (default: current)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (run->parsed()) return cmd_run(scenario_path, overrides, out_dir, seed);
    if (report->parsed()) return cmd_report(trace_path, out_dir);
  } catch (const gridbed::scenario::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const gridbed::scenario::TraceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
