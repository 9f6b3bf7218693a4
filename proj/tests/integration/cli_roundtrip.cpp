// End-to-end checks against the real CLI binary: exit codes, file outputs,
// overrides, env handling and run/report equivalence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "PASS  " : "FAIL  ") << what << "\n";
  if (!ok) ++failures;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(GRIDBED_CLI_PATH) + " " +
                          args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gridbed_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kMiniScenario = R"({
  "name": "mini_cli",
  "horizon_ms": 1800000,
  "seed": 11,
  "topology": {"template": "hostel", "units": 1},
  "base_load": {"kind": "flat", "kw_per_unit": 3.0},
  "appliances": [
    {"unit": "u1", "id": "a", "label": "Light", "rated_power_w": 500.0, "flexible": true,
     "on_intervals": [{"from_ms": 600000, "to_ms": 1740000}]},
    {"unit": "u1", "id": "b", "label": "Light", "rated_power_w": 500.0, "flexible": true,
     "on_intervals": [{"from_ms": 600000, "to_ms": 1740000}]}
  ],
  "sensors": {"period_s": 300},
  "drm": {"enabled": true, "threshold_kw": 3.6, "control_period_s": 60,
          "meter_report_period_s": 60, "control_phase_ms": 500, "restore_hysteresis_kw": 0.18},
  "analytics": {"path_stats_samples": 100},
  "output": {"trace": "mini.trace.jsonl", "report": "mini.report.json",
             "demand_csv": "mini.demand.csv", "wastage_csv": "mini.wastage.csv"}
})";

}  // namespace

int main() {
  const fs::path scenarios(GRIDBED_SCENARIO_DIR);

  check(run_cli("validate " + (scenarios / "fig4_peakshave.json").string()) == 0,
        "validate accepts the bundled peak-shaving scenario");
  check(run_cli("validate " + (scenarios / "wastage_office.json").string()) == 0,
        "validate accepts the bundled office wastage scenario");

  const auto dir = fresh_dir("roundtrip");
  const auto scenario_path = dir / "mini.json";
  {
    std::ofstream out(scenario_path);
    out << kMiniScenario;
  }

  {
    auto broken = std::string(kMiniScenario);
    broken.replace(broken.find("3.6"), 3, "-1.0");
    std::ofstream out(dir / "broken.json");
    out << broken;
  }
  check(run_cli("validate " + (dir / "broken.json").string()) == 1,
        "validate rejects a negative threshold with exit code 1");
  check(run_cli("report " + (dir / "missing.jsonl").string()) == 2,
        "report on a missing trace exits with code 2");

  const auto out_a = fresh_dir("out_a");
  check(run_cli("run " + scenario_path.string() + " --out " + out_a.string()) == 0,
        "run exits cleanly");
  check(fs::exists(out_a / "mini.trace.jsonl") && fs::exists(out_a / "mini.report.json") &&
            fs::exists(out_a / "mini.demand.csv"),
        "run writes trace, report and demand CSV");

  // offline report rebuild matches the run-time report byte for byte
  const auto out_b = fresh_dir("out_b");
  check(run_cli("report " + (out_a / "mini.trace.jsonl").string() + " --out " + out_b.string()) == 0,
        "report rebuilds from the trace");
  check(slurp(out_a / "mini.report.json") == slurp(out_b / "mini.report.json"),
        "offline report equals the run-time report");
  check(slurp(out_a / "mini.demand.csv") == slurp(out_b / "mini.demand.csv"),
        "offline demand CSV equals the run-time CSV");

  // determinism across invocations
  const auto out_c = fresh_dir("out_c");
  run_cli("run " + scenario_path.string() + " --out " + out_c.string());
  check(slurp(out_a / "mini.trace.jsonl") == slurp(out_c / "mini.trace.jsonl"),
        "two runs with one seed produce byte-identical traces");

  const auto out_d = fresh_dir("out_d");
  run_cli("run " + scenario_path.string() + " --seed 12 --out " + out_d.string());
  check(slurp(out_a / "mini.trace.jsonl") != slurp(out_d / "mini.trace.jsonl"),
        "changing the seed changes the trace");

  const auto out_e = fresh_dir("out_e");
  check(run_cli("run " + scenario_path.string() + " --set drm.threshold_kw=33 --out " +
                out_e.string()) == 0,
        "run accepts dotted-path overrides");
  check(slurp(out_e / "mini.report.json").find("\"threshold_kw\": 33.0") != std::string::npos,
        "the report echoes the overridden threshold");

  const auto out_env = fresh_dir("out_env");
  const auto out_flag = fresh_dir("out_flag");
  run_cli("run " + scenario_path.string() + " --out " + out_flag.string(),
          "GRIDBED_OUT=" + out_env.string());
  check(fs::exists(out_env / "mini.trace.jsonl") && !fs::exists(out_flag / "mini.trace.jsonl"),
        "GRIDBED_OUT overrides --out");

  if (failures > 0) {
    std::cout << failures << " CLI check(s) failed\n";
    return 1;
  }
  std::cout << "all CLI checks passed\n";
  return 0;
}
