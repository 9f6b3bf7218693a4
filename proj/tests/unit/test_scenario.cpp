#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridbed/run/runner.hpp"
#include "gridbed/scenario/report.hpp"
#include "gridbed/scenario/scenario.hpp"
#include "gridbed/scenario/trace.hpp"

using namespace gridbed;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Two hostel units with two flexible lights each, one simulated hour. The
// lights switch on after 20 minutes and push demand over the 7 kW cap.
std::string small_hostel_json() {
  return R"({
    "schema_version": 1,
    "name": "mini_hostel",
    "horizon_ms": 3600000,
    "seed": 5,
    "topology": {"template": "hostel", "units": 2},
    "base_load": {"kind": "flat", "kw_per_unit": 3.0},
    "appliances": [
      {"unit": "u1", "id": "u1-a", "label": "Light", "rated_power_w": 400.0, "flexible": true,
       "inconvenience_weight": 1.0, "on_intervals": [{"from_ms": 1200000, "to_ms": 3540000}]},
      {"unit": "u1", "id": "u1-b", "label": "Light", "rated_power_w": 400.0, "flexible": true,
       "inconvenience_weight": 2.0, "on_intervals": [{"from_ms": 1200000, "to_ms": 3540000}]},
      {"unit": "u2", "id": "u2-a", "label": "Light", "rated_power_w": 400.0, "flexible": true,
       "inconvenience_weight": 1.0, "on_intervals": [{"from_ms": 1200000, "to_ms": 3540000}]},
      {"unit": "u2", "id": "u2-b", "label": "Light", "rated_power_w": 400.0, "flexible": true,
       "inconvenience_weight": 2.0, "on_intervals": [{"from_ms": 1200000, "to_ms": 3540000}]}
    ],
    "sensors": {"period_s": 300, "p_motion_when_occupied": 1.0},
    "drm": {"enabled": true, "threshold_kw": 7.0, "control_period_s": 60,
            "meter_report_period_s": 60, "control_phase_ms": 500, "restore_hysteresis_kw": 0.35},
    "pricing": {"kind": "flat", "price_sgd_per_kwh": 0.2328},
    "analytics": {"path_stats_samples": 200},
    "output": {"trace": "mini.trace.jsonl", "report": "mini.report.json",
               "demand_csv": "mini.demand.csv", "wastage_csv": "mini.wastage.csv"}
  })";
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gridbed_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("bundled scenarios parse and validate cleanly") {
  for (const char* name : {"fig4_peakshave.json", "wastage_office.json"}) {
    const auto path = std::filesystem::path(GRIDBED_SCENARIO_DIR) / name;
    const auto spec = scenario::parse_scenario(slurp(path));
    const auto errors = scenario::validate(spec);
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
  }
}

TEST_CASE("unknown fields are hard errors with a field path") {
  const std::string text = R"({"name": "x", "horizon_ms": 1000, "seed": 1,
    "topology": {"template": "hostel", "units": 1}, "surprise": 1})";
  CHECK_THROWS_WITH_AS(scenario::parse_scenario(text), doctest::Contains("surprise"),
                       scenario::ScenarioError);
}

TEST_CASE("parse errors carry line positions") {
  CHECK_THROWS_WITH_AS(scenario::parse_scenario("{\n  \"name\": oops\n}"),
                       doctest::Contains("line 2"), scenario::ScenarioError);
}

TEST_CASE("semantic validation names the offending field") {
  auto spec = scenario::parse_scenario(small_hostel_json());

  SUBCASE("appliance referencing a missing unit") {
    spec.appliances[0].unit = "u9";
    const auto errors = scenario::validate(spec);
    REQUIRE_FALSE(errors.empty());
    bool found = false;
    for (const auto& e : errors) found = found || e.find("appliances[0].unit") != std::string::npos;
    CHECK(found);
  }
  SUBCASE("non-positive threshold") {
    spec.drm.threshold_kw = -33.0;
    spec.drm.restore_hysteresis_kw = 0.0;
    const auto errors = scenario::validate(spec);
    bool found = false;
    for (const auto& e : errors) {
      found = found || e.find("threshold_kw: must be > 0") != std::string::npos;
    }
    CHECK(found);
  }
  SUBCASE("occupancy must cover the horizon") {
    spec.occupancy.push_back({"u1", {{0, 1000, true}}});
    CHECK_FALSE(scenario::validate(spec).empty());
  }
  SUBCASE("demand control needs two flexible loads per unit") {
    spec.appliances.pop_back();
    CHECK_FALSE(scenario::validate(spec).empty());
  }
}

TEST_CASE("dotted-path overrides rewrite scenario fields") {
  const auto text = scenario::apply_overrides(
      small_hostel_json(), {"drm.threshold_kw=33", "seed=9", "name=renamed"});
  const auto spec = scenario::parse_scenario(text);
  CHECK(spec.drm.threshold_kw == doctest::Approx(33.0));
  CHECK(spec.seed == 9);
  CHECK(spec.name == "renamed");
}

TEST_CASE("scenario serialization round-trips") {
  const auto spec = scenario::parse_scenario(slurp(
      std::filesystem::path(GRIDBED_SCENARIO_DIR) / "wastage_office.json"));
  const auto round = scenario::parse_scenario(scenario::serialize_scenario(spec));
  CHECK(round.name == spec.name);
  CHECK(round.seed == spec.seed);
  CHECK(round.horizon_ms == spec.horizon_ms);
  CHECK(round.appliances.size() == spec.appliances.size());
  CHECK(round.occupancy.size() == spec.occupancy.size());
  CHECK(round.scheduler.present == spec.scheduler.present);
  CHECK(round.output.categories == spec.output.categories);
  CHECK(scenario::serialize_scenario(round) == scenario::serialize_scenario(spec));
}

TEST_CASE("a run is deterministic per seed and the controller defends the cap") {
  const auto spec = scenario::parse_scenario(small_hostel_json());
  const auto first = run::run_scenario(spec);
  const auto second = run::run_scenario(spec);
  CHECK(first.trace_hash == second.trace_hash);
  CHECK(first.report.report_json == second.report.report_json);

  auto reseeded = spec;
  reseeded.seed = 6;
  const auto third = run::run_scenario(reseeded);
  CHECK(third.trace_hash != first.trace_hash);

  // uncontrolled would be 6 + 1.6 = 7.6 kW; the cap is 7
  int sheds = 0;
  double max_true = 0.0;
  for (const auto& line : first.trace) {
    if (const auto* shed = std::get_if<scenario::ShedLine>(&line.payload)) {
      if (shed->action == scenario::ShedLine::Action::Shed) ++sheds;
    }
    if (const auto* demand = std::get_if<scenario::DemandLine>(&line.payload)) {
      if (line.at > 1'500'000 && line.at < 3'000'000) {
        max_true = std::max(max_true, demand->true_kw);
      }
    }
  }
  CHECK(sheds >= 1);
  CHECK(max_true <= 7.0 + 1e-9);
}

TEST_CASE("sensor cadence produces one line per period per sensor node") {
  auto spec = scenario::parse_scenario(small_hostel_json());
  spec.drm.enabled = false;
  spec.appliances.clear();
  const auto result = run::run_scenario(spec);
  int sensor_lines = 0;
  for (const auto& line : result.trace) {
    if (std::holds_alternative<scenario::SensorLine>(line.payload)) ++sensor_lines;
  }
  // 2 units x 4 sensor nodes x (3600 / 300) samples
  CHECK(sensor_lines == 2 * 4 * 12);
}

TEST_CASE("trace files round-trip and the offline report matches the run") {
  const auto dir = temp_dir("roundtrip");
  const auto spec = scenario::parse_scenario(small_hostel_json());
  run::RunOptions options;
  options.out_dir = dir.string();
  options.write_files = true;
  const auto result = run::run_scenario(spec, options);

  const auto doc = scenario::read_trace_file(result.trace_path);
  CHECK(doc.lines.size() == result.trace.size());
  CHECK(doc.file_hash == result.trace_hash);
  CHECK(doc.run.events_processed == result.run.events_processed);

  const auto rebuilt = scenario::build_report(doc.scenario, doc.lines, doc.run, doc.file_hash);
  CHECK(rebuilt.report_json == result.report.report_json);
  CHECK(rebuilt.demand_csv == result.report.demand_csv);
  CHECK(rebuilt.wastage_csv == result.report.wastage_csv);
}

TEST_CASE("truncated traces are rejected") {
  const auto dir = temp_dir("truncated");
  {
    std::ofstream out(dir / "empty.jsonl");
  }
  CHECK_THROWS_WITH_AS(scenario::read_trace_file((dir / "empty.jsonl").string()),
                       doctest::Contains("truncated trace"), scenario::TraceError);

  const auto spec = scenario::parse_scenario(small_hostel_json());
  run::RunOptions options;
  options.out_dir = dir.string();
  options.write_files = true;
  const auto result = run::run_scenario(spec, options);
  const auto full = slurp(result.trace_path);
  // drop the end marker
  const auto cut = full.substr(0, full.rfind("{\"kind\":\"end\""));
  {
    std::ofstream out(dir / "cut.jsonl", std::ios::binary);
    out << cut;
  }
  CHECK_THROWS_WITH_AS(scenario::read_trace_file((dir / "cut.jsonl").string()),
                       doctest::Contains("truncated trace"), scenario::TraceError);
}

TEST_CASE("price signals are delivered to every gateway") {
  const auto spec = scenario::parse_scenario(small_hostel_json());
  const auto result = run::run_scenario(spec);
  int price_lines = 0;
  for (const auto& line : result.trace) {
    if (std::holds_alternative<scenario::PriceLine>(line.payload)) ++price_lines;
  }
  CHECK(price_lines == 1);  // flat tariff: single signal at t=0
}

TEST_CASE("messages category can be enabled for full transport visibility") {
  auto spec = scenario::parse_scenario(small_hostel_json());
  spec.output.categories.insert(scenario::TraceCategory::Message);
  const auto result = run::run_scenario(spec);
  int delivered = 0;
  for (const auto& line : result.trace) {
    if (const auto* msg = std::get_if<scenario::MessageLine>(&line.payload)) {
      if (msg->phase == scenario::MessageLine::Phase::Delivered) ++delivered;
    }
  }
  CHECK(delivered > 100);  // meter reports + sensor samples + price pushes
  CHECK(result.report.report_json.find("bytes_delivered") != std::string::npos);
}

TEST_CASE("running an invalid scenario throws") {
  auto spec = scenario::parse_scenario(small_hostel_json());
  spec.horizon_ms = 0;
  CHECK_THROWS_AS(run::run_scenario(spec), scenario::ScenarioError);
}
