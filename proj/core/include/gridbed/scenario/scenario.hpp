#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridbed/drm/policy.hpp"
#include "gridbed/net/topology.hpp"
#include "gridbed/premises/premises.hpp"
#include "gridbed/premises/sensors.hpp"
#include "gridbed/sched/scheduler.hpp"
#include "gridbed/sim/time.hpp"

namespace gridbed::scenario {

inline constexpr int kSchemaVersion = 1;

enum class TraceCategory { Demand, Command, Message, Sensor, Price, Shed };

const char* to_string(TraceCategory cat);

struct LinkOverride {
  net::LinkKind kind = net::LinkKind::BPL;
  std::optional<int> base_latency_ms;
  std::optional<int> jitter_ms;
  std::optional<double> loss_prob;
};

struct CongestionSpec {
  net::LinkKind kind = net::LinkKind::BPL;
  sim::TimeInterval window;
  double loss_multiplier = 1.0;
  double latency_multiplier = 1.0;
};

struct TopologySection {
  enum class Template { Hostel, OfficeSection };
  Template tmpl = Template::Hostel;
  int units = 0;  // hostel
  int rooms = 0;  // office section
  std::vector<LinkOverride> link_overrides;
  std::vector<CongestionSpec> congestion;
};

struct BaseLoadSection {
  enum class Kind { None, Flat, Nems };
  Kind kind = Kind::None;
  double peak_kw = 0.0;     // nems: daily max of the summed profile
  double kw_per_unit = 0.0; // flat
  int resolution_s = 60;
};

struct ApplianceSpec {
  std::string unit;
  std::string id;
  premises::ApplianceLabel label = premises::ApplianceLabel::Other;
  double rated_power_w = 0.0;
  bool flexible = false;
  double inconvenience_weight = 1.0;
  bool initially_on = false;
  std::vector<premises::PhaseSig> signature;
  std::vector<sim::TimeInterval> on_intervals;  // scripted user behavior
};

struct OccupancySpec {
  std::string unit;
  std::vector<premises::OccupancyTrace::Interval> intervals;
};

struct DrmSection {
  bool enabled = false;
  double threshold_kw = 0.0;
  int control_period_s = 60;
  int meter_report_period_s = 60;
  sim::SimTime control_phase_ms = 500;  // tick offset past the report instants
  double restore_hysteresis_kw = 0.0;
};

// Shorthand impairment knobs for the command path (the plug links).
struct ImpairmentSection {
  std::optional<sim::SimTime> command_latency_ms;
  std::optional<double> command_loss_prob;
};

struct PricingSection {
  bool enabled = false;
  drm::PricingPolicy policy;
};

struct SchedulerSection {
  bool present = false;
  sched::ScheduleInstance instance;
};

struct AnalyticsSection {
  int idle_window_s = 900;
  std::optional<double> noise_threshold_db;  // default: sensor model midpoint
  double tariff_sgd_per_kwh = 0.2328;
  int extrapolation_room_count = 0;
  int path_stats_samples = 10000;
};

struct OutputSection {
  std::string trace = "trace.jsonl";
  std::string report = "report.json";
  std::string demand_csv = "demand.csv";
  std::string wastage_csv = "wastage.csv";
  std::set<TraceCategory> categories = {TraceCategory::Demand,  TraceCategory::Command,
                                        TraceCategory::Message, TraceCategory::Sensor,
                                        TraceCategory::Price,   TraceCategory::Shed};
};

struct ScenarioSpec {
  int schema_version = kSchemaVersion;
  std::string name;
  sim::SimTime horizon_ms = 0;
  std::uint64_t seed = 0;
  TopologySection topology;
  BaseLoadSection base_load;
  std::vector<ApplianceSpec> appliances;
  std::vector<OccupancySpec> occupancy;
  premises::SensorConfig sensors;
  DrmSection drm;
  ImpairmentSection impairment;
  PricingSection pricing;
  SchedulerSection scheduler;
  AnalyticsSection analytics;
  OutputSection output;

  // Unit ids implied by the topology template, in id order.
  std::vector<std::string> unit_ids() const;
  double noise_threshold_db() const {
    return analytics.noise_threshold_db.value_or(sensors.noise_threshold_db());
  }
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Strict parse: unknown fields are hard errors; parse errors carry line
// positions. Structural type errors throw; semantic issues go to validate().
ScenarioSpec parse_scenario(const std::string& json_text);
ScenarioSpec load_scenario_file(const std::string& path);

// Dotted-path overrides ("drm.threshold_kw=33") applied to the raw JSON
// before parsing. Values are parsed as JSON, falling back to strings.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& key_value_pairs);

// Full referential and range validation; empty result means runnable.
std::vector<std::string> validate(const ScenarioSpec& spec);

// Canonical JSON form (parse(serialize(s)) == s); embedded as trace metadata.
std::string serialize_scenario(const ScenarioSpec& spec);

std::string unit_id(TopologySection::Template tmpl, int index, int count);

}  // namespace gridbed::scenario
