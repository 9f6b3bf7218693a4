#include "gridbed/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridbed::scenario {

using json = nlohmann::ordered_json;

const char* to_string(TraceCategory cat) {
  switch (cat) {
    case TraceCategory::Demand: return "Demand";
    case TraceCategory::Command: return "Command";
    case TraceCategory::Message: return "Message";
    case TraceCategory::Sensor: return "Sensor";
    case TraceCategory::Price: return "Price";
    case TraceCategory::Shed: return "Shed";
  }
  return "?";
}

namespace {

std::optional<TraceCategory> category_from_string(const std::string& name) {
  for (auto cat : {TraceCategory::Demand, TraceCategory::Command, TraceCategory::Message,
                   TraceCategory::Sensor, TraceCategory::Price, TraceCategory::Shed}) {
    if (name == to_string(cat)) return cat;
  }
  return std::nullopt;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ScenarioError(path + ": " + message);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

// Unknown fields are hard errors so typos never silently change a run.
void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end()) {
      fail(path + "." + key, "unknown field");
    }
  }
}

template <typename T>
T get_number(const json& j, const std::string& path, const char* key, std::optional<T> fallback) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required field");
  }
  const auto& v = j.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(path + "." + key, "expected a number");
  } else {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      fail(path + "." + key, "expected an integer");
    }
  }
  return v.get<T>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required field");
  }
  if (!j.at(key).is_string()) fail(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

bool get_bool(const json& j, const std::string& path, const char* key, std::optional<bool> fallback) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required field");
  }
  if (!j.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
  return j.at(key).get<bool>();
}

sim::TimeInterval parse_interval(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"from_ms", "to_ms"});
  return {get_number<sim::SimTime>(j, path, "from_ms", std::nullopt),
          get_number<sim::SimTime>(j, path, "to_ms", std::nullopt)};
}

premises::GaussSpec parse_gauss(const json& j, const std::string& path, premises::GaussSpec dflt) {
  require_object(j, path);
  check_keys(j, path, {"mean", "stddev"});
  return {get_number<double>(j, path, "mean", dflt.mean),
          get_number<double>(j, path, "stddev", dflt.stddev)};
}

net::LinkKind parse_link_kind(const json& j, const std::string& path) {
  const auto name = get_string(j, path, "kind");
  const auto kind = net::link_kind_from_string(name);
  if (!kind) fail(path + ".kind", "unknown link kind '" + name + "'");
  return *kind;
}

TopologySection parse_topology(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"template", "units", "rooms", "link_overrides", "congestion"});
  TopologySection t;
  const auto tmpl = get_string(j, path, "template");
  if (tmpl == "hostel") {
    t.tmpl = TopologySection::Template::Hostel;
  } else if (tmpl == "office_section") {
    t.tmpl = TopologySection::Template::OfficeSection;
  } else {
    fail(path + ".template", "expected 'hostel' or 'office_section'");
  }
  t.units = get_number<int>(j, path, "units", 0);
  t.rooms = get_number<int>(j, path, "rooms", 0);
  if (j.contains("link_overrides")) {
    const auto& arr = j.at("link_overrides");
    if (!arr.is_array()) fail(path + ".link_overrides", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".link_overrides[" + std::to_string(i) + "]";
      require_object(arr[i], p);
      check_keys(arr[i], p, {"kind", "base_latency_ms", "jitter_ms", "loss_prob"});
      LinkOverride o;
      o.kind = parse_link_kind(arr[i], p);
      if (arr[i].contains("base_latency_ms")) {
        o.base_latency_ms = get_number<int>(arr[i], p, "base_latency_ms", std::nullopt);
      }
      if (arr[i].contains("jitter_ms")) {
        o.jitter_ms = get_number<int>(arr[i], p, "jitter_ms", std::nullopt);
      }
      if (arr[i].contains("loss_prob")) {
        o.loss_prob = get_number<double>(arr[i], p, "loss_prob", std::nullopt);
      }
      t.link_overrides.push_back(o);
    }
  }
  if (j.contains("congestion")) {
    const auto& arr = j.at("congestion");
    if (!arr.is_array()) fail(path + ".congestion", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".congestion[" + std::to_string(i) + "]";
      require_object(arr[i], p);
      check_keys(arr[i], p, {"kind", "from_ms", "to_ms", "loss_multiplier", "latency_multiplier"});
      CongestionSpec c;
      c.kind = parse_link_kind(arr[i], p);
      c.window = {get_number<sim::SimTime>(arr[i], p, "from_ms", std::nullopt),
                  get_number<sim::SimTime>(arr[i], p, "to_ms", std::nullopt)};
      c.loss_multiplier = get_number<double>(arr[i], p, "loss_multiplier", 1.0);
      c.latency_multiplier = get_number<double>(arr[i], p, "latency_multiplier", 1.0);
      t.congestion.push_back(c);
    }
  }
  return t;
}

BaseLoadSection parse_base_load(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"kind", "peak_kw", "kw_per_unit", "resolution_s"});
  BaseLoadSection b;
  const auto kind = get_string(j, path, "kind");
  if (kind == "none") {
    b.kind = BaseLoadSection::Kind::None;
  } else if (kind == "flat") {
    b.kind = BaseLoadSection::Kind::Flat;
  } else if (kind == "nems") {
    b.kind = BaseLoadSection::Kind::Nems;
  } else {
    fail(path + ".kind", "expected 'none', 'flat' or 'nems'");
  }
  b.peak_kw = get_number<double>(j, path, "peak_kw", 0.0);
  b.kw_per_unit = get_number<double>(j, path, "kw_per_unit", 0.0);
  b.resolution_s = get_number<int>(j, path, "resolution_s", 60);
  return b;
}

ApplianceSpec parse_appliance(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"unit", "id", "label", "rated_power_w", "flexible", "inconvenience_weight",
                       "initially_on", "signature", "on_intervals"});
  ApplianceSpec a;
  a.unit = get_string(j, path, "unit");
  a.id = get_string(j, path, "id");
  const auto label = get_string(j, path, "label");
  const auto parsed = premises::appliance_label_from_string(label);
  if (!parsed) fail(path + ".label", "unknown appliance label '" + label + "'");
  a.label = *parsed;
  a.rated_power_w = get_number<double>(j, path, "rated_power_w", std::nullopt);
  a.flexible = get_bool(j, path, "flexible", false);
  a.inconvenience_weight = get_number<double>(j, path, "inconvenience_weight", 1.0);
  a.initially_on = get_bool(j, path, "initially_on", false);
  if (j.contains("signature")) {
    const auto& arr = j.at("signature");
    if (!arr.is_array()) fail(path + ".signature", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".signature[" + std::to_string(i) + "]";
      require_object(arr[i], p);
      check_keys(arr[i], p, {"duration_s", "power_w"});
      a.signature.push_back({get_number<int>(arr[i], p, "duration_s", std::nullopt),
                             get_number<double>(arr[i], p, "power_w", std::nullopt)});
    }
  }
  if (j.contains("on_intervals")) {
    const auto& arr = j.at("on_intervals");
    if (!arr.is_array()) fail(path + ".on_intervals", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      a.on_intervals.push_back(parse_interval(arr[i], path + ".on_intervals[" + std::to_string(i) + "]"));
    }
  }
  return a;
}

premises::SensorConfig parse_sensors(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"period_s", "p_motion_when_occupied", "noise_occupied_db",
                       "noise_unoccupied_db", "temp_c", "humidity_pct", "lux_occupied",
                       "lux_unoccupied"});
  premises::SensorConfig s;
  s.period_s = get_number<int>(j, path, "period_s", s.period_s);
  s.p_motion_when_occupied =
      get_number<double>(j, path, "p_motion_when_occupied", s.p_motion_when_occupied);
  if (j.contains("noise_occupied_db")) {
    s.noise_occupied = parse_gauss(j.at("noise_occupied_db"), path + ".noise_occupied_db", s.noise_occupied);
  }
  if (j.contains("noise_unoccupied_db")) {
    s.noise_unoccupied =
        parse_gauss(j.at("noise_unoccupied_db"), path + ".noise_unoccupied_db", s.noise_unoccupied);
  }
  if (j.contains("temp_c")) s.temp_c = parse_gauss(j.at("temp_c"), path + ".temp_c", s.temp_c);
  if (j.contains("humidity_pct")) {
    s.humidity_pct = parse_gauss(j.at("humidity_pct"), path + ".humidity_pct", s.humidity_pct);
  }
  if (j.contains("lux_occupied")) {
    s.lux_occupied = parse_gauss(j.at("lux_occupied"), path + ".lux_occupied", s.lux_occupied);
  }
  if (j.contains("lux_unoccupied")) {
    s.lux_unoccupied = parse_gauss(j.at("lux_unoccupied"), path + ".lux_unoccupied", s.lux_unoccupied);
  }
  return s;
}

DrmSection parse_drm(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"enabled", "threshold_kw", "control_period_s", "meter_report_period_s",
                       "control_phase_ms", "restore_hysteresis_kw"});
  DrmSection d;
  d.enabled = get_bool(j, path, "enabled", true);
  d.threshold_kw = get_number<double>(j, path, "threshold_kw", std::nullopt);
  d.control_period_s = get_number<int>(j, path, "control_period_s", 60);
  d.meter_report_period_s = get_number<int>(j, path, "meter_report_period_s", 60);
  d.control_phase_ms = get_number<sim::SimTime>(j, path, "control_phase_ms", 500);
  d.restore_hysteresis_kw =
      get_number<double>(j, path, "restore_hysteresis_kw", 0.05 * d.threshold_kw);
  return d;
}

PricingSection parse_pricing(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"kind", "price_sgd_per_kwh", "day_price", "night_price", "day_start_min",
                       "day_end_min"});
  PricingSection p;
  p.enabled = true;
  const auto kind = get_string(j, path, "kind");
  if (kind == "flat") {
    p.policy.kind = drm::PricingPolicy::Kind::Flat;
    p.policy.flat_price = get_number<double>(j, path, "price_sgd_per_kwh", std::nullopt);
  } else if (kind == "two_tier") {
    p.policy.kind = drm::PricingPolicy::Kind::TwoTier;
    p.policy.day_price = get_number<double>(j, path, "day_price", std::nullopt);
    p.policy.night_price = get_number<double>(j, path, "night_price", std::nullopt);
    p.policy.day_start_min = get_number<int>(j, path, "day_start_min", std::nullopt);
    p.policy.day_end_min = get_number<int>(j, path, "day_end_min", std::nullopt);
  } else {
    fail(path + ".kind", "expected 'flat' or 'two_tier'");
  }
  return p;
}

SchedulerSection parse_scheduler(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"slot_length_min", "slot_prices", "objective", "rooms", "requests"});
  SchedulerSection s;
  s.present = true;
  const int slot_length = get_number<int>(j, path, "slot_length_min", 60);
  if (!j.contains("slot_prices") || !j.at("slot_prices").is_array()) {
    fail(path + ".slot_prices", "expected an array of prices");
  }
  for (const auto& v : j.at("slot_prices")) {
    if (!v.is_number()) fail(path + ".slot_prices", "expected numbers");
    s.instance.slot_prices.push_back(v.get<double>());
  }
  const auto objective = get_string(j, path, "objective", std::string("cost"));
  if (objective == "cost") {
    s.instance.objective = sched::ScheduleObjective::Cost;
  } else if (objective == "energy") {
    s.instance.objective = sched::ScheduleObjective::Energy;
  } else {
    fail(path + ".objective", "expected 'cost' or 'energy'");
  }
  if (j.contains("rooms")) {
    const auto& arr = j.at("rooms");
    if (!arr.is_array()) fail(path + ".rooms", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".rooms[" + std::to_string(i) + "]";
      require_object(arr[i], p);
      check_keys(arr[i], p, {"id", "capacity", "active_power_kw"});
      sched::RoomResource room;
      room.id = get_string(arr[i], p, "id");
      room.capacity = get_number<int>(arr[i], p, "capacity", std::nullopt);
      room.active_power_kw = get_number<double>(arr[i], p, "active_power_kw", std::nullopt);
      room.slot_length_min = slot_length;
      s.instance.rooms.push_back(std::move(room));
    }
  }
  if (j.contains("requests")) {
    const auto& arr = j.at("requests");
    if (!arr.is_array()) fail(path + ".requests", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".requests[" + std::to_string(i) + "]";
      require_object(arr[i], p);
      check_keys(arr[i], p, {"id", "duration_slots", "earliest_slot", "latest_slot", "attendees"});
      sched::MeetingRequest req;
      req.id = get_string(arr[i], p, "id");
      req.duration_slots = get_number<int>(arr[i], p, "duration_slots", std::nullopt);
      req.earliest_slot = get_number<int>(arr[i], p, "earliest_slot", std::nullopt);
      req.latest_slot = get_number<int>(arr[i], p, "latest_slot", std::nullopt);
      req.attendees = get_number<int>(arr[i], p, "attendees", 1);
      s.instance.requests.push_back(std::move(req));
    }
  }
  return s;
}

OutputSection parse_output(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"trace", "report", "demand_csv", "wastage_csv", "categories"});
  OutputSection o;
  o.trace = get_string(j, path, "trace", o.trace);
  o.report = get_string(j, path, "report", o.report);
  o.demand_csv = get_string(j, path, "demand_csv", o.demand_csv);
  o.wastage_csv = get_string(j, path, "wastage_csv", o.wastage_csv);
  if (j.contains("categories")) {
    const auto& arr = j.at("categories");
    if (!arr.is_array()) fail(path + ".categories", "expected an array");
    o.categories.clear();
    for (const auto& v : arr) {
      if (!v.is_string()) fail(path + ".categories", "expected strings");
      const auto cat = category_from_string(v.get<std::string>());
      if (!cat) fail(path + ".categories", "unknown category '" + v.get<std::string>() + "'");
      o.categories.insert(*cat);
    }
  }
  return o;
}

}  // namespace

std::string unit_id(TopologySection::Template tmpl, int index, int count) {
  const char prefix = tmpl == TopologySection::Template::Hostel ? 'u' : 'r';
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(count).size();
  while (digits.size() < width) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

std::vector<std::string> ScenarioSpec::unit_ids() const {
  const int count =
      topology.tmpl == TopologySection::Template::Hostel ? topology.units : topology.rooms;
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 1; i <= count; ++i) ids.push_back(unit_id(topology.tmpl, i, count));
  return ids;
}

ScenarioSpec parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, json_text.size()); ++i) {
      if (json_text[i] == '\n') ++line;
    }
    throw ScenarioError("parse error at line " + std::to_string(line) + ": " + e.what());
  }
  require_object(j, "$");
  check_keys(j, "$", {"schema_version", "name", "horizon_ms", "seed", "topology", "base_load",
                      "appliances", "occupancy", "sensors", "drm", "impairment", "pricing",
                      "scheduler", "analytics", "output"});

  ScenarioSpec spec;
  spec.schema_version = get_number<int>(j, "$", "schema_version", kSchemaVersion);
  if (spec.schema_version != kSchemaVersion) fail("$.schema_version", "unsupported schema version");
  spec.name = get_string(j, "$", "name");
  spec.horizon_ms = get_number<sim::SimTime>(j, "$", "horizon_ms", std::nullopt);
  spec.seed = get_number<std::uint64_t>(j, "$", "seed", std::nullopt);
  spec.topology = parse_topology(j.at("topology"), "$.topology");
  if (j.contains("base_load")) spec.base_load = parse_base_load(j.at("base_load"), "$.base_load");
  if (j.contains("appliances")) {
    const auto& arr = j.at("appliances");
    if (!arr.is_array()) fail("$.appliances", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      spec.appliances.push_back(parse_appliance(arr[i], "$.appliances[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("occupancy")) {
    const auto& arr = j.at("occupancy");
    if (!arr.is_array()) fail("$.occupancy", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "$.occupancy[" + std::to_string(i) + "]";
      require_object(arr[i], p);
      check_keys(arr[i], p, {"unit", "intervals"});
      OccupancySpec occ;
      occ.unit = get_string(arr[i], p, "unit");
      if (!arr[i].contains("intervals") || !arr[i].at("intervals").is_array()) {
        fail(p + ".intervals", "expected an array");
      }
      const auto& ivs = arr[i].at("intervals");
      for (std::size_t k = 0; k < ivs.size(); ++k) {
        const std::string ip = p + ".intervals[" + std::to_string(k) + "]";
        require_object(ivs[k], ip);
        check_keys(ivs[k], ip, {"from_ms", "to_ms", "occupied"});
        occ.intervals.push_back({get_number<sim::SimTime>(ivs[k], ip, "from_ms", std::nullopt),
                                 get_number<sim::SimTime>(ivs[k], ip, "to_ms", std::nullopt),
                                 get_bool(ivs[k], ip, "occupied", std::nullopt)});
      }
      spec.occupancy.push_back(std::move(occ));
    }
  }
  if (j.contains("sensors")) spec.sensors = parse_sensors(j.at("sensors"), "$.sensors");
  if (j.contains("drm")) spec.drm = parse_drm(j.at("drm"), "$.drm");
  if (j.contains("impairment")) {
    const auto& imp = j.at("impairment");
    require_object(imp, "$.impairment");
    check_keys(imp, "$.impairment", {"command_latency_ms", "command_loss_prob"});
    if (imp.contains("command_latency_ms")) {
      spec.impairment.command_latency_ms =
          get_number<sim::SimTime>(imp, "$.impairment", "command_latency_ms", std::nullopt);
    }
    if (imp.contains("command_loss_prob")) {
      spec.impairment.command_loss_prob =
          get_number<double>(imp, "$.impairment", "command_loss_prob", std::nullopt);
    }
  }
  if (j.contains("pricing")) spec.pricing = parse_pricing(j.at("pricing"), "$.pricing");
  if (j.contains("scheduler")) spec.scheduler = parse_scheduler(j.at("scheduler"), "$.scheduler");
  if (j.contains("analytics")) {
    const auto& a = j.at("analytics");
    require_object(a, "$.analytics");
    check_keys(a, "$.analytics",
               {"idle_window_s", "noise_threshold_db", "tariff_sgd_per_kwh",
                "extrapolation_room_count", "path_stats_samples"});
    spec.analytics.idle_window_s = get_number<int>(a, "$.analytics", "idle_window_s", 900);
    if (a.contains("noise_threshold_db")) {
      spec.analytics.noise_threshold_db =
          get_number<double>(a, "$.analytics", "noise_threshold_db", std::nullopt);
    }
    spec.analytics.tariff_sgd_per_kwh =
        get_number<double>(a, "$.analytics", "tariff_sgd_per_kwh", 0.2328);
    spec.analytics.extrapolation_room_count =
        get_number<int>(a, "$.analytics", "extrapolation_room_count", 0);
    spec.analytics.path_stats_samples =
        get_number<int>(a, "$.analytics", "path_stats_samples", 10000);
  }
  if (j.contains("output")) spec.output = parse_output(j.at("output"), "$.output");
  return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& key_value_pairs) {
  json j = json::parse(json_text);
  for (const auto& pair : key_value_pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ScenarioError("override must look like key.path=value: " + pair);
    const std::string path = pair.substr(0, eq);
    const std::string raw_value = pair.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw_value);
    } catch (const nlohmann::json::parse_error&) {
      value = raw_value;  // bare strings are allowed
    }
    json* cursor = &j;
    std::size_t begin = 0;
    while (true) {
      const auto dot = path.find('.', begin);
      const std::string segment = path.substr(begin, dot - begin);
      if (segment.empty()) throw ScenarioError("bad override path: " + path);
      const bool is_index = !segment.empty() &&
                            std::all_of(segment.begin(), segment.end(),
                                        [](char c) { return c >= '0' && c <= '9'; });
      if (dot == std::string::npos) {
        if (is_index && cursor->is_array()) {
          (*cursor)[std::stoul(segment)] = value;
        } else {
          (*cursor)[segment] = value;
        }
        break;
      }
      if (is_index && cursor->is_array()) {
        cursor = &(*cursor)[std::stoul(segment)];
      } else {
        cursor = &(*cursor)[segment];
      }
      begin = dot + 1;
    }
  }
  return j.dump();
}

std::vector<std::string> validate(const ScenarioSpec& spec) {
  std::vector<std::string> errors;
  auto err = [&](const std::string& path, const std::string& message) {
    errors.push_back(path + ": " + message);
  };

  if (spec.name.empty()) err("$.name", "must not be empty");
  if (spec.horizon_ms <= 0) err("$.horizon_ms", "must be > 0");

  const bool hostel = spec.topology.tmpl == TopologySection::Template::Hostel;
  if (hostel && spec.topology.units <= 0) err("$.topology.units", "no premises (must be > 0)");
  if (!hostel && spec.topology.rooms <= 0) err("$.topology.rooms", "no premises (must be > 0)");

  for (std::size_t i = 0; i < spec.topology.link_overrides.size(); ++i) {
    const auto& o = spec.topology.link_overrides[i];
    const std::string p = "$.topology.link_overrides[" + std::to_string(i) + "]";
    if (o.loss_prob && (*o.loss_prob < 0.0 || *o.loss_prob > 1.0)) {
      err(p + ".loss_prob", "must be in [0,1]");
    }
    if (o.base_latency_ms && *o.base_latency_ms < 0) err(p + ".base_latency_ms", "must be >= 0");
    if (o.jitter_ms && *o.jitter_ms < 0) err(p + ".jitter_ms", "must be >= 0");
  }
  for (std::size_t i = 0; i < spec.topology.congestion.size(); ++i) {
    const auto& c = spec.topology.congestion[i];
    const std::string p = "$.topology.congestion[" + std::to_string(i) + "]";
    if (c.window.to <= c.window.from) err(p, "congestion window is empty or inverted");
    if (c.loss_multiplier < 0.0 || c.latency_multiplier < 0.0) err(p, "multipliers must be >= 0");
  }

  switch (spec.base_load.kind) {
    case BaseLoadSection::Kind::Nems:
      if (spec.base_load.peak_kw <= 0.0) err("$.base_load.peak_kw", "must be > 0");
      break;
    case BaseLoadSection::Kind::Flat:
      if (spec.base_load.kw_per_unit < 0.0) err("$.base_load.kw_per_unit", "must be >= 0");
      break;
    case BaseLoadSection::Kind::None:
      break;
  }
  if (spec.base_load.resolution_s <= 0) err("$.base_load.resolution_s", "must be > 0");

  const auto units = spec.unit_ids();
  auto known_unit = [&](const std::string& id) {
    return std::find(units.begin(), units.end(), id) != units.end();
  };

  std::set<std::string> appliance_ids;
  std::map<std::string, int> flexible_per_unit;
  for (std::size_t i = 0; i < spec.appliances.size(); ++i) {
    const auto& a = spec.appliances[i];
    const std::string p = "$.appliances[" + std::to_string(i) + "]";
    if (!known_unit(a.unit)) err(p + ".unit", "unknown unit '" + a.unit + "'");
    if (a.id.empty()) err(p + ".id", "must not be empty");
    if (!appliance_ids.insert(a.id).second) err(p + ".id", "duplicate appliance id '" + a.id + "'");
    if (a.rated_power_w <= 0.0) err(p + ".rated_power_w", "must be > 0");
    if (a.inconvenience_weight <= 0.0) err(p + ".inconvenience_weight", "must be > 0");
    for (std::size_t k = 0; k < a.signature.size(); ++k) {
      if (a.signature[k].duration_s <= 0) {
        err(p + ".signature[" + std::to_string(k) + "].duration_s", "must be > 0");
      }
      if (a.signature[k].power_w < 0.0) {
        err(p + ".signature[" + std::to_string(k) + "].power_w", "must be >= 0");
      }
    }
    sim::SimTime last = -1;
    for (std::size_t k = 0; k < a.on_intervals.size(); ++k) {
      const auto& iv = a.on_intervals[k];
      const std::string ip = p + ".on_intervals[" + std::to_string(k) + "]";
      if (iv.from < 0 || iv.to <= iv.from) err(ip, "empty or inverted interval");
      if (iv.to > spec.horizon_ms) err(ip, "interval exceeds the horizon");
      if (iv.from < last) err(ip, "intervals must be sorted and non-overlapping");
      last = iv.to;
    }
    if (a.flexible) ++flexible_per_unit[a.unit];
  }

  std::set<std::string> occupancy_units;
  for (std::size_t i = 0; i < spec.occupancy.size(); ++i) {
    const auto& occ = spec.occupancy[i];
    const std::string p = "$.occupancy[" + std::to_string(i) + "]";
    if (!known_unit(occ.unit)) err(p + ".unit", "unknown unit '" + occ.unit + "'");
    if (!occupancy_units.insert(occ.unit).second) err(p + ".unit", "duplicate occupancy for unit");
    premises::OccupancyTrace trace;
    trace.intervals = occ.intervals;
    for (const auto& msg : trace.validate(spec.horizon_ms)) err(p, msg);
  }

  if (spec.sensors.period_s <= 0) err("$.sensors.period_s", "must be > 0");
  if (spec.sensors.p_motion_when_occupied < 0.0 || spec.sensors.p_motion_when_occupied > 1.0) {
    err("$.sensors.p_motion_when_occupied", "must be in [0,1]");
  }

  if (spec.drm.enabled) {
    if (spec.drm.threshold_kw <= 0.0) err("$.drm.threshold_kw", "must be > 0");
    if (spec.drm.control_period_s <= 0) err("$.drm.control_period_s", "must be > 0");
    if (spec.drm.meter_report_period_s <= 0) err("$.drm.meter_report_period_s", "must be > 0");
    if (spec.drm.control_phase_ms < 0 ||
        spec.drm.control_phase_ms >= sim::seconds(spec.drm.control_period_s)) {
      err("$.drm.control_phase_ms", "must be in [0, control period)");
    }
    if (spec.drm.restore_hysteresis_kw < 0.0 ||
        spec.drm.restore_hysteresis_kw >= spec.drm.threshold_kw) {
      err("$.drm.restore_hysteresis_kw", "must be in [0, threshold_kw)");
    }
    if (!hostel) {
      err("$.drm.enabled", "demand control requires the hostel template (office sections have no meters)");
    } else {
      for (const auto& unit : units) {
        auto it = flexible_per_unit.find(unit);
        if (it == flexible_per_unit.end() || it->second < 2) {
          err("$.appliances", "unit '" + unit + "' needs >= 2 flexible appliances for demand control");
        }
      }
    }
  }
  if (spec.impairment.command_latency_ms && *spec.impairment.command_latency_ms < 0) {
    err("$.impairment.command_latency_ms", "must be >= 0");
  }
  if (spec.impairment.command_loss_prob &&
      (*spec.impairment.command_loss_prob < 0.0 || *spec.impairment.command_loss_prob > 1.0)) {
    err("$.impairment.command_loss_prob", "must be in [0,1]");
  }

  if (spec.pricing.enabled) {
    const auto& p = spec.pricing.policy;
    if (p.kind == drm::PricingPolicy::Kind::Flat) {
      if (p.flat_price <= 0.0) err("$.pricing.price_sgd_per_kwh", "must be > 0");
    } else {
      if (p.day_price <= 0.0) err("$.pricing.day_price", "must be > 0");
      if (p.night_price <= 0.0) err("$.pricing.night_price", "must be > 0");
      if (p.day_start_min < 0 || p.day_end_min > 24 * 60 || p.day_start_min >= p.day_end_min) {
        err("$.pricing.day_start_min", "day window is inverted or out of range");
      }
    }
  }

  if (spec.scheduler.present) {
    const auto& inst = spec.scheduler.instance;
    if (inst.slot_prices.empty()) err("$.scheduler.slot_prices", "must not be empty");
    for (std::size_t i = 0; i < inst.slot_prices.size(); ++i) {
      if (inst.slot_prices[i] <= 0.0) {
        err("$.scheduler.slot_prices[" + std::to_string(i) + "]", "must be > 0");
      }
    }
    std::set<std::string> room_ids;
    for (std::size_t i = 0; i < inst.rooms.size(); ++i) {
      const std::string p = "$.scheduler.rooms[" + std::to_string(i) + "]";
      if (!room_ids.insert(inst.rooms[i].id).second) err(p + ".id", "duplicate room id");
      if (inst.rooms[i].capacity < 1) err(p + ".capacity", "must be >= 1");
      if (inst.rooms[i].active_power_kw <= 0.0) err(p + ".active_power_kw", "must be > 0");
      if (inst.rooms[i].slot_length_min <= 0) err("$.scheduler.slot_length_min", "must be > 0");
    }
    std::set<std::string> request_ids;
    for (std::size_t i = 0; i < inst.requests.size(); ++i) {
      const auto& r = inst.requests[i];
      const std::string p = "$.scheduler.requests[" + std::to_string(i) + "]";
      if (!request_ids.insert(r.id).second) err(p + ".id", "duplicate request id");
      if (r.duration_slots < 1) err(p + ".duration_slots", "must be >= 1");
      if (r.attendees < 1) err(p + ".attendees", "must be >= 1");
      if (r.earliest_slot < 0) err(p + ".earliest_slot", "must be >= 0");
      if (r.latest_slot >= inst.slots()) err(p + ".latest_slot", "exceeds the slot count");
    }
  }

  if (spec.analytics.idle_window_s <= 0) err("$.analytics.idle_window_s", "must be > 0");
  if (spec.analytics.tariff_sgd_per_kwh <= 0.0) err("$.analytics.tariff_sgd_per_kwh", "must be > 0");
  if (spec.analytics.extrapolation_room_count < 0) {
    err("$.analytics.extrapolation_room_count", "must be >= 0");
  }
  if (spec.analytics.path_stats_samples < 1) err("$.analytics.path_stats_samples", "must be >= 1");

  for (const auto& [path, value] : std::initializer_list<std::pair<const char*, const std::string*>>{
           {"$.output.trace", &spec.output.trace},
           {"$.output.report", &spec.output.report},
           {"$.output.demand_csv", &spec.output.demand_csv},
           {"$.output.wastage_csv", &spec.output.wastage_csv}}) {
    if (value->empty()) err(path, "must not be empty");
  }
  return errors;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  json j;
  j["schema_version"] = spec.schema_version;
  j["name"] = spec.name;
  j["horizon_ms"] = spec.horizon_ms;
  j["seed"] = spec.seed;

  json topo;
  topo["template"] =
      spec.topology.tmpl == TopologySection::Template::Hostel ? "hostel" : "office_section";
  if (spec.topology.units > 0) topo["units"] = spec.topology.units;
  if (spec.topology.rooms > 0) topo["rooms"] = spec.topology.rooms;
  if (!spec.topology.link_overrides.empty()) {
    json arr = json::array();
    for (const auto& o : spec.topology.link_overrides) {
      json e;
      e["kind"] = net::to_string(o.kind);
      if (o.base_latency_ms) e["base_latency_ms"] = *o.base_latency_ms;
      if (o.jitter_ms) e["jitter_ms"] = *o.jitter_ms;
      if (o.loss_prob) e["loss_prob"] = *o.loss_prob;
      arr.push_back(std::move(e));
    }
    topo["link_overrides"] = std::move(arr);
  }
  if (!spec.topology.congestion.empty()) {
    json arr = json::array();
    for (const auto& c : spec.topology.congestion) {
      arr.push_back({{"kind", net::to_string(c.kind)},
                     {"from_ms", c.window.from},
                     {"to_ms", c.window.to},
                     {"loss_multiplier", c.loss_multiplier},
                     {"latency_multiplier", c.latency_multiplier}});
    }
    topo["congestion"] = std::move(arr);
  }
  j["topology"] = std::move(topo);

  json base;
  switch (spec.base_load.kind) {
    case BaseLoadSection::Kind::None: base["kind"] = "none"; break;
    case BaseLoadSection::Kind::Flat: base["kind"] = "flat"; break;
    case BaseLoadSection::Kind::Nems: base["kind"] = "nems"; break;
  }
  base["peak_kw"] = spec.base_load.peak_kw;
  base["kw_per_unit"] = spec.base_load.kw_per_unit;
  base["resolution_s"] = spec.base_load.resolution_s;
  j["base_load"] = std::move(base);

  json appliances = json::array();
  for (const auto& a : spec.appliances) {
    json e;
    e["unit"] = a.unit;
    e["id"] = a.id;
    e["label"] = premises::to_string(a.label);
    e["rated_power_w"] = a.rated_power_w;
    e["flexible"] = a.flexible;
    e["inconvenience_weight"] = a.inconvenience_weight;
    e["initially_on"] = a.initially_on;
    if (!a.signature.empty()) {
      json sig = json::array();
      for (const auto& phase : a.signature) {
        sig.push_back({{"duration_s", phase.duration_s}, {"power_w", phase.power_w}});
      }
      e["signature"] = std::move(sig);
    }
    if (!a.on_intervals.empty()) {
      json ivs = json::array();
      for (const auto& iv : a.on_intervals) {
        ivs.push_back({{"from_ms", iv.from}, {"to_ms", iv.to}});
      }
      e["on_intervals"] = std::move(ivs);
    }
    appliances.push_back(std::move(e));
  }
  j["appliances"] = std::move(appliances);

  json occupancy = json::array();
  for (const auto& occ : spec.occupancy) {
    json ivs = json::array();
    for (const auto& iv : occ.intervals) {
      ivs.push_back({{"from_ms", iv.from}, {"to_ms", iv.to}, {"occupied", iv.occupied}});
    }
    occupancy.push_back({{"unit", occ.unit}, {"intervals", std::move(ivs)}});
  }
  j["occupancy"] = std::move(occupancy);

  auto gauss = [](const premises::GaussSpec& g) {
    return json{{"mean", g.mean}, {"stddev", g.stddev}};
  };
  j["sensors"] = {{"period_s", spec.sensors.period_s},
                  {"p_motion_when_occupied", spec.sensors.p_motion_when_occupied},
                  {"noise_occupied_db", gauss(spec.sensors.noise_occupied)},
                  {"noise_unoccupied_db", gauss(spec.sensors.noise_unoccupied)},
                  {"temp_c", gauss(spec.sensors.temp_c)},
                  {"humidity_pct", gauss(spec.sensors.humidity_pct)},
                  {"lux_occupied", gauss(spec.sensors.lux_occupied)},
                  {"lux_unoccupied", gauss(spec.sensors.lux_unoccupied)}};

  if (spec.drm.enabled || spec.drm.threshold_kw > 0.0) {
    j["drm"] = {{"enabled", spec.drm.enabled},
                {"threshold_kw", spec.drm.threshold_kw},
                {"control_period_s", spec.drm.control_period_s},
                {"meter_report_period_s", spec.drm.meter_report_period_s},
                {"control_phase_ms", spec.drm.control_phase_ms},
                {"restore_hysteresis_kw", spec.drm.restore_hysteresis_kw}};
  }
  {
    json imp = json::object();
    if (spec.impairment.command_latency_ms) imp["command_latency_ms"] = *spec.impairment.command_latency_ms;
    if (spec.impairment.command_loss_prob) imp["command_loss_prob"] = *spec.impairment.command_loss_prob;
    if (!imp.empty()) j["impairment"] = std::move(imp);
  }
  if (spec.pricing.enabled) {
    json p;
    if (spec.pricing.policy.kind == drm::PricingPolicy::Kind::Flat) {
      p["kind"] = "flat";
      p["price_sgd_per_kwh"] = spec.pricing.policy.flat_price;
    } else {
      p["kind"] = "two_tier";
      p["day_price"] = spec.pricing.policy.day_price;
      p["night_price"] = spec.pricing.policy.night_price;
      p["day_start_min"] = spec.pricing.policy.day_start_min;
      p["day_end_min"] = spec.pricing.policy.day_end_min;
    }
    j["pricing"] = std::move(p);
  }
  if (spec.scheduler.present) {
    const auto& inst = spec.scheduler.instance;
    json s;
    s["slot_length_min"] = inst.rooms.empty() ? 60 : inst.rooms.front().slot_length_min;
    s["slot_prices"] = inst.slot_prices;
    s["objective"] = inst.objective == sched::ScheduleObjective::Cost ? "cost" : "energy";
    json rooms = json::array();
    for (const auto& r : inst.rooms) {
      rooms.push_back(
          {{"id", r.id}, {"capacity", r.capacity}, {"active_power_kw", r.active_power_kw}});
    }
    s["rooms"] = std::move(rooms);
    json requests = json::array();
    for (const auto& r : inst.requests) {
      requests.push_back({{"id", r.id},
                          {"duration_slots", r.duration_slots},
                          {"earliest_slot", r.earliest_slot},
                          {"latest_slot", r.latest_slot},
                          {"attendees", r.attendees}});
    }
    s["requests"] = std::move(requests);
    j["scheduler"] = std::move(s);
  }
  {
    json a;
    a["idle_window_s"] = spec.analytics.idle_window_s;
    if (spec.analytics.noise_threshold_db) a["noise_threshold_db"] = *spec.analytics.noise_threshold_db;
    a["tariff_sgd_per_kwh"] = spec.analytics.tariff_sgd_per_kwh;
    a["extrapolation_room_count"] = spec.analytics.extrapolation_room_count;
    a["path_stats_samples"] = spec.analytics.path_stats_samples;
    j["analytics"] = std::move(a);
  }
  {
    json o;
    o["trace"] = spec.output.trace;
    o["report"] = spec.output.report;
    o["demand_csv"] = spec.output.demand_csv;
    o["wastage_csv"] = spec.output.wastage_csv;
    json cats = json::array();
    for (const auto cat : spec.output.categories) cats.push_back(to_string(cat));
    o["categories"] = std::move(cats);
    j["output"] = std::move(o);
  }
  return j.dump();
}

}  // namespace gridbed::scenario
