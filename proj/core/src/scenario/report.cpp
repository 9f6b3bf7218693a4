#include "gridbed/scenario/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "gridbed/analytics/impairment.hpp"
#include "gridbed/analytics/occupancy.hpp"
#include "gridbed/analytics/wastage.hpp"
#include "gridbed/net/transport.hpp"
#include "gridbed/run/runner.hpp"
#include "gridbed/sched/scheduler.hpp"

namespace gridbed::scenario {

using json = nlohmann::ordered_json;

namespace {

std::string csv_number(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

struct CommandRecord {
  std::string appliance;
  drm::CommandAction action = drm::CommandAction::SwitchOff;
  sim::SimTime issued_at = 0;
  std::optional<sim::SimTime> applied_at;
  bool lost = false;
};

struct Excursion {
  sim::SimTime onset = 0;
  sim::SimTime end = 0;
  double uncontrolled_above_s = 0.0;
  double controlled_above_s = 0.0;
  sim::SimTime max_above_offset_ms = 0;
};

std::vector<Excursion> find_excursions(const std::vector<analytics::DemandSample>& demand,
                                       double threshold_kw, sim::SimTime horizon_ms) {
  std::vector<Excursion> out;
  bool inside = false;
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const sim::SimTime step_end = i + 1 < demand.size() ? demand[i + 1].at : horizon_ms;
    const double dt_s = static_cast<double>(step_end - demand[i].at) / 1000.0;
    const bool above = demand[i].uncontrolled_kw > threshold_kw;
    if (above && !inside) {
      out.push_back({demand[i].at, step_end, 0.0, 0.0, 0});
      inside = true;
    }
    if (inside && above) {
      auto& ex = out.back();
      ex.end = step_end;
      ex.uncontrolled_above_s += dt_s;
      if (demand[i].true_kw > threshold_kw) {
        ex.controlled_above_s += dt_s;
        ex.max_above_offset_ms = std::max(ex.max_above_offset_ms, step_end - ex.onset);
      }
    }
    if (!above) inside = false;
  }
  return out;
}

}  // namespace

ReportBundle build_report(const ScenarioSpec& spec, const std::vector<TraceLine>& lines,
                          const RunInfo& run, std::uint64_t trace_hash) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = {{"name", spec.name},
                   {"seed", spec.seed},
                   {"horizon_ms", spec.horizon_ms},
                   {"template", spec.topology.tmpl == TopologySection::Template::Hostel
                                    ? "hostel"
                                    : "office_section"}};
  j["run"] = {{"events_processed", run.events_processed},
              {"final_time_ms", run.final_time},
              {"trace_hash", hash_hex(trace_hash)},
              {"trace_lines", lines.size()}};

  // Flat topology echo for scenario debugging.
  const auto topology = gridbed::run::build_topology_from_scenario(spec);
  {
    json nodes = json::array();
    for (const auto& node : topology.nodes()) {
      json links = json::array();
      for (const auto& link : topology.links()) {
        if (link.a == node.id) links.push_back({link.b, net::to_string(link.kind)});
        if (link.b == node.id) links.push_back({link.a, net::to_string(link.kind)});
      }
      nodes.push_back({{"id", node.id}, {"kind", net::to_string(node.kind)}, {"links", links}});
    }
    j["topology"] = std::move(nodes);
  }

  // Steady-state path statistics from the scenario seed only, so an offline
  // rebuild sees identical numbers.
  const auto units = spec.unit_ids();
  std::vector<std::pair<std::string, std::pair<net::NodeId, net::NodeId>>> probe_paths;
  const bool hostel = spec.topology.tmpl == TopologySection::Template::Hostel;
  if (!units.empty()) {
    if (hostel) {
      probe_paths.push_back({"metering_uplink", {net::meter_node(units.front()), net::kCloudNode}});
    }
    probe_paths.push_back({"sensor_uplink", {net::mpn_node(units.front(), 1), net::kCloudNode}});
    for (const auto& a : spec.appliances) {
      if (a.flexible) {
        probe_paths.push_back({"command_path", {net::kCloudNode, net::plug_node(a.unit, a.id)}});
        break;
      }
    }
  }
  double command_path_p95 = -1.0;
  {
    sim::Engine engine(spec.seed);
    net::Transport transport(topology, engine);
    json paths = json::array();
    for (const auto& [label, endpoints] : probe_paths) {
      const auto stats = transport.path_latency_stats(endpoints.first, endpoints.second,
                                                      spec.analytics.path_stats_samples);
      if (label == "command_path") command_path_p95 = stats.p95_ms;
      paths.push_back({{"label", label},
                       {"src", endpoints.first},
                       {"dst", endpoints.second},
                       {"mean_ms", stats.mean_ms},
                       {"p95_ms", stats.p95_ms},
                       {"loss_rate", stats.loss_rate}});
    }
    json transport_section;
    transport_section["paths"] = std::move(paths);
    if (spec.output.categories.contains(TraceCategory::Message)) {
      std::uint64_t delivered = 0, lost = 0, bytes = 0;
      for (const auto& line : lines) {
        if (const auto* msg = std::get_if<MessageLine>(&line.payload)) {
          if (msg->phase == MessageLine::Phase::Delivered) {
            ++delivered;
            bytes += static_cast<std::uint64_t>(msg->size_bytes);
          } else {
            ++lost;
          }
        }
      }
      transport_section["messages"] = {
          {"delivered", delivered}, {"lost", lost}, {"bytes_delivered", bytes}};
    }
    j["transport"] = std::move(transport_section);
  }

  // Demand series, command outcomes, impairment metrics.
  std::vector<analytics::DemandSample> demand;
  std::map<std::uint64_t, CommandRecord> commands;
  for (const auto& line : lines) {
    if (const auto* d = std::get_if<DemandLine>(&line.payload)) {
      demand.push_back({line.at, d->base_kw, d->uncontrolled_kw, d->true_kw, d->perceived_kw});
    } else if (const auto* c = std::get_if<CommandLine>(&line.payload)) {
      auto& record = commands[c->command_id];
      record.appliance = c->appliance;
      record.action = c->action;
      record.issued_at = c->issued_at;
      if (c->phase == CommandLine::Phase::Applied) record.applied_at = c->applied_at;
      if (c->phase == CommandLine::Phase::Lost) record.lost = true;
    }
  }
  std::vector<analytics::CommandOutcome> outcomes;
  for (const auto& [id, record] : commands) {
    (void)id;
    outcomes.push_back({record.issued_at, record.applied_at});
  }

  if (!demand.empty()) {
    const double threshold =
        spec.drm.enabled ? spec.drm.threshold_kw : std::numeric_limits<double>::infinity();
    const auto impairment =
        analytics::impairment_report(demand, outcomes, threshold, spec.horizon_ms);
    double peak_controlled = 0.0, peak_uncontrolled = 0.0;
    for (const auto& d : demand) {
      peak_controlled = std::max(peak_controlled, d.true_kw);
      peak_uncontrolled = std::max(peak_uncontrolled, d.uncontrolled_kw);
    }
    json demand_section;
    if (spec.drm.enabled) demand_section["threshold_kw"] = spec.drm.threshold_kw;
    demand_section["peak_controlled_kw"] = peak_controlled;
    demand_section["peak_uncontrolled_kw"] = peak_uncontrolled;
    demand_section["samples"] = demand.size();
    if (spec.drm.enabled) {
      json excursions = json::array();
      for (const auto& ex : find_excursions(demand, spec.drm.threshold_kw, spec.horizon_ms)) {
        excursions.push_back({{"onset_ms", ex.onset},
                              {"end_ms", ex.end},
                              {"uncontrolled_above_s", ex.uncontrolled_above_s},
                              {"controlled_above_s", ex.controlled_above_s},
                              {"max_above_offset_ms", ex.max_above_offset_ms}});
      }
      demand_section["excursions"] = std::move(excursions);
    }
    j["demand"] = std::move(demand_section);
    j["impairment"] = {{"time_above_threshold_s", impairment.time_above_threshold_s},
                       {"overshoot_kwh", impairment.overshoot_kwh},
                       {"commands_sent", impairment.commands_sent},
                       {"commands_lost", impairment.commands_lost},
                       {"mean_command_latency_ms", impairment.mean_command_latency_ms},
                       {"p95_command_latency_ms", impairment.p95_command_latency_ms}};

    // Reserve suitability from measured actuations when the run issued
    // commands, otherwise from the command path estimate.
    double p95 = impairment.p95_command_latency_ms;
    std::string source = "measured";
    if (impairment.commands_sent == 0 || impairment.commands_sent == impairment.commands_lost) {
      p95 = command_path_p95;
      source = "path_estimate";
    }
    if (p95 >= 0.0) {
      j["reserve"] = {{"p95_actuation_ms", p95},
                      {"source", source},
                      {"class", drm::to_string(drm::classify_reserve(p95))}};
    }
  }

  {
    json prices = json::array();
    for (const auto& line : lines) {
      if (const auto* p = std::get_if<PriceLine>(&line.payload)) {
        prices.push_back({{"at_ms", line.at}, {"price_sgd_per_kwh", p->price_sgd_per_kwh}});
      }
    }
    j["prices"] = std::move(prices);
  }

  // Wastage accounting against ground-truth occupancy, with the detector's
  // view alongside when sensor lines are available.
  std::string wastage_csv = "room,lights_kwh,acs_kwh,total_kwh,sgd\n";
  if (!spec.occupancy.empty()) {
    const auto on_intervals = gridbed::run::reconstruct_appliance_intervals(spec, lines);
    auto rooms_for = [&](auto&& occupancy_of) {
      std::vector<analytics::RoomUsage> rooms;
      for (const auto& occ : spec.occupancy) {
        analytics::RoomUsage room;
        room.room_id = occ.unit;
        room.occupancy = occupancy_of(occ);
        for (const auto& a : spec.appliances) {
          if (a.unit != occ.unit) continue;
          if (a.label != premises::ApplianceLabel::Light && a.label != premises::ApplianceLabel::ACS) {
            continue;
          }
          analytics::ApplianceUsage usage;
          usage.appliance = gridbed::run::to_appliance(a);
          if (auto it = on_intervals.find(a.id); it != on_intervals.end()) {
            usage.on_intervals = it->second;
          }
          room.appliances.push_back(std::move(usage));
        }
        rooms.push_back(std::move(room));
      }
      return rooms;
    };

    const auto ground_rooms = rooms_for([&](const OccupancySpec& occ) {
      premises::OccupancyTrace trace;
      trace.intervals = occ.intervals;
      return trace;
    });
    const auto result =
        analytics::compute_wastage(ground_rooms, sim::TimeInterval{0, spec.horizon_ms});

    json wastage;
    json rooms = json::array();
    for (const auto& record : result.records) {
      const double total = record.lights_kwh + record.acs_kwh;
      rooms.push_back({{"room", record.room_id},
                       {"lights_kwh", record.lights_kwh},
                       {"acs_kwh", record.acs_kwh},
                       {"total_kwh", total},
                       {"sgd", total * spec.analytics.tariff_sgd_per_kwh}});
      wastage_csv += record.room_id + "," + csv_number(record.lights_kwh) + "," +
                     csv_number(record.acs_kwh) + "," + csv_number(total) + "," +
                     csv_number(total * spec.analytics.tariff_sgd_per_kwh) + "\n";
    }
    wastage["rooms"] = std::move(rooms);
    wastage["mean_lights_kwh"] = result.aggregate.mean_lights_kwh;
    wastage["mean_acs_kwh"] = result.aggregate.mean_acs_kwh;
    wastage["total_kwh"] = result.aggregate.total_kwh;
    if (spec.analytics.extrapolation_room_count > 0) {
      const auto [total_kwh, total_sgd] = analytics::extrapolate_campus_wastage(
          result.aggregate.mean_lights_kwh, result.aggregate.mean_acs_kwh,
          spec.analytics.extrapolation_room_count, spec.analytics.tariff_sgd_per_kwh);
      wastage["extrapolated"] = {{"room_count", spec.analytics.extrapolation_room_count},
                                 {"tariff_sgd_per_kwh", spec.analytics.tariff_sgd_per_kwh},
                                 {"total_kwh", total_kwh},
                                 {"total_sgd", total_sgd}};
    }

    std::map<std::string, std::vector<premises::SensorSample>> samples_by_unit;
    for (const auto& line : lines) {
      if (const auto* s = std::get_if<SensorLine>(&line.payload)) {
        samples_by_unit[s->unit].push_back({s->mpn, line.at, s->motion, s->noise_db, s->temp_c,
                                            s->humidity_pct, s->lux});
      }
    }
    if (!samples_by_unit.empty()) {
      const auto detector_rooms = rooms_for([&](const OccupancySpec& occ) {
        auto it = samples_by_unit.find(occ.unit);
        if (it == samples_by_unit.end()) {
          return premises::OccupancyTrace::always(true, spec.horizon_ms);
        }
        return analytics::infer_occupancy(it->second, spec.analytics.idle_window_s,
                                          spec.noise_threshold_db(), 0, spec.horizon_ms);
      });
      const auto detector =
          analytics::compute_wastage(detector_rooms, sim::TimeInterval{0, spec.horizon_ms});
      wastage["detector_view"] = {{"mean_lights_kwh", detector.aggregate.mean_lights_kwh},
                                  {"mean_acs_kwh", detector.aggregate.mean_acs_kwh},
                                  {"total_kwh", detector.aggregate.total_kwh},
                                  {"idle_window_s", spec.analytics.idle_window_s},
                                  {"noise_threshold_db", spec.noise_threshold_db()}};
    }
    j["wastage"] = std::move(wastage);
  }

  if (spec.scheduler.present) {
    const auto& instance = spec.scheduler.instance;
    json section;
    std::optional<sched::ScheduleAssignment> solution;
    if (sched::within_exact_bounds(instance)) {
      section["method"] = "exact";
      solution = sched::solve_exact(instance);
    } else {
      section["method"] = "heuristic";
      auto heuristic = sched::solve_heuristic(instance);
      if (heuristic.unplaced.empty()) {
        solution = std::move(heuristic);
      } else {
        section["unplaced"] = heuristic.unplaced;
      }
    }
    if (solution) {
      section["status"] = "feasible";
      json placements = json::array();
      for (const auto& p : solution->placements) {
        placements.push_back(
            {{"request", p.request_id}, {"room", p.room_id}, {"start_slot", p.start_slot}});
      }
      section["assignments"] = std::move(placements);
      section["objective_sgd"] = solution->objective_sgd;
    } else {
      section["status"] = "infeasible";
    }
    j["scheduler"] = std::move(section);
  }

  std::string demand_csv = "at_ms,base_kw,uncontrolled_kw,controlled_kw,perceived_kw,threshold_kw\n";
  for (const auto& sample : demand) {
    demand_csv += std::to_string(sample.at) + "," + csv_number(sample.base_kw) + "," +
                  csv_number(sample.uncontrolled_kw) + "," + csv_number(sample.true_kw) + ",";
    demand_csv += sample.perceived_kw ? csv_number(*sample.perceived_kw) : std::string();
    demand_csv += ",";
    demand_csv += spec.drm.enabled ? csv_number(spec.drm.threshold_kw) : std::string();
    demand_csv += "\n";
  }

  ReportBundle bundle;
  bundle.report_json = j.dump(2) + "\n";
  bundle.demand_csv = std::move(demand_csv);
  bundle.wastage_csv = std::move(wastage_csv);
  return bundle;
}

}  // namespace gridbed::scenario
