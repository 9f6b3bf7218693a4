#include "gridbed/run/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "gridbed/drm/controller.hpp"
#include "gridbed/net/transport.hpp"
#include "gridbed/premises/nems.hpp"
#include "gridbed/premises/sensors.hpp"

namespace gridbed::run {

using scenario::ScenarioSpec;

namespace {

constexpr int kMeterReadingBytes = 64;
constexpr int kSensorSampleBytes = 48;
constexpr int kControlCommandBytes = 16;
constexpr int kPriceSignalBytes = 16;
constexpr int kAckBytes = 8;

std::map<net::LinkKind, net::LinkParams> effective_link_params(const ScenarioSpec& spec) {
  auto params = net::default_link_params();
  for (const auto& o : spec.topology.link_overrides) {
    auto& p = params[o.kind];
    if (o.base_latency_ms) p.base_latency_ms = *o.base_latency_ms;
    if (o.jitter_ms) p.jitter_ms = *o.jitter_ms;
    if (o.loss_prob) p.loss_prob = *o.loss_prob;
  }
  // Command-path shorthand: the plug links carry the actuation commands.
  if (spec.impairment.command_latency_ms) {
    params[net::LinkKind::ZWave].base_latency_ms =
        static_cast<int>(*spec.impairment.command_latency_ms);
  }
  if (spec.impairment.command_loss_prob) {
    params[net::LinkKind::ZWave].loss_prob = *spec.impairment.command_loss_prob;
  }
  return params;
}

}  // namespace

net::Topology build_topology_from_scenario(const ScenarioSpec& spec) {
  const auto params = effective_link_params(spec);
  std::map<std::string, std::vector<std::string>> plugs;
  for (const auto& unit : spec.unit_ids()) plugs[unit] = {};
  for (const auto& a : spec.appliances) plugs[a.unit].push_back(a.id);

  net::Topology topology;
  if (spec.topology.tmpl == scenario::TopologySection::Template::Hostel) {
    net::HostelTemplate tmpl;
    tmpl.units = spec.topology.units;
    tmpl.plugs_by_unit = std::move(plugs);
    tmpl.params = params;
    topology = net::build_hostel_topology(tmpl);
  } else {
    net::OfficeTemplate tmpl;
    tmpl.rooms = spec.topology.rooms;
    tmpl.plugs_by_room = std::move(plugs);
    tmpl.params = params;
    topology = net::build_office_topology(tmpl);
  }
  return topology;
}

premises::Appliance to_appliance(const scenario::ApplianceSpec& spec) {
  premises::Appliance a;
  a.id = spec.id;
  a.label = spec.label;
  a.rated_power_w = spec.rated_power_w;
  a.flexible = spec.flexible;
  a.inconvenience_weight = spec.inconvenience_weight;
  a.signature = spec.signature;
  a.on = spec.initially_on;
  a.switched_on_at = 0;
  return a;
}

std::vector<premises::Unit> build_units(const ScenarioSpec& spec, sim::RngRegistry& rng) {
  const auto ids = spec.unit_ids();
  std::vector<premises::Unit> units(ids.size());

  std::vector<premises::LoadProfile> bases;
  switch (spec.base_load.kind) {
    case scenario::BaseLoadSection::Kind::Nems:
      bases = premises::synthesize_nems_base(static_cast<int>(ids.size()), spec.base_load.peak_kw,
                                             spec.base_load.resolution_s, spec.horizon_ms,
                                             rng.register_stream("nems"));
      break;
    case scenario::BaseLoadSection::Kind::Flat:
      bases.assign(ids.size(),
                   premises::LoadProfile::flat(spec.base_load.kw_per_unit, spec.horizon_ms));
      break;
    case scenario::BaseLoadSection::Kind::None:
      bases.assign(ids.size(), premises::LoadProfile{});
      break;
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    units[i].id = ids[i];
    units[i].kind = spec.topology.tmpl == scenario::TopologySection::Template::Hostel
                        ? premises::UnitKind::Hostel
                        : premises::UnitKind::Office;
    units[i].base_profile = bases[i];
    units[i].occupancy = premises::OccupancyTrace::always(true, spec.horizon_ms);
  }
  for (const auto& occ : spec.occupancy) {
    for (auto& unit : units) {
      if (unit.id == occ.unit) unit.occupancy.intervals = occ.intervals;
    }
  }
  for (const auto& a : spec.appliances) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == a.unit) units[i].appliances.push_back(to_appliance(a));
    }
  }
  return units;
}

std::map<std::string, std::vector<sim::TimeInterval>> reconstruct_appliance_intervals(
    const ScenarioSpec& spec, const std::vector<scenario::TraceLine>& lines) {
  struct Edge {
    sim::SimTime at;
    int rank;  // script edges fire before command applies at the same instant
    std::uint64_t order;
    std::string appliance;
    bool on;
  };
  std::vector<Edge> edges;
  std::uint64_t counter = 0;
  for (const auto& a : spec.appliances) {
    if (a.initially_on) edges.push_back({0, 0, counter++, a.id, true});
  }
  for (const auto& a : spec.appliances) {
    for (const auto& iv : a.on_intervals) {
      edges.push_back({iv.from, 0, counter++, a.id, true});
      edges.push_back({iv.to, 0, counter++, a.id, false});
    }
  }
  for (const auto& line : lines) {
    if (const auto* cmd = std::get_if<scenario::CommandLine>(&line.payload)) {
      if (cmd->phase != scenario::CommandLine::Phase::Applied) continue;
      edges.push_back({line.at, 1, line.seq, cmd->appliance,
                       cmd->action == drm::CommandAction::SwitchOn});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.at != b.at) return a.at < b.at;
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.order < b.order;
  });

  std::map<std::string, std::vector<sim::TimeInterval>> intervals;
  std::map<std::string, sim::SimTime> on_since;
  for (const auto& edge : edges) {
    const bool is_on = on_since.contains(edge.appliance);
    if (edge.on && !is_on) {
      on_since[edge.appliance] = edge.at;
    } else if (!edge.on && is_on) {
      intervals[edge.appliance].push_back({on_since[edge.appliance], edge.at});
      on_since.erase(edge.appliance);
    }
  }
  for (const auto& [id, since] : on_since) intervals[id].push_back({since, spec.horizon_ms});
  return intervals;
}

namespace {

// Owns all live simulation state; everything is mutated from kernel event
// dispatch only.
class Simulation {
 public:
  Simulation(const ScenarioSpec& spec, const std::string& trace_path)
      : spec_(spec),
        engine_(spec.seed),
        topology_(build_topology_from_scenario(spec)),
        transport_(topology_, engine_),
        writer_(spec, trace_path) {
    const auto errors = topology_.validate();
    if (!errors.empty()) throw scenario::ScenarioError("topology: " + errors.front());

    units_ = build_units(spec_, engine_.rng());
    script_units_ = units_;
    for (std::size_t u = 0; u < units_.size(); ++u) {
      for (std::size_t a = 0; a < units_[u].appliances.size(); ++a) {
        appliance_at_[units_[u].appliances[a].id] = {u, a};
      }
    }

    if (spec_.drm.enabled) {
      std::vector<drm::ControllerAppliance> registry;
      for (const auto& a : spec_.appliances) {
        registry.push_back(
            {a.id, a.unit, a.rated_power_w / 1000.0, a.inconvenience_weight, a.flexible});
      }
      drm::DrmPolicy policy{spec_.drm.threshold_kw, spec_.drm.control_period_s,
                            spec_.drm.restore_hysteresis_kw};
      controller_.emplace(policy, std::move(registry));
    }

    schedule_script_events();
    schedule_demand_sampler();
    schedule_meters();
    schedule_sensors();
    schedule_controller();
    schedule_prices();
  }

  scenario::RunInfo execute() {
    const auto summary = engine_.run_until(spec_.horizon_ms);
    scenario::RunInfo info{summary.events_processed, summary.final_time};
    writer_.finish(info);
    return info;
  }

  scenario::TraceWriter& writer() { return writer_; }

 private:
  struct ApplianceRef {
    std::size_t unit;
    std::size_t index;
  };

  premises::Appliance& live(const std::string& id) {
    const auto ref = appliance_at_.at(id);
    return units_[ref.unit].appliances[ref.index];
  }

  void set_state(premises::Appliance& appliance, bool on, sim::SimTime at) {
    if (on && !appliance.on) {
      appliance.on = true;
      appliance.switched_on_at = at;
    } else if (!on && appliance.on) {
      appliance.on = false;
    }
  }

  void schedule_script_events() {
    for (const auto& spec_appliance : spec_.appliances) {
      for (const auto& iv : spec_appliance.on_intervals) {
        const std::string id = spec_appliance.id;
        engine_.schedule(iv.from, sim::EventKind::LoadChange,
                         [this, id](sim::Engine&) { apply_script(id, true); });
        engine_.schedule(iv.to, sim::EventKind::LoadChange,
                         [this, id](sim::Engine&) { apply_script(id, false); });
      }
    }
  }

  void apply_script(const std::string& id, bool on) {
    const auto ref = appliance_at_.at(id);
    set_state(units_[ref.unit].appliances[ref.index], on, engine_.now());
    set_state(script_units_[ref.unit].appliances[ref.index], on, engine_.now());
    mark_demand_dirty();
  }

  double base_kw(sim::SimTime at) const {
    double kw = 0.0;
    for (const auto& unit : units_) {
      if (!unit.base_profile.values_kw.empty()) kw += unit.base_profile.at(at);
    }
    return kw;
  }

  void emit_demand_line() {
    const sim::SimTime at = engine_.now();
    scenario::DemandLine line;
    line.base_kw = base_kw(at);
    line.true_kw = premises::total_demand(units_, at);
    line.uncontrolled_kw = premises::total_demand(script_units_, at);
    if (controller_ && controller_->has_readings()) line.perceived_kw = controller_->perceived_kw();
    writer_.emit({at, 0, line});
  }

  // Collapses any burst of same-instant state changes into one sample.
  void mark_demand_dirty() {
    if (demand_flush_pending_) return;
    demand_flush_pending_ = true;
    engine_.schedule(engine_.now(), sim::EventKind::LoadChange, [this](sim::Engine&) {
      demand_flush_pending_ = false;
      emit_demand_line();
    });
  }

  void schedule_demand_sampler() {
    // Metered premises sample at the reporting cadence whether or not the
    // controller is on, so controlled and uncontrolled runs line up sample
    // for sample. Unmetered office sections get an hourly series; state
    // changes still force exact extra samples either way.
    const bool hostel = spec_.topology.tmpl == scenario::TopologySection::Template::Hostel;
    sampler_period_ms_ =
        hostel ? sim::seconds(spec_.drm.meter_report_period_s) : sim::kMsPerHour;
    engine_.schedule(0, sim::EventKind::LoadChange, [this](sim::Engine& eng) { sampler_tick(eng); });
  }

  void sampler_tick(sim::Engine& eng) {
    emit_demand_line();
    const sim::SimTime next = eng.now() + sampler_period_ms_;
    if (next < spec_.horizon_ms) {
      eng.schedule(next, sim::EventKind::LoadChange, [this](sim::Engine& e) { sampler_tick(e); });
    }
  }

  void schedule_meters() {
    if (spec_.topology.tmpl != scenario::TopologySection::Template::Hostel) return;
    for (std::size_t u = 0; u < units_.size(); ++u) {
      engine_.schedule(0, sim::EventKind::SensorTick,
                       [this, u](sim::Engine& eng) { meter_tick(eng, u); });
    }
  }

  void meter_tick(sim::Engine& eng, std::size_t unit_index) {
    const auto& unit = units_[unit_index];
    const sim::SimTime at = eng.now();
    drm::MeterReading reading;
    reading.unit = unit.id;
    reading.measured_at = at;
    reading.total_kw = premises::total_demand(std::span(&unit, 1), at);
    for (const auto& appliance : unit.appliances) {
      reading.appliance_states[appliance.id] = appliance.is_drawing_capable_at(at);
    }

    net::Message msg;
    msg.id = next_message_id_++;
    msg.src = net::meter_node(unit.id);
    msg.dst = net::kCloudNode;
    msg.kind = net::MessageKind::MeterReading;
    msg.size_bytes = kMeterReadingBytes;
    msg.created_at = at;
    transport_.send(
        msg,
        [this, reading](sim::Engine&, const net::Message& delivered) {
          if (controller_) controller_->on_reading(reading);
          log_message(delivered);
        },
        [this](sim::Engine&, const net::Message& lost, const net::NodeId& hop) {
          log_message_lost(lost, hop);
        });

    const sim::SimTime next = at + sim::seconds(spec_.drm.meter_report_period_s);
    if (next < spec_.horizon_ms) {
      eng.schedule(next, sim::EventKind::SensorTick,
                   [this, unit_index](sim::Engine& e) { meter_tick(e, unit_index); });
    }
  }

  void schedule_sensors() {
    const int mpns = spec_.topology.tmpl == scenario::TopologySection::Template::Hostel ? 4 : 1;
    for (std::size_t u = 0; u < units_.size(); ++u) {
      for (int m = 1; m <= mpns; ++m) {
        const std::string node = net::mpn_node(units_[u].id, m);
        engine_.rng().register_stream("sensor:" + node);
        engine_.schedule(0, sim::EventKind::SensorTick,
                         [this, u, node](sim::Engine& eng) { sensor_tick(eng, u, node); });
      }
    }
  }

  void sensor_tick(sim::Engine& eng, std::size_t unit_index, const std::string& node) {
    const sim::SimTime at = eng.now();
    const auto& unit = units_[unit_index];
    const bool occupied = unit.occupancy.occupied_at(at);
    const auto sample = premises::draw_sensor_sample(node, at, occupied, spec_.sensors,
                                                     eng.rng().stream("sensor:" + node));
    scenario::SensorLine line{node,           unit.id,       sample.motion, sample.noise_db,
                              sample.temp_c,  sample.humidity_pct, sample.lux};
    writer_.emit({at, 0, line});

    net::Message msg;
    msg.id = next_message_id_++;
    msg.src = node;
    msg.dst = net::kCloudNode;
    msg.kind = net::MessageKind::SensorSample;
    msg.size_bytes = kSensorSampleBytes;
    msg.created_at = at;
    transport_.send(
        msg, [this](sim::Engine&, const net::Message& delivered) { log_message(delivered); },
        [this](sim::Engine&, const net::Message& lost, const net::NodeId& hop) {
          log_message_lost(lost, hop);
        });

    const sim::SimTime next = at + sim::seconds(spec_.sensors.period_s);
    if (next < spec_.horizon_ms) {
      eng.schedule(next, sim::EventKind::SensorTick,
                   [this, unit_index, node](sim::Engine& e) { sensor_tick(e, unit_index, node); });
    }
  }

  void schedule_controller() {
    if (!controller_) return;
    engine_.schedule(spec_.drm.control_phase_ms, sim::EventKind::ControllerTick,
                     [this](sim::Engine& eng) { controller_tick(eng); });
  }

  void controller_tick(sim::Engine& eng) {
    const sim::SimTime at = eng.now();
    const auto result = controller_->tick(at);
    if (result.shed) {
      scenario::ShedLine line;
      line.action = result.shed->insufficient ? scenario::ShedLine::Action::Insufficient
                                              : scenario::ShedLine::Action::Shed;
      line.appliances = result.shed->appliance_ids;
      line.shed_kw = result.shed->shed_kw;
      line.required_kw = result.required_kw;
      line.total_inconvenience = result.shed->total_inconvenience;
      writer_.emit({at, 0, line});
    }
    if (result.restored) {
      scenario::ShedLine line;
      line.action = scenario::ShedLine::Action::Restore;
      line.appliances = {*result.restored};
      const auto& appliance = live(*result.restored);
      line.shed_kw = appliance.rated_power_w / 1000.0;
      writer_.emit({at, 0, line});
    }
    for (const auto& command : result.commands) send_command(command);

    const sim::SimTime next = at + sim::seconds(spec_.drm.control_period_s);
    if (next < spec_.horizon_ms) {
      eng.schedule(next, sim::EventKind::ControllerTick,
                   [this](sim::Engine& e) { controller_tick(e); });
    }
  }

  void send_command(const drm::ControlCommand& command) {
    const auto& appliance_spec = *std::find_if(
        spec_.appliances.begin(), spec_.appliances.end(),
        [&](const scenario::ApplianceSpec& a) { return a.id == command.appliance_id; });

    scenario::CommandLine issued;
    issued.phase = scenario::CommandLine::Phase::Issued;
    issued.command_id = command.id;
    issued.appliance = command.appliance_id;
    issued.action = command.action;
    issued.issued_at = command.issued_at;
    writer_.emit({command.issued_at, 0, issued});

    net::Message msg;
    msg.id = next_message_id_++;
    msg.src = net::kCloudNode;
    msg.dst = net::plug_node(appliance_spec.unit, command.appliance_id);
    msg.kind = net::MessageKind::ControlCommand;
    msg.size_bytes = kControlCommandBytes;
    msg.created_at = command.issued_at;
    transport_.send(
        msg,
        [this, command](sim::Engine& eng, const net::Message& delivered) {
          log_message(delivered);
          apply_command(eng, command);
        },
        [this, command](sim::Engine&, const net::Message& lost, const net::NodeId& hop) {
          log_message_lost(lost, hop);
          scenario::CommandLine line;
          line.phase = scenario::CommandLine::Phase::Lost;
          line.command_id = command.id;
          line.appliance = command.appliance_id;
          line.action = command.action;
          line.issued_at = command.issued_at;
          line.lost_hop = hop;
          writer_.emit({engine_.now(), 0, line});
        });
  }

  void apply_command(sim::Engine& eng, const drm::ControlCommand& command) {
    const sim::SimTime at = eng.now();
    set_state(live(command.appliance_id), command.action == drm::CommandAction::SwitchOn, at);
    mark_demand_dirty();

    scenario::CommandLine line;
    line.phase = scenario::CommandLine::Phase::Applied;
    line.command_id = command.id;
    line.appliance = command.appliance_id;
    line.action = command.action;
    line.issued_at = command.issued_at;
    line.applied_at = at;
    writer_.emit({at, 0, line});

    // Plug acknowledges the actuation back to the controller.
    const auto& appliance_spec = *std::find_if(
        spec_.appliances.begin(), spec_.appliances.end(),
        [&](const scenario::ApplianceSpec& a) { return a.id == command.appliance_id; });
    net::Message ack;
    ack.id = next_message_id_++;
    ack.src = net::plug_node(appliance_spec.unit, command.appliance_id);
    ack.dst = net::kCloudNode;
    ack.kind = net::MessageKind::Ack;
    ack.size_bytes = kAckBytes;
    ack.created_at = at;
    transport_.send(
        ack,
        [this, id = command.appliance_id, action = command.action](sim::Engine&,
                                                                   const net::Message& delivered) {
          if (controller_) controller_->on_ack(id, action);
          log_message(delivered);
        },
        [this](sim::Engine&, const net::Message& lost, const net::NodeId& hop) {
          log_message_lost(lost, hop);
        });
  }

  void schedule_prices() {
    if (!spec_.pricing.enabled) return;
    const auto signals = drm::price_schedule(spec_.pricing.policy, spec_.horizon_ms);
    for (const auto& signal : signals) {
      engine_.schedule(signal.effective_at, sim::EventKind::PriceUpdate,
                       [this, signal](sim::Engine&) { publish_price(signal); });
    }
  }

  void publish_price(const drm::PriceSignal& signal) {
    writer_.emit({signal.effective_at, 0, scenario::PriceLine{signal.price_sgd_per_kwh}});
    for (const auto& gateway : topology_.nodes_of_kind(net::NodeKind::UHG)) {
      net::Message msg;
      msg.id = next_message_id_++;
      msg.src = net::kCloudNode;
      msg.dst = gateway;
      msg.kind = net::MessageKind::PriceSignal;
      msg.size_bytes = kPriceSignalBytes;
      msg.created_at = signal.effective_at;
      transport_.send(
          msg, [this](sim::Engine&, const net::Message& delivered) { log_message(delivered); },
          [this](sim::Engine&, const net::Message& lost, const net::NodeId& hop) {
            log_message_lost(lost, hop);
          });
    }
  }

  void log_message(const net::Message& msg) {
    scenario::MessageLine line;
    line.phase = scenario::MessageLine::Phase::Delivered;
    line.message_id = msg.id;
    line.src = msg.src;
    line.dst = msg.dst;
    line.kind = msg.kind;
    line.size_bytes = msg.size_bytes;
    line.created_at = msg.created_at;
    line.latency_ms = msg.delivered_at.value_or(msg.created_at) - msg.created_at;
    writer_.emit({engine_.now(), 0, line});
  }

  void log_message_lost(const net::Message& msg, const net::NodeId& hop) {
    scenario::MessageLine line;
    line.phase = scenario::MessageLine::Phase::Lost;
    line.message_id = msg.id;
    line.src = msg.src;
    line.dst = msg.dst;
    line.kind = msg.kind;
    line.size_bytes = msg.size_bytes;
    line.created_at = msg.created_at;
    line.lost_hop = hop;
    writer_.emit({engine_.now(), 0, line});
  }

  ScenarioSpec spec_;
  sim::Engine engine_;
  net::Topology topology_;
  net::Transport transport_;
  scenario::TraceWriter writer_;
  std::vector<premises::Unit> units_;
  std::vector<premises::Unit> script_units_;  // what users alone would have done
  std::map<std::string, ApplianceRef> appliance_at_;
  std::optional<drm::Controller> controller_;
  std::uint64_t next_message_id_ = 1;
  bool demand_flush_pending_ = false;
  sim::SimTime sampler_period_ms_ = sim::kMsPerMinute;
};

}  // namespace

RunResult run_scenario(const ScenarioSpec& spec, const RunOptions& options) {
  const auto errors = scenario::validate(spec);
  if (!errors.empty()) {
    std::string joined = "scenario validation failed:";
    for (const auto& e : errors) joined += "\n  " + e;
    throw scenario::ScenarioError(joined);
  }

  RunResult result;
  result.spec = spec;

  std::string trace_path;
  if (options.write_files) {
    std::filesystem::create_directories(options.out_dir.empty() ? "." : options.out_dir);
    trace_path =
        (std::filesystem::path(options.out_dir.empty() ? "." : options.out_dir) / spec.output.trace)
            .string();
  }

  Simulation simulation(spec, trace_path);
  result.run = simulation.execute();
  result.trace = simulation.writer().lines();
  result.trace_hash = simulation.writer().hash();
  result.trace_hash_hex = simulation.writer().hash_hex();
  result.trace_path = trace_path;
  result.report = scenario::build_report(spec, result.trace, result.run, result.trace_hash);

  if (options.write_files) {
    const std::filesystem::path out(options.out_dir.empty() ? "." : options.out_dir);
    const auto write = [&](const std::string& name, const std::string& content) {
      std::ofstream file(out / name, std::ios::binary | std::ios::trunc);
      if (!file) throw scenario::ScenarioError("cannot write output file: " + (out / name).string());
      file << content;
      return (out / name).string();
    };
    result.report_path = write(spec.output.report, result.report.report_json);
    write(spec.output.demand_csv, result.report.demand_csv);
    write(spec.output.wastage_csv, result.report.wastage_csv);
  }
  return result;
}

}  // namespace gridbed::run
