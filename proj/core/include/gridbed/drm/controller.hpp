#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridbed/drm/policy.hpp"
#include "gridbed/drm/shed.hpp"
#include "gridbed/sim/time.hpp"

namespace gridbed::drm {

// A unit's consolidated telemetry: meter total plus plug on/off states.
struct MeterReading {
  std::string unit;
  double total_kw = 0.0;
  sim::SimTime measured_at = 0;
  std::map<std::string, bool> appliance_states;
};

struct ControllerAppliance {
  std::string id;
  std::string unit;
  double power_kw = 0.0;
  double weight = 1.0;
  bool flexible = false;
};

struct TickResult {
  std::vector<ControlCommand> commands;
  std::optional<ShedSelection> shed;   // set when this tick shed load
  double required_kw = 0.0;            // excess the shed had to cover
  std::optional<std::string> restored; // set when this tick restored one appliance
};

// Centralized demand controller. It only ever sees delivered meter readings
// (possibly stale) and keeps the perceived total under policy.threshold_kw
// by switching flexible appliances off, preferring the least total user
// inconvenience. Restores are gradual: at most one appliance per tick, and
// only when perceived demand plus that appliance stays under
// threshold - hysteresis.
//
// Commands in flight are tracked as pending and counted into an effective
// demand view, so a slow command path does not cause double shedding; a
// pending entry clears on the plug's ack or on a reading that already shows
// the new state, whichever arrives first. Lost commands simply never apply.
class Controller {
 public:
  Controller(DrmPolicy policy, std::vector<ControllerAppliance> registry);

  void on_reading(const MeterReading& reading);
  void on_ack(const std::string& appliance_id, CommandAction action);

  TickResult tick(sim::SimTime at);

  // Sum of the latest delivered per-unit readings.
  double perceived_kw() const;
  bool has_readings() const { return !latest_.empty(); }
  const DrmPolicy& policy() const { return policy_; }
  std::size_t shed_count() const { return shed_.size(); }

 private:
  double effective_kw() const;

  DrmPolicy policy_;
  std::map<std::string, ControllerAppliance> registry_;
  std::map<std::string, MeterReading> latest_;       // by unit
  std::map<std::string, sim::SimTime> pending_off_;  // command in flight
  std::map<std::string, sim::SimTime> pending_on_;
  std::map<std::string, double> shed_;               // confirmed off, restorable; id -> weight
  std::uint64_t next_command_id_ = 1;
};

}  // namespace gridbed::drm
