#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridbed/premises/load.hpp"
#include "gridbed/sim/time.hpp"

namespace gridbed::premises {

enum class ApplianceLabel { Light, ACS, Fridge, Kettle, Other };
enum class UnitKind { Hostel, Office };

const char* to_string(ApplianceLabel label);
std::optional<ApplianceLabel> appliance_label_from_string(const std::string& name);

// An appliance with a finite signature draws the phase powers after
// switch-on and then stops drawing; an empty signature means constant rated
// power while on.
struct Appliance {
  std::string id;
  ApplianceLabel label = ApplianceLabel::Other;
  double rated_power_w = 0.0;
  bool flexible = false;
  double inconvenience_weight = 1.0;
  std::vector<PhaseSig> signature;

  bool on = false;
  sim::SimTime switched_on_at = 0;

  double power_kw_at(sim::SimTime t) const;
  // State as seen by metering: a finished signature reads as off.
  bool is_drawing_capable_at(sim::SimTime t) const;
};

struct SensorSample {
  std::string mpn_id;
  sim::SimTime at = 0;
  bool motion = false;
  double noise_db = 0.0;
  double temp_c = 0.0;
  double humidity_pct = 0.0;
  double lux = 0.0;
};

struct OccupancyTrace {
  struct Interval {
    sim::SimTime from = 0;
    sim::SimTime to = 0;
    bool occupied = false;
  };
  std::vector<Interval> intervals;

  bool occupied_at(sim::SimTime t) const;
  std::vector<sim::TimeInterval> unoccupied_spans(sim::SimTime from, sim::SimTime to) const;
  // Sorted, non-overlapping, covering [0, horizon) exactly.
  std::vector<std::string> validate(sim::SimTime horizon_ms) const;

  static OccupancyTrace always(bool occupied, sim::SimTime horizon_ms);
};

struct Unit {
  std::string id;
  UnitKind kind = UnitKind::Hostel;
  std::vector<Appliance> appliances;
  LoadProfile base_profile;
  OccupancyTrace occupancy;
};

// Instantaneous total of base profiles plus every drawing appliance, in kW.
// Additive over unit partitions; empty input is 0.
double total_demand(std::span<const Unit> units, sim::SimTime at);

// Per-step average power over the window given the appliance's on-intervals,
// exact with respect to signature phase boundaries (energy is preserved even
// when edges fall inside a step).
LoadProfile appliance_power_trace(const Appliance& appliance,
                                  std::span<const sim::TimeInterval> on_intervals,
                                  sim::TimeInterval window, int resolution_s);

// Closed-form energy over [window.from, window.to) of an appliance that was
// on during the given intervals; no gridding involved.
double appliance_energy_kwh(const Appliance& appliance,
                            std::span<const sim::TimeInterval> on_intervals,
                            sim::TimeInterval window);

}  // namespace gridbed::premises
