#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridbed/premises/premises.hpp"
#include "gridbed/sim/time.hpp"

namespace gridbed::drm {

struct DrmPolicy {
  double threshold_kw = 0.0;          // demand cap the controller defends
  int control_period_s = 60;
  double restore_hysteresis_kw = 0.0; // margin below threshold before restores
};

enum class CommandAction { SwitchOff, SwitchOn };

const char* to_string(CommandAction action);

struct ControlCommand {
  std::uint64_t id = 0;
  std::string appliance_id;
  CommandAction action = CommandAction::SwitchOff;
  sim::SimTime issued_at = 0;
};

struct PriceSignal {
  sim::SimTime effective_at = 0;
  double price_sgd_per_kwh = 0.0;
};

struct PricingPolicy {
  enum class Kind { Flat, TwoTier };
  Kind kind = Kind::Flat;
  double flat_price = 0.0;
  double day_price = 0.0;
  double night_price = 0.0;
  int day_start_min = 0;  // minutes after midnight, [start, end)
  int day_end_min = 0;
};

// Ordered signals covering the horizon, one per price change (the first at
// t=0). Empty for a zero horizon. Throws on non-positive prices or an
// inverted day window.
std::vector<PriceSignal> price_schedule(const PricingPolicy& policy, sim::SimTime horizon_ms);

enum class ReserveClass { Primary, Secondary, Tertiary, Unsuitable };

const char* to_string(ReserveClass cls);

// Response-time tiers: end-to-end actuation under 30 s qualifies as primary
// reserve, under 15 min as secondary, anything slower as tertiary.
ReserveClass classify_reserve(double latency_p95_ms);

// Total rated power of flexible appliances currently drawing, in kW.
double aggregate_flexible_capacity(std::span<const premises::Unit> units, sim::SimTime at);

}  // namespace gridbed::drm
