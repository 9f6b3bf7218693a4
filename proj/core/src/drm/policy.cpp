#include "gridbed/drm/policy.hpp"

#include <stdexcept>

namespace gridbed::drm {

const char* to_string(CommandAction action) {
  return action == CommandAction::SwitchOff ? "SwitchOff" : "SwitchOn";
}

const char* to_string(ReserveClass cls) {
  switch (cls) {
    case ReserveClass::Primary: return "Primary";
    case ReserveClass::Secondary: return "Secondary";
    case ReserveClass::Tertiary: return "Tertiary";
    case ReserveClass::Unsuitable: return "Unsuitable";
  }
  return "?";
}

std::vector<PriceSignal> price_schedule(const PricingPolicy& policy, sim::SimTime horizon_ms) {
  std::vector<PriceSignal> signals;
  if (horizon_ms <= 0) return signals;

  if (policy.kind == PricingPolicy::Kind::Flat) {
    if (policy.flat_price <= 0.0) throw std::invalid_argument("price must be > 0");
    signals.push_back({0, policy.flat_price});
    return signals;
  }

  if (policy.day_price <= 0.0 || policy.night_price <= 0.0) {
    throw std::invalid_argument("price must be > 0");
  }
  if (policy.day_start_min < 0 || policy.day_end_min > 24 * 60 ||
      policy.day_start_min >= policy.day_end_min) {
    throw std::invalid_argument("inverted day_window");
  }

  auto price_at_minute = [&](int minute_of_day) {
    return minute_of_day >= policy.day_start_min && minute_of_day < policy.day_end_min
               ? policy.day_price
               : policy.night_price;
  };

  double last_price = 0.0;
  for (sim::SimTime day = 0; day * sim::kMsPerDay < horizon_ms; ++day) {
    const sim::SimTime base = day * sim::kMsPerDay;
    const sim::SimTime boundaries[] = {base, base + sim::minutes(policy.day_start_min),
                                       base + sim::minutes(policy.day_end_min)};
    for (sim::SimTime t : boundaries) {
      if (t >= horizon_ms || t < base) continue;
      const double p = price_at_minute(static_cast<int>((t % sim::kMsPerDay) / sim::kMsPerMinute));
      if (signals.empty() || p != last_price) {
        if (!signals.empty() && t == signals.back().effective_at) continue;
        signals.push_back({t, p});
        last_price = p;
      }
    }
  }
  return signals;
}

ReserveClass classify_reserve(double latency_p95_ms) {
  if (latency_p95_ms < 0.0) throw std::invalid_argument("latency must be >= 0");
  if (latency_p95_ms < 30'000.0) return ReserveClass::Primary;
  if (latency_p95_ms < 900'000.0) return ReserveClass::Secondary;
  return ReserveClass::Tertiary;
}

double aggregate_flexible_capacity(std::span<const premises::Unit> units, sim::SimTime at) {
  double kw = 0.0;
  for (const auto& unit : units) {
    for (const auto& appliance : unit.appliances) {
      if (appliance.flexible && appliance.is_drawing_capable_at(at)) {
        kw += appliance.rated_power_w / 1000.0;
      }
    }
  }
  return kw;
}

}  // namespace gridbed::drm
