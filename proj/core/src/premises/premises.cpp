#include "gridbed/premises/premises.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridbed::premises {

const char* to_string(ApplianceLabel label) {
  switch (label) {
    case ApplianceLabel::Light: return "Light";
    case ApplianceLabel::ACS: return "ACS";
    case ApplianceLabel::Fridge: return "Fridge";
    case ApplianceLabel::Kettle: return "Kettle";
    case ApplianceLabel::Other: return "Other";
  }
  return "?";
}

std::optional<ApplianceLabel> appliance_label_from_string(const std::string& name) {
  if (name == "Light") return ApplianceLabel::Light;
  if (name == "ACS") return ApplianceLabel::ACS;
  if (name == "Fridge") return ApplianceLabel::Fridge;
  if (name == "Kettle") return ApplianceLabel::Kettle;
  if (name == "Other") return ApplianceLabel::Other;
  return std::nullopt;
}

namespace {

// Power in W that a switched-on appliance draws `elapsed` into its run.
double playback_power_w(const Appliance& a, sim::SimTime elapsed_ms) {
  if (elapsed_ms < 0) return 0.0;
  if (a.signature.empty()) return a.rated_power_w;
  sim::SimTime t = elapsed_ms;
  for (const auto& phase : a.signature) {
    const sim::SimTime d = sim::seconds(phase.duration_s);
    if (t < d) return phase.power_w;
    t -= d;
  }
  return 0.0;  // signature exhausted
}

// Integral of playback power over [a_ms, b_ms) after switch-on, in W*ms.
double playback_integral_wms(const Appliance& a, sim::SimTime a_ms, sim::SimTime b_ms) {
  if (b_ms <= a_ms) return 0.0;
  a_ms = std::max<sim::SimTime>(a_ms, 0);
  if (a.signature.empty()) {
    return a.rated_power_w * static_cast<double>(b_ms - a_ms);
  }
  double acc = 0.0;
  sim::SimTime phase_start = 0;
  for (const auto& phase : a.signature) {
    const sim::SimTime phase_end = phase_start + sim::seconds(phase.duration_s);
    const sim::SimTime lo = std::max(a_ms, phase_start);
    const sim::SimTime hi = std::min(b_ms, phase_end);
    if (hi > lo) acc += phase.power_w * static_cast<double>(hi - lo);
    phase_start = phase_end;
    if (phase_start >= b_ms) break;
  }
  return acc;
}

}  // namespace

double Appliance::power_kw_at(sim::SimTime t) const {
  if (!on || t < switched_on_at) return 0.0;
  return playback_power_w(*this, t - switched_on_at) / 1000.0;
}

bool Appliance::is_drawing_capable_at(sim::SimTime t) const {
  if (!on || t < switched_on_at) return false;
  if (signature.empty()) return true;
  return t - switched_on_at < signature_duration_ms(signature);
}

bool OccupancyTrace::occupied_at(sim::SimTime t) const {
  auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                             [](sim::SimTime v, const Interval& iv) { return v < iv.from; });
  if (it == intervals.begin()) return false;
  --it;
  return t < it->to && it->occupied;
}

std::vector<sim::TimeInterval> OccupancyTrace::unoccupied_spans(sim::SimTime from,
                                                                sim::SimTime to) const {
  std::vector<sim::TimeInterval> out;
  for (const auto& iv : intervals) {
    if (iv.occupied) continue;
    const sim::SimTime lo = std::max(from, iv.from);
    const sim::SimTime hi = std::min(to, iv.to);
    if (hi > lo) out.push_back({lo, hi});
  }
  return out;
}

std::vector<std::string> OccupancyTrace::validate(sim::SimTime horizon_ms) const {
  std::vector<std::string> errors;
  if (intervals.empty()) {
    errors.push_back("occupancy trace is empty");
    return errors;
  }
  if (intervals.front().from != 0) errors.push_back("occupancy trace does not start at t=0");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].to <= intervals[i].from) {
      errors.push_back("occupancy interval " + std::to_string(i) + " is empty or inverted");
    }
    if (i + 1 < intervals.size() && intervals[i + 1].from != intervals[i].to) {
      errors.push_back("occupancy gap or overlap after interval " + std::to_string(i));
    }
  }
  if (intervals.back().to < horizon_ms) {
    errors.push_back("occupancy trace ends before the scenario horizon");
  }
  return errors;
}

OccupancyTrace OccupancyTrace::always(bool occupied, sim::SimTime horizon_ms) {
  OccupancyTrace trace;
  trace.intervals.push_back({0, horizon_ms, occupied});
  return trace;
}

double total_demand(std::span<const Unit> units, sim::SimTime at) {
  double kw = 0.0;
  for (const auto& unit : units) {
    if (!unit.base_profile.values_kw.empty()) kw += unit.base_profile.at(at);
    for (const auto& appliance : unit.appliances) kw += appliance.power_kw_at(at);
  }
  return kw;
}

double appliance_energy_kwh(const Appliance& appliance,
                            std::span<const sim::TimeInterval> on_intervals,
                            sim::TimeInterval window) {
  double wms = 0.0;
  for (const auto& iv : on_intervals) {
    const sim::SimTime lo = std::max(window.from, iv.from);
    const sim::SimTime hi = std::min(window.to, iv.to);
    if (hi <= lo) continue;
    wms += playback_integral_wms(appliance, lo - iv.from, hi - iv.from);
  }
  return wms / 3'600'000.0 / 1000.0;  // W*ms -> kWh
}

LoadProfile appliance_power_trace(const Appliance& appliance,
                                  std::span<const sim::TimeInterval> on_intervals,
                                  sim::TimeInterval window, int resolution_s) {
  if (window.to <= window.from || window.from < 0 || resolution_s <= 0) {
    throw std::invalid_argument("appliance_power_trace: invalid window");
  }
  LoadProfile profile;
  profile.resolution_s = resolution_s;
  const sim::SimTime step = profile.step_ms();
  const auto steps = static_cast<std::size_t>((window.length_ms() + step - 1) / step);
  profile.values_kw.assign(steps, 0.0);
  for (const auto& iv : on_intervals) {
    const sim::SimTime lo = std::max(window.from, iv.from);
    const sim::SimTime hi = std::min(window.to, iv.to);
    if (hi <= lo) continue;
    for (sim::SimTime t = lo; t < hi;) {
      const auto index = static_cast<std::size_t>((t - window.from) / step);
      const sim::SimTime step_end = std::min(window.from + static_cast<sim::SimTime>(index + 1) * step, hi);
      const double wms = playback_integral_wms(appliance, t - iv.from, step_end - iv.from);
      profile.values_kw[index] += wms / static_cast<double>(step) / 1000.0;  // average kW
      t = step_end;
    }
  }
  return profile;
}

}  // namespace gridbed::premises
