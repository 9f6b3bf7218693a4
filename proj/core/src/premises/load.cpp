#include "gridbed/premises/load.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridbed::premises {

sim::SimTime signature_duration_ms(const std::vector<PhaseSig>& signature) {
  sim::SimTime total = 0;
  for (const auto& phase : signature) total += sim::seconds(phase.duration_s);
  return total;
}

double LoadProfile::at(sim::SimTime t) const {
  if (t < 0 || t > duration_ms() || values_kw.empty()) {
    throw std::out_of_range("LoadProfile::at: time outside profile horizon");
  }
  auto index = static_cast<std::size_t>(t / step_ms());
  if (index >= values_kw.size()) index = values_kw.size() - 1;
  return values_kw[index];
}

double LoadProfile::energy_kwh(sim::SimTime from, sim::SimTime to) const {
  if (from < 0 || to < from || to > duration_ms()) {
    throw std::out_of_range("LoadProfile::energy_kwh: window outside profile horizon");
  }
  const sim::SimTime step = step_ms();
  double kwh = 0.0;
  sim::SimTime t = from;
  auto i = static_cast<std::size_t>(from / step);
  while (t < to) {
    const sim::SimTime step_end = std::min<sim::SimTime>(static_cast<sim::SimTime>(i + 1) * step, to);
    kwh += values_kw[i] * static_cast<double>(step_end - t) / 3'600'000.0;
    t = step_end;
    ++i;
  }
  return kwh;
}

double LoadProfile::max_kw() const {
  double m = 0.0;
  for (double v : values_kw) m = std::max(m, v);
  return m;
}

LoadProfile LoadProfile::flat(double kw, sim::SimTime horizon_ms) {
  LoadProfile p;
  // one coarse step per hour keeps flat profiles tiny over long horizons
  p.resolution_s = 3600;
  const auto steps = static_cast<std::size_t>((horizon_ms + sim::kMsPerHour - 1) / sim::kMsPerHour);
  p.values_kw.assign(std::max<std::size_t>(steps, 1), kw);
  return p;
}

}  // namespace gridbed::premises
