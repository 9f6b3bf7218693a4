#include "gridbed/premises/nems.hpp"

#include <cmath>
#include <stdexcept>

namespace gridbed::premises {

namespace {

double circular_gauss(double hour, double center, double width) {
  double d = std::fabs(hour - center);
  d = std::min(d, 24.0 - d);
  return std::exp(-(d / width) * (d / width));
}

}  // namespace

double daily_base_shape(double hour_of_day) {
  return 0.40 + 0.16 * circular_gauss(hour_of_day, 8.5, 2.2) +
         0.60 * circular_gauss(hour_of_day, 19.5, 3.0);
}

std::vector<LoadProfile> synthesize_nems_base(int units, double peak_kw, int resolution_s,
                                              sim::SimTime horizon_ms, sim::RngStream& rng) {
  if (peak_kw <= 0.0) throw std::invalid_argument("synthesize_nems_base: peak_kw must be > 0");
  if (units <= 0) throw std::invalid_argument("synthesize_nems_base: units must be > 0");
  if (resolution_s <= 0) throw std::invalid_argument("synthesize_nems_base: bad resolution");

  const sim::SimTime step = sim::seconds(resolution_s);
  const auto steps = static_cast<std::size_t>((horizon_ms + step - 1) / step);

  std::vector<double> factors(static_cast<std::size_t>(units));
  for (auto& f : factors) f = 0.95 + 0.10 * rng.uniform();

  std::vector<LoadProfile> profiles(static_cast<std::size_t>(units));
  double summed_max = 0.0;
  std::vector<double> shape(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const sim::SimTime t = static_cast<sim::SimTime>(i) * step;
    const double hour = static_cast<double>(t % sim::kMsPerDay) / sim::kMsPerHour;
    shape[i] = daily_base_shape(hour);
  }
  double factor_sum = 0.0;
  for (double f : factors) factor_sum += f;
  for (double s : shape) summed_max = std::max(summed_max, s * factor_sum);

  const double scale = peak_kw / summed_max;
  for (int u = 0; u < units; ++u) {
    auto& p = profiles[static_cast<std::size_t>(u)];
    p.resolution_s = resolution_s;
    p.values_kw.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      p.values_kw[i] = shape[i] * factors[static_cast<std::size_t>(u)] * scale;
    }
  }
  return profiles;
}

}  // namespace gridbed::premises
