#include "gridbed/premises/sensors.hpp"

#include <algorithm>

namespace gridbed::premises {

SensorSample draw_sensor_sample(const std::string& mpn_id, sim::SimTime at, bool occupied,
                                const SensorConfig& config, sim::RngStream& rng) {
  SensorSample s;
  s.mpn_id = mpn_id;
  s.at = at;
  s.motion = occupied && rng.bernoulli(config.p_motion_when_occupied);
  const GaussSpec& noise = occupied ? config.noise_occupied : config.noise_unoccupied;
  s.noise_db = rng.normal(noise.mean, noise.stddev);
  s.temp_c = rng.normal(config.temp_c.mean, config.temp_c.stddev);
  s.humidity_pct = std::clamp(rng.normal(config.humidity_pct.mean, config.humidity_pct.stddev), 0.0, 100.0);
  const GaussSpec& lux = occupied ? config.lux_occupied : config.lux_unoccupied;
  s.lux = std::max(0.0, rng.normal(lux.mean, lux.stddev));
  return s;
}

}  // namespace gridbed::premises
