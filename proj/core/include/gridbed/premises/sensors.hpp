#pragma once

#include <string>

#include "gridbed/premises/premises.hpp"
#include "gridbed/sim/rng.hpp"

namespace gridbed::premises {

struct GaussSpec {
  double mean = 0.0;
  double stddev = 1.0;
};

// Sampling model for a multi-purpose sensor node. The motion and noise
// distributions are the ones occupancy inference keys on; temperature,
// humidity and lux are ambience only. All values are configurable per
// scenario and carry no measured meaning.
struct SensorConfig {
  int period_s = 30;
  double p_motion_when_occupied = 0.3;
  GaussSpec noise_occupied{45.0, 5.0};
  GaussSpec noise_unoccupied{30.0, 3.0};
  GaussSpec temp_c{24.0, 0.5};
  GaussSpec humidity_pct{60.0, 5.0};
  GaussSpec lux_occupied{300.0, 30.0};
  GaussSpec lux_unoccupied{5.0, 2.0};

  // Midpoint of the two noise means; the inference default.
  double noise_threshold_db() const {
    return (noise_occupied.mean + noise_unoccupied.mean) / 2.0;
  }
};

// Draw order is fixed (motion, noise, temp, humidity, lux) so a stream
// replays identically across runs.
SensorSample draw_sensor_sample(const std::string& mpn_id, sim::SimTime at, bool occupied,
                                const SensorConfig& config, sim::RngStream& rng);

}  // namespace gridbed::premises
