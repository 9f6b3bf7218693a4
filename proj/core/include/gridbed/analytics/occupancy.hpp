#pragma once

#include <span>

#include "gridbed/premises/premises.hpp"

namespace gridbed::analytics {

// Rule-based occupancy: a room counts as unoccupied from the end of any
// idle_window_s span with no motion and noise under the threshold, until the
// next motion or noise trigger. The room is assumed occupied at the start of
// the window. Samples must be time-ordered.
premises::OccupancyTrace infer_occupancy(std::span<const premises::SensorSample> samples,
                                         int idle_window_s, double noise_threshold_db,
                                         sim::SimTime from, sim::SimTime to);

}  // namespace gridbed::analytics
