#pragma once

#include <vector>

#include "gridbed/premises/load.hpp"
#include "gridbed/sim/rng.hpp"

namespace gridbed::premises {

// Canonical double-peak daily load shape (night trough, small morning bump,
// dominant evening peak), periodic over 24 h, max ~= 1.
double daily_base_shape(double hour_of_day);

// Per-unit daily base profiles with a seeded +/-5% unit-to-unit spread,
// scaled so the summed profile's daily maximum equals peak_kw.
std::vector<LoadProfile> synthesize_nems_base(int units, double peak_kw, int resolution_s,
                                              sim::SimTime horizon_ms, sim::RngStream& rng);

}  // namespace gridbed::premises
