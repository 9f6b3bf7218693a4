#pragma once

#include <vector>

#include "gridbed/sim/time.hpp"

namespace gridbed::premises {

// One constant-power stretch of an appliance's switch-on behavior.
struct PhaseSig {
  int duration_s = 0;
  double power_w = 0.0;
};

sim::SimTime signature_duration_ms(const std::vector<PhaseSig>& signature);

// Step-function power series: values_kw[i] holds for
// [i*resolution, (i+1)*resolution). Energy is the exact integral of the
// step function, so it is additive across appliances and sub-windows.
struct LoadProfile {
  int resolution_s = 60;
  std::vector<double> values_kw;

  sim::SimTime step_ms() const { return static_cast<sim::SimTime>(resolution_s) * 1000; }
  sim::SimTime duration_ms() const {
    return static_cast<sim::SimTime>(values_kw.size()) * step_ms();
  }

  // Value at t; t == duration is allowed and reads the last step.
  double at(sim::SimTime t) const;

  double energy_kwh(sim::SimTime from, sim::SimTime to) const;
  double max_kw() const;

  static LoadProfile flat(double kw, sim::SimTime horizon_ms);
};

}  // namespace gridbed::premises
