#pragma once

#include <optional>
#include <span>

#include "gridbed/sim/time.hpp"

namespace gridbed::analytics {

struct DemandSample {
  sim::SimTime at = 0;
  double base_kw = 0.0;
  double uncontrolled_kw = 0.0;
  double true_kw = 0.0;
  std::optional<double> perceived_kw;
};

struct CommandOutcome {
  sim::SimTime issued_at = 0;
  std::optional<sim::SimTime> applied_at;  // absent when the command was lost
};

// How the communication path degraded control quality over a run.
struct ImpairmentReport {
  double time_above_threshold_s = 0.0;
  double overshoot_kwh = 0.0;  // energy above the threshold
  int commands_sent = 0;
  int commands_lost = 0;
  double mean_command_latency_ms = 0.0;
  double p95_command_latency_ms = 0.0;
};

// Integrates the true demand series (a step function between samples)
// against the threshold and summarizes command outcomes. Samples must be
// non-empty and time-ordered; the last one extends to the horizon.
ImpairmentReport impairment_report(std::span<const DemandSample> demand,
                                   std::span<const CommandOutcome> commands, double threshold_kw,
                                   sim::SimTime horizon_ms);

}  // namespace gridbed::analytics
