#include "gridbed/analytics/impairment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gridbed::analytics {

ImpairmentReport impairment_report(std::span<const DemandSample> demand,
                                   std::span<const CommandOutcome> commands, double threshold_kw,
                                   sim::SimTime horizon_ms) {
  if (demand.empty()) throw std::invalid_argument("impairment_report: no demand samples");
  ImpairmentReport report;
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const sim::SimTime end = i + 1 < demand.size() ? demand[i + 1].at : horizon_ms;
    if (end < demand[i].at) throw std::invalid_argument("impairment_report: unordered samples");
    const double dt_ms = static_cast<double>(end - demand[i].at);
    if (demand[i].true_kw > threshold_kw) {
      report.time_above_threshold_s += dt_ms / 1000.0;
      report.overshoot_kwh += (demand[i].true_kw - threshold_kw) * dt_ms / 3'600'000.0;
    }
  }

  std::vector<double> latencies;
  for (const auto& cmd : commands) {
    ++report.commands_sent;
    if (cmd.applied_at) {
      latencies.push_back(static_cast<double>(*cmd.applied_at - cmd.issued_at));
    } else {
      ++report.commands_lost;
    }
  }
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double v : latencies) sum += v;
    report.mean_command_latency_ms = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    const auto rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(latencies.size())));
    report.p95_command_latency_ms = latencies[std::max<std::size_t>(rank, 1) - 1];
  }
  return report;
}

}  // namespace gridbed::analytics
