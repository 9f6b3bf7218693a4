#include "gridbed/analytics/identify.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

#include "gridbed/premises/premises.hpp"

namespace gridbed::analytics {

namespace {

// Signature played from switch-on at t=0, averaged on the trace's grid.
std::vector<double> render_signature(const std::vector<premises::PhaseSig>& signature,
                                     int resolution_s) {
  premises::Appliance fake;
  fake.signature = signature;
  fake.on = true;
  fake.switched_on_at = 0;
  const sim::SimTime duration = premises::signature_duration_ms(signature);
  if (duration <= 0) return {};
  const sim::TimeInterval on{0, duration};
  const auto profile =
      premises::appliance_power_trace(fake, std::span(&on, 1), {0, duration}, resolution_s);
  return profile.values_kw;
}

}  // namespace

IdentifyResult identify_appliance(const premises::LoadProfile& trace,
                                  const std::vector<SignatureEntry>& library,
                                  double activity_floor_kw) {
  if (library.empty()) throw std::invalid_argument("identify_appliance: empty library");

  std::size_t first = trace.values_kw.size(), last = 0;
  for (std::size_t i = 0; i < trace.values_kw.size(); ++i) {
    if (trace.values_kw[i] > activity_floor_kw) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == trace.values_kw.size()) {
    return {.label = "", .distance = 0.0, .no_activity = true};
  }
  const std::vector<double> active(trace.values_kw.begin() + static_cast<std::ptrdiff_t>(first),
                                   trace.values_kw.begin() + static_cast<std::ptrdiff_t>(last) + 1);

  IdentifyResult best;
  bool have_best = false;
  for (const auto& entry : library) {
    const auto rendered = render_signature(entry.signature, trace.resolution_s);
    const std::size_t len = std::max(active.size(), rendered.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double a = i < active.size() ? active[i] : 0.0;
      const double b = i < rendered.size() ? rendered[i] : 0.0;
      sq += (a - b) * (a - b);
    }
    const double distance = std::sqrt(sq);
    if (!have_best || distance < best.distance) {
      best.label = entry.label;
      best.distance = distance;
      have_best = true;
    }
  }
  return best;
}

}  // namespace gridbed::analytics
