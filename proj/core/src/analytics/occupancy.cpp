#include "gridbed/analytics/occupancy.hpp"

#include <stdexcept>

namespace gridbed::analytics {

premises::OccupancyTrace infer_occupancy(std::span<const premises::SensorSample> samples,
                                         int idle_window_s, double noise_threshold_db,
                                         sim::SimTime from, sim::SimTime to) {
  if (idle_window_s <= 0) throw std::invalid_argument("idle_window_s must be > 0");
  if (to <= from) throw std::invalid_argument("empty inference window");
  const sim::SimTime idle = sim::seconds(idle_window_s);

  premises::OccupancyTrace trace;
  bool occupied = true;
  sim::SimTime segment_start = from;
  sim::SimTime last_active = from;
  sim::SimTime last_at = from;

  auto close_segment = [&](sim::SimTime at, bool next_state) {
    if (at > segment_start) trace.intervals.push_back({segment_start, at, occupied});
    segment_start = at;
    occupied = next_state;
  };

  for (const auto& s : samples) {
    if (s.at < last_at) throw std::invalid_argument("samples not time-ordered");
    last_at = s.at;
    const bool trigger = s.motion || s.noise_db >= noise_threshold_db;
    if (occupied && !trigger && s.at - last_active >= idle) {
      close_segment(last_active + idle, false);
    }
    if (trigger) {
      if (!occupied) close_segment(s.at, true);
      last_active = s.at;
    }
  }
  if (occupied && to - last_active >= idle) close_segment(last_active + idle, false);
  if (to > segment_start) trace.intervals.push_back({segment_start, to, occupied});
  return trace;
}

}  // namespace gridbed::analytics
