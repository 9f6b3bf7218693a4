#pragma once

#include <cstdint>

namespace gridbed::sim {

// Virtual time, integer milliseconds since scenario start. Integer so that
// hop latencies and schedules never accumulate floating-point drift.
using SimTime = std::int64_t;

inline constexpr SimTime kMsPerSecond = 1000;
inline constexpr SimTime kMsPerMinute = 60 * kMsPerSecond;
inline constexpr SimTime kMsPerHour = 60 * kMsPerMinute;
inline constexpr SimTime kMsPerDay = 24 * kMsPerHour;

constexpr SimTime seconds(std::int64_t s) { return s * kMsPerSecond; }
constexpr SimTime minutes(std::int64_t m) { return m * kMsPerMinute; }
constexpr SimTime hours(std::int64_t h) { return h * kMsPerHour; }
constexpr SimTime days(std::int64_t d) { return d * kMsPerDay; }

// Half-open [from, to) span of simulation time.
struct TimeInterval {
  SimTime from = 0;
  SimTime to = 0;

  constexpr SimTime length_ms() const { return to - from; }
  constexpr bool contains(SimTime t) const { return t >= from && t < to; }
};

}  // namespace gridbed::sim
