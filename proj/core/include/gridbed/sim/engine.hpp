#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "gridbed/sim/rng.hpp"
#include "gridbed/sim/time.hpp"

namespace gridbed::sim {

enum class EventKind {
  MessageDelivery,
  SensorTick,
  ControllerTick,
  LoadChange,
  PriceUpdate,
};

struct RunSummary {
  std::uint64_t events_processed = 0;
  SimTime final_time = 0;
};

// Single-threaded discrete-event kernel. Events fire in ascending
// (fire_at, sequence) order; sequence is the global insertion counter, so
// simultaneous events fire in the order they were scheduled. One engine per
// simulation instance; instances share no state and may run concurrently.
class Engine {
 public:
  using Action = std::function<void(Engine&)>;
  using Handle = std::uint64_t;

  explicit Engine(std::uint64_t seed) : rng_(seed) {}

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return rng_.seed(); }
  RngRegistry& rng() { return rng_; }

  // Enqueues an event. Scheduling in the past is a logic bug and throws.
  Handle schedule(SimTime fire_at, EventKind kind, Action action);

  // Returns true if the event was still pending.
  bool cancel(Handle handle);

  // Processes every event with fire_at <= horizon, then advances the clock
  // to the horizon. Returns the per-call dispatch count.
  RunSummary run_until(SimTime horizon);

  std::uint64_t total_dispatched() const { return total_dispatched_; }

 private:
  struct Entry {
    SimTime fire_at;
    std::uint64_t sequence;
    EventKind kind;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  SimTime now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t total_dispatched_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<Handle> pending_;
  RngRegistry rng_;
};

}  // namespace gridbed::sim
