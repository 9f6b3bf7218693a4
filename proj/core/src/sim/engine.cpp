#include "gridbed/sim/engine.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace gridbed::sim {

Engine::Handle Engine::schedule(SimTime fire_at, EventKind kind, Action action) {
  if (fire_at < now_) {
    throw std::logic_error("schedule: event at t=" + std::to_string(fire_at) +
                           " is in the past (now=" + std::to_string(now_) + ")");
  }
  const Handle handle = next_sequence_++;
  queue_.push(Entry{fire_at, handle, kind, std::move(action)});
  pending_.insert(handle);
  return handle;
}

bool Engine::cancel(Handle handle) {
  return pending_.erase(handle) > 0;
}

RunSummary Engine::run_until(SimTime horizon) {
  if (horizon < now_) {
    throw std::logic_error("run_until: horizon precedes current time");
  }
  RunSummary summary;
  while (!queue_.empty() && queue_.top().fire_at <= horizon) {
    Entry entry = queue_.top();
    queue_.pop();
    if (pending_.erase(entry.sequence) == 0) continue;  // cancelled
    now_ = entry.fire_at;
    entry.action(*this);
    ++summary.events_processed;
    ++total_dispatched_;
  }
  now_ = horizon;
  summary.final_time = now_;
  return summary;
}

}  // namespace gridbed::sim
