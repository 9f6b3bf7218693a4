#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gridbed::sched {

struct MeetingRequest {
  std::string id;
  int duration_slots = 1;
  int earliest_slot = 0;
  int latest_slot = 0;  // inclusive index of the last slot the meeting may occupy
  int attendees = 1;
};

struct RoomResource {
  std::string id;
  int capacity = 1;
  double active_power_kw = 0.0;  // lights plus conditioning while in use
  int slot_length_min = 60;
};

struct Placement {
  std::string request_id;
  std::string room_id;
  int start_slot = 0;
};

struct ScheduleAssignment {
  std::vector<Placement> placements;      // sorted by request id
  double objective_sgd = 0.0;
  std::vector<std::string> unplaced;      // heuristic only; empty means complete
};

enum class ScheduleObjective { Cost, Energy };

struct ScheduleInstance {
  std::vector<MeetingRequest> requests;
  std::vector<RoomResource> rooms;
  std::vector<double> slot_prices;  // SGD/kWh per slot
  ScheduleObjective objective = ScheduleObjective::Cost;

  int slots() const { return static_cast<int>(slot_prices.size()); }
};

// Exhaustive bounds for the exact solver.
inline constexpr int kExactMaxRequests = 8;
inline constexpr int kExactMaxRooms = 4;
inline constexpr int kExactMaxSlots = 12;

bool within_exact_bounds(const ScheduleInstance& instance);

// Objective of a complete feasible assignment; throws std::invalid_argument
// when the assignment violates windows, capacities or overlaps.
double schedule_cost(const ScheduleAssignment& assignment, const ScheduleInstance& instance);

// Globally minimal-cost assignment by branch-and-bound over requests in id
// order (rooms by id, then start slot), which makes the first optimum found
// the lexicographically smallest one. nullopt when infeasible. Throws when
// the instance exceeds the exhaustive bounds.
std::optional<ScheduleAssignment> solve_exact(const ScheduleInstance& instance);

// Greedy placement (largest energy demand first, cheapest feasible slot)
// followed by relocate/swap local search and a depth-1 ejection repair for
// anything left unplaced. Never throws for size; flags unplaced requests.
ScheduleAssignment solve_heuristic(const ScheduleInstance& instance);

}  // namespace gridbed::sched
