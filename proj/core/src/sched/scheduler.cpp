#include "gridbed/sched/scheduler.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace gridbed::sched {

namespace {

constexpr double kEps = 1e-12;

struct Ctx {
  const ScheduleInstance* instance;
  std::vector<const MeetingRequest*> requests;  // sorted by id
  std::vector<const RoomResource*> rooms;       // sorted by id
  double slot_hours = 1.0;
};

Ctx make_ctx(const ScheduleInstance& instance) {
  Ctx ctx;
  ctx.instance = &instance;
  for (const auto& r : instance.requests) ctx.requests.push_back(&r);
  for (const auto& r : instance.rooms) ctx.rooms.push_back(&r);
  auto by_id = [](const auto* a, const auto* b) { return a->id < b->id; };
  std::sort(ctx.requests.begin(), ctx.requests.end(), by_id);
  std::sort(ctx.rooms.begin(), ctx.rooms.end(), by_id);

  if (instance.slots() < 1 && !instance.requests.empty()) {
    throw std::invalid_argument("schedule instance has no slots");
  }
  if (instance.slots() > 64) throw std::invalid_argument("schedule instance exceeds 64 slots");
  for (double p : instance.slot_prices) {
    if (p <= 0.0) throw std::invalid_argument("slot prices must be > 0");
  }
  for (const auto* r : ctx.requests) {
    if (r->duration_slots < 1) throw std::invalid_argument("request duration must be >= 1");
    if (r->attendees < 1) throw std::invalid_argument("request attendees must be >= 1");
  }
  for (std::size_t i = 0; i < ctx.rooms.size(); ++i) {
    if (ctx.rooms[i]->capacity < 1 || ctx.rooms[i]->active_power_kw <= 0.0 ||
        ctx.rooms[i]->slot_length_min <= 0) {
      throw std::invalid_argument("invalid room resource");
    }
    if (ctx.rooms[i]->slot_length_min != ctx.rooms[0]->slot_length_min) {
      throw std::invalid_argument("rooms must share one slot length");
    }
  }
  if (!ctx.rooms.empty()) ctx.slot_hours = ctx.rooms[0]->slot_length_min / 60.0;
  return ctx;
}

std::uint64_t slot_mask(int start, int duration) {
  return ((duration >= 64 ? ~0ULL : (1ULL << duration) - 1)) << start;
}

double placement_cost(const Ctx& ctx, const MeetingRequest& req, const RoomResource& room,
                      int start) {
  double price_sum = 0.0;
  for (int s = start; s < start + req.duration_slots; ++s) {
    price_sum += ctx.instance->objective == ScheduleObjective::Cost
                     ? ctx.instance->slot_prices[static_cast<std::size_t>(s)]
                     : 1.0;
  }
  return room.active_power_kw * ctx.slot_hours * price_sum;
}

bool fits_window(const MeetingRequest& req, int start, int slots) {
  return start >= req.earliest_slot && start + req.duration_slots - 1 <= req.latest_slot &&
         start >= 0 && start + req.duration_slots <= slots;
}

struct Option {
  double cost;
  int room;
  int start;
};

// Feasible (room, start) options in room-then-slot order.
std::vector<Option> options_for(const Ctx& ctx, const MeetingRequest& req) {
  std::vector<Option> options;
  for (std::size_t rm = 0; rm < ctx.rooms.size(); ++rm) {
    const RoomResource& room = *ctx.rooms[rm];
    if (room.capacity < req.attendees) continue;
    for (int start = 0; start + req.duration_slots <= ctx.instance->slots(); ++start) {
      if (!fits_window(req, start, ctx.instance->slots())) continue;
      options.push_back({placement_cost(ctx, req, room, start), static_cast<int>(rm), start});
    }
  }
  return options;
}

ScheduleAssignment collect(const Ctx& ctx, const std::vector<int>& chosen_room,
                           const std::vector<int>& chosen_start,
                           const std::vector<bool>& placed) {
  ScheduleAssignment out;
  for (std::size_t rq = 0; rq < ctx.requests.size(); ++rq) {
    if (!placed[rq]) {
      out.unplaced.push_back(ctx.requests[rq]->id);
      continue;
    }
    out.placements.push_back({ctx.requests[rq]->id,
                              ctx.rooms[static_cast<std::size_t>(chosen_room[rq])]->id,
                              chosen_start[rq]});
    out.objective_sgd += placement_cost(ctx, *ctx.requests[rq],
                                        *ctx.rooms[static_cast<std::size_t>(chosen_room[rq])],
                                        chosen_start[rq]);
  }
  return out;
}

}  // namespace

bool within_exact_bounds(const ScheduleInstance& instance) {
  return static_cast<int>(instance.requests.size()) <= kExactMaxRequests &&
         static_cast<int>(instance.rooms.size()) <= kExactMaxRooms &&
         instance.slots() <= kExactMaxSlots;
}

double schedule_cost(const ScheduleAssignment& assignment, const ScheduleInstance& instance) {
  const Ctx ctx = make_ctx(instance);
  std::map<std::string, const MeetingRequest*> requests;
  for (const auto* r : ctx.requests) requests[r->id] = r;
  std::map<std::string, std::size_t> rooms;
  for (std::size_t i = 0; i < ctx.rooms.size(); ++i) rooms[ctx.rooms[i]->id] = i;

  std::vector<std::uint64_t> occupancy(ctx.rooms.size(), 0);
  std::map<std::string, int> seen;
  double cost = 0.0;
  for (const auto& p : assignment.placements) {
    auto req_it = requests.find(p.request_id);
    auto room_it = rooms.find(p.room_id);
    if (req_it == requests.end()) throw std::invalid_argument("unknown request: " + p.request_id);
    if (room_it == rooms.end()) throw std::invalid_argument("unknown room: " + p.room_id);
    if (++seen[p.request_id] > 1) throw std::invalid_argument("request placed twice: " + p.request_id);
    const MeetingRequest& req = *req_it->second;
    const RoomResource& room = *ctx.rooms[room_it->second];
    if (!fits_window(req, p.start_slot, instance.slots())) {
      throw std::invalid_argument("placement violates window: " + p.request_id);
    }
    if (room.capacity < req.attendees) {
      throw std::invalid_argument("placement violates capacity: " + p.request_id);
    }
    const std::uint64_t mask = slot_mask(p.start_slot, req.duration_slots);
    if (occupancy[room_it->second] & mask) {
      throw std::invalid_argument("overlapping placements in room " + p.room_id);
    }
    occupancy[room_it->second] |= mask;
    cost += placement_cost(ctx, req, room, p.start_slot);
  }
  return cost;
}

std::optional<ScheduleAssignment> solve_exact(const ScheduleInstance& instance) {
  if (!within_exact_bounds(instance)) {
    throw std::invalid_argument("instance exceeds exact solver bounds");
  }
  const Ctx ctx = make_ctx(instance);
  const std::size_t n = ctx.requests.size();
  if (n == 0) return ScheduleAssignment{};

  std::vector<std::vector<Option>> options(n);
  std::vector<double> suffix_lb(n + 1, 0.0);
  for (std::size_t rq = 0; rq < n; ++rq) {
    options[rq] = options_for(ctx, *ctx.requests[rq]);
    if (options[rq].empty()) return std::nullopt;
  }
  for (std::size_t rq = n; rq-- > 0;) {
    double min_cost = std::numeric_limits<double>::infinity();
    for (const auto& o : options[rq]) min_cost = std::min(min_cost, o.cost);
    suffix_lb[rq] = suffix_lb[rq + 1] + min_cost;
  }

  std::vector<std::uint64_t> occupancy(ctx.rooms.size(), 0);
  std::vector<int> room(n, -1), start(n, 0), best_room, best_start;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;

  auto dfs = [&](auto&& self, std::size_t rq, double cost) -> void {
    if (found && cost + suffix_lb[rq] >= best_cost) return;  // >= keeps first (lexicographic) optimum
    if (rq == n) {
      best_cost = cost;
      best_room = room;
      best_start = start;
      found = true;
      return;
    }
    const MeetingRequest& req = *ctx.requests[rq];
    for (const auto& o : options[rq]) {
      const std::uint64_t mask = slot_mask(o.start, req.duration_slots);
      if (occupancy[static_cast<std::size_t>(o.room)] & mask) continue;
      occupancy[static_cast<std::size_t>(o.room)] |= mask;
      room[rq] = o.room;
      start[rq] = o.start;
      self(self, rq + 1, cost + o.cost);
      occupancy[static_cast<std::size_t>(o.room)] &= ~mask;
    }
  };
  dfs(dfs, 0, 0.0);

  if (!found) return std::nullopt;
  return collect(ctx, best_room, best_start, std::vector<bool>(n, true));
}

ScheduleAssignment solve_heuristic(const ScheduleInstance& instance) {
  const Ctx ctx = make_ctx(instance);
  const std::size_t n = ctx.requests.size();
  if (n == 0) return ScheduleAssignment{};

  std::vector<std::uint64_t> occupancy(ctx.rooms.size(), 0);
  std::vector<int> room(n, -1), start(n, 0);
  std::vector<bool> placed(n, false);

  auto cheapest_free = [&](std::size_t rq) -> std::optional<Option> {
    std::optional<Option> best;
    for (const auto& o : options_for(ctx, *ctx.requests[rq])) {
      const std::uint64_t mask = slot_mask(o.start, ctx.requests[rq]->duration_slots);
      if (occupancy[static_cast<std::size_t>(o.room)] & mask) continue;
      if (!best || o.cost < best->cost - kEps) best = o;
    }
    return best;
  };
  auto place = [&](std::size_t rq, const Option& o) {
    occupancy[static_cast<std::size_t>(o.room)] |=
        slot_mask(o.start, ctx.requests[rq]->duration_slots);
    room[rq] = o.room;
    start[rq] = o.start;
    placed[rq] = true;
  };
  auto unplace = [&](std::size_t rq) {
    occupancy[static_cast<std::size_t>(room[rq])] &=
        ~slot_mask(start[rq], ctx.requests[rq]->duration_slots);
    placed[rq] = false;
  };
  auto construct = [&](const std::vector<std::size_t>& ordering) {
    occupancy.assign(ctx.rooms.size(), 0);
    placed.assign(n, false);
    for (std::size_t rq : ordering) {
      if (auto o = cheapest_free(rq)) place(rq, *o);
    }
  };
  auto current_cost = [&] {
    double cost = 0.0;
    for (std::size_t rq = 0; rq < n; ++rq) {
      if (!placed[rq]) continue;
      cost += placement_cost(ctx, *ctx.requests[rq],
                             *ctx.rooms[static_cast<std::size_t>(room[rq])], start[rq]);
    }
    return cost;
  };
  auto unplaced_count = [&] {
    return static_cast<std::size_t>(std::count(placed.begin(), placed.end(), false));
  };

  // Relocate and pairwise-swap until no move improves the objective, with a
  // depth-1 ejection pass for anything still unplaced.
  auto improve = [&] {
    for (int pass = 0; pass < 200; ++pass) {
      bool improved = false;
      for (std::size_t rq = 0; rq < n; ++rq) {
        if (!placed[rq]) continue;
        const double current = placement_cost(
            ctx, *ctx.requests[rq], *ctx.rooms[static_cast<std::size_t>(room[rq])], start[rq]);
        const Option saved{current, room[rq], start[rq]};
        unplace(rq);
        const auto best = cheapest_free(rq);
        if (best && best->cost < current - kEps) {
          place(rq, *best);
          improved = true;
        } else {
          place(rq, saved);
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!placed[i] || !placed[j]) continue;
          const MeetingRequest& ri = *ctx.requests[i];
          const MeetingRequest& rj = *ctx.requests[j];
          const Option oi{0.0, room[i], start[i]}, oj{0.0, room[j], start[j]};
          const double before =
              placement_cost(ctx, ri, *ctx.rooms[static_cast<std::size_t>(oi.room)], oi.start) +
              placement_cost(ctx, rj, *ctx.rooms[static_cast<std::size_t>(oj.room)], oj.start);
          unplace(i);
          unplace(j);
          const bool i_fits =
              ctx.rooms[static_cast<std::size_t>(oj.room)]->capacity >= ri.attendees &&
              fits_window(ri, oj.start, instance.slots()) &&
              !(occupancy[static_cast<std::size_t>(oj.room)] & slot_mask(oj.start, ri.duration_slots));
          bool swapped = false;
          if (i_fits) {
            place(i, Option{0.0, oj.room, oj.start});
            const bool j_fits =
                ctx.rooms[static_cast<std::size_t>(oi.room)]->capacity >= rj.attendees &&
                fits_window(rj, oi.start, instance.slots()) &&
                !(occupancy[static_cast<std::size_t>(oi.room)] &
                  slot_mask(oi.start, rj.duration_slots));
            if (j_fits) {
              const double after =
                  placement_cost(ctx, ri, *ctx.rooms[static_cast<std::size_t>(oj.room)], oj.start) +
                  placement_cost(ctx, rj, *ctx.rooms[static_cast<std::size_t>(oi.room)], oi.start);
              if (after < before - kEps) {
                place(j, Option{0.0, oi.room, oi.start});
                swapped = true;
                improved = true;
              }
            }
            if (!swapped) unplace(i);
          }
          if (!swapped) {
            place(i, Option{0.0, oi.room, oi.start});
            place(j, Option{0.0, oj.room, oj.start});
          }
        }
      }
      // pair reinsertion: pull two meetings out and greedily re-place them
      // in both orders, keeping the cheaper arrangement
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!placed[i] || !placed[j]) continue;
          const Option oi{0.0, room[i], start[i]}, oj{0.0, room[j], start[j]};
          const double before =
              placement_cost(ctx, *ctx.requests[i],
                             *ctx.rooms[static_cast<std::size_t>(oi.room)], oi.start) +
              placement_cost(ctx, *ctx.requests[j],
                             *ctx.rooms[static_cast<std::size_t>(oj.room)], oj.start);
          double best_after = before;
          std::optional<std::pair<Option, Option>> best_pair;  // (for i, for j)
          for (const bool i_first : {true, false}) {
            unplace(i);
            unplace(j);
            const std::size_t first = i_first ? i : j;
            const std::size_t second = i_first ? j : i;
            const auto o1 = cheapest_free(first);
            if (o1) {
              place(first, *o1);
              const auto o2 = cheapest_free(second);
              if (o2) {
                const double after = o1->cost + o2->cost;
                if (after < best_after - kEps) {
                  best_after = after;
                  best_pair = i_first ? std::pair(*o1, *o2) : std::pair(*o2, *o1);
                }
              }
              unplace(first);
            }
            place(i, oi);
            place(j, oj);
          }
          if (best_pair) {
            unplace(i);
            unplace(j);
            place(i, best_pair->first);
            place(j, best_pair->second);
            improved = true;
          }
        }
      }
      for (std::size_t u = 0; u < n; ++u) {
        if (placed[u]) continue;
        for (std::size_t p = 0; p < n && !placed[u]; ++p) {
          if (!placed[p]) continue;
          const Option saved{0.0, room[p], start[p]};
          unplace(p);
          const auto for_u = cheapest_free(u);
          if (for_u) {
            place(u, *for_u);
            if (const auto for_p = cheapest_free(p)) {
              place(p, *for_p);
              improved = true;
            } else {
              unplace(u);
              place(p, saved);
            }
          } else {
            place(p, saved);
          }
        }
      }
      if (!improved) break;
    }
  };

  // Candidate construction orderings, all deterministic: largest energy
  // demand first (duration times the strongest feasible room), most
  // constrained first, and failure-driven rotations of the latter. Each
  // start is polished by local search; fewest unplaced wins, then cost.
  auto demand_key = [&](std::size_t rq) {
    double max_power = 0.0;
    for (const auto* r : ctx.rooms) {
      if (r->capacity >= ctx.requests[rq]->attendees) {
        max_power = std::max(max_power, r->active_power_kw);
      }
    }
    return ctx.requests[rq]->duration_slots * max_power;
  };
  std::vector<std::size_t> by_demand(n);
  for (std::size_t i = 0; i < n; ++i) by_demand[i] = i;
  std::sort(by_demand.begin(), by_demand.end(), [&](std::size_t a, std::size_t b) {
    const double ka = demand_key(a), kb = demand_key(b);
    if (ka != kb) return ka > kb;
    return ctx.requests[a]->id < ctx.requests[b]->id;
  });
  std::vector<std::size_t> by_options = by_demand;
  std::sort(by_options.begin(), by_options.end(), [&](std::size_t a, std::size_t b) {
    const auto oa = options_for(ctx, *ctx.requests[a]).size();
    const auto ob = options_for(ctx, *ctx.requests[b]).size();
    if (oa != ob) return oa < ob;
    return ctx.requests[a]->id < ctx.requests[b]->id;
  });

  struct State {
    std::vector<std::uint64_t> occupancy;
    std::vector<int> room, start;
    std::vector<bool> placed;
    std::size_t unplaced;
    double cost;
  };
  std::optional<State> best_state;
  auto run_attempt = [&](const std::vector<std::size_t>& ordering) {
    construct(ordering);
    improve();
    const State state{occupancy, room, start, placed, unplaced_count(), current_cost()};
    if (!best_state || state.unplaced < best_state->unplaced ||
        (state.unplaced == best_state->unplaced && state.cost < best_state->cost - kEps)) {
      best_state = state;
    }
    return state.unplaced;
  };

  run_attempt(by_demand);
  run_attempt(by_options);
  if (best_state->unplaced > 0) {
    std::vector<std::size_t> rotated = by_options;
    for (std::size_t attempt = 0; attempt < n && best_state->unplaced > 0; ++attempt) {
      std::stable_partition(rotated.begin(), rotated.end(),
                            [&](std::size_t rq) { return !placed[rq]; });
      construct(rotated);
      if (unplaced_count() < best_state->unplaced) {
        improve();
        const State state{occupancy, room, start, placed, unplaced_count(), current_cost()};
        if (state.unplaced < best_state->unplaced ||
            (state.unplaced == best_state->unplaced && state.cost < best_state->cost - kEps)) {
          best_state = state;
        }
      }
    }
  }

  return collect(ctx, best_state->room, best_state->start, best_state->placed);
}

}  // namespace gridbed::sched
