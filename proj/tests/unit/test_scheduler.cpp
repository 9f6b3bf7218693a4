#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gridbed/sched/scheduler.hpp"
#include "gridbed/sim/rng.hpp"

using namespace gridbed;
using sched::MeetingRequest;
using sched::RoomResource;
using sched::ScheduleAssignment;
using sched::ScheduleInstance;

namespace {

ScheduleInstance one_room_instance(std::vector<double> prices, double power_kw = 1.0) {
  ScheduleInstance instance;
  instance.slot_prices = std::move(prices);
  instance.rooms = {{"room1", 10, power_kw, 60}};
  return instance;
}

// Independent brute-force oracle for tiny instances: enumerates every
// placement combination recursively without masks or pruning.
struct TinyOracle {
  const ScheduleInstance* instance;
  double best = std::numeric_limits<double>::infinity();
  bool feasible = false;

  double cost_of(const MeetingRequest& r, const RoomResource& room, int start) const {
    double sum = 0.0;
    for (int s = start; s < start + r.duration_slots; ++s) {
      sum += instance->slot_prices[static_cast<std::size_t>(s)];
    }
    return room.active_power_kw * (room.slot_length_min / 60.0) * sum;
  }

  void search(std::size_t i, std::vector<std::vector<bool>>& busy, double cost) {
    if (i == instance->requests.size()) {
      feasible = true;
      best = std::min(best, cost);
      return;
    }
    const auto& r = instance->requests[i];
    for (std::size_t rm = 0; rm < instance->rooms.size(); ++rm) {
      const auto& room = instance->rooms[rm];
      if (room.capacity < r.attendees) continue;
      for (int start = r.earliest_slot; start + r.duration_slots - 1 <= r.latest_slot; ++start) {
        if (start < 0 || start + r.duration_slots > instance->slots()) continue;
        bool free = true;
        for (int s = start; s < start + r.duration_slots; ++s) {
          free = free && !busy[rm][static_cast<std::size_t>(s)];
        }
        if (!free) continue;
        for (int s = start; s < start + r.duration_slots; ++s) busy[rm][static_cast<std::size_t>(s)] = true;
        search(i + 1, busy, cost + cost_of(r, room, start));
        for (int s = start; s < start + r.duration_slots; ++s) busy[rm][static_cast<std::size_t>(s)] = false;
      }
    }
  }
};

ScheduleInstance random_instance(sim::RngStream& rng) {
  ScheduleInstance instance;
  const int slots = static_cast<int>(rng.uniform_int(8, 12));
  for (int s = 0; s < slots; ++s) instance.slot_prices.push_back(0.1 + rng.uniform() * 0.4);
  const int rooms = static_cast<int>(rng.uniform_int(2, 4));
  for (int r = 0; r < rooms; ++r) {
    instance.rooms.push_back({"room" + std::to_string(r),
                              static_cast<int>(rng.uniform_int(4, 12)),
                              0.5 + rng.uniform() * 3.0, 60});
  }
  const int requests = static_cast<int>(rng.uniform_int(1, 6));
  for (int q = 0; q < requests; ++q) {
    MeetingRequest req;
    req.id = "m" + std::to_string(q);
    req.duration_slots = static_cast<int>(rng.uniform_int(1, 3));
    req.earliest_slot = static_cast<int>(rng.uniform_int(0, slots - req.duration_slots));
    req.latest_slot = static_cast<int>(
        rng.uniform_int(req.earliest_slot + req.duration_slots - 1, slots - 1));
    req.attendees = static_cast<int>(rng.uniform_int(1, 8));
    instance.requests.push_back(req);
  }
  return instance;
}

}  // namespace

TEST_CASE("schedule cost multiplies power, slot hours and price") {
  auto instance = one_room_instance({0.1});
  instance.requests = {{"m1", 1, 0, 0, 2}};
  ScheduleAssignment assignment;
  assignment.placements = {{"m1", "room1", 0}};
  CHECK(sched::schedule_cost(assignment, instance) == doctest::Approx(0.1));

  instance.slot_prices = {0.3};
  CHECK(sched::schedule_cost(assignment, instance) == doctest::Approx(0.3));
}

TEST_CASE("back-to-back meetings accumulate slot prices") {
  auto instance = one_room_instance({0.1, 0.2}, 2.0);
  instance.requests = {{"m1", 1, 0, 1, 2}, {"m2", 1, 0, 1, 2}};
  ScheduleAssignment assignment;
  assignment.placements = {{"m1", "room1", 0}, {"m2", "room1", 1}};
  CHECK(sched::schedule_cost(assignment, instance) == doctest::Approx(0.6));
}

TEST_CASE("schedule cost rejects infeasible assignments") {
  auto instance = one_room_instance({0.1, 0.2});
  instance.requests = {{"m1", 2, 0, 1, 2}, {"m2", 1, 0, 1, 2}};
  ScheduleAssignment overlapping;
  overlapping.placements = {{"m1", "room1", 0}, {"m2", "room1", 1}};
  CHECK_THROWS_AS(sched::schedule_cost(overlapping, instance), std::invalid_argument);

  ScheduleAssignment out_of_window;
  out_of_window.placements = {{"m2", "room1", 0}, {"m1", "room1", 1}};
  CHECK_THROWS_AS(sched::schedule_cost(out_of_window, instance), std::invalid_argument);
}

TEST_CASE("exact solver picks the cheaper slot") {
  auto instance = one_room_instance({0.1, 0.3});
  instance.requests = {{"m1", 1, 0, 1, 2}};
  const auto solution = sched::solve_exact(instance);
  REQUIRE(solution.has_value());
  REQUIRE(solution->placements.size() == 1);
  CHECK(solution->placements[0].start_slot == 0);
  CHECK(solution->objective_sgd == doctest::Approx(0.1));
}

TEST_CASE("exact solver reports infeasibility for impossible capacity") {
  auto instance = one_room_instance({0.1, 0.2});
  instance.rooms[0].capacity = 5;
  instance.requests = {{"m1", 1, 0, 1, 10}};
  CHECK_FALSE(sched::solve_exact(instance).has_value());
}

TEST_CASE("zero requests yield an empty zero-cost assignment") {
  auto instance = one_room_instance({0.1});
  const auto exact = sched::solve_exact(instance);
  REQUIRE(exact.has_value());
  CHECK(exact->placements.empty());
  CHECK(exact->objective_sgd == 0.0);
  const auto heuristic = sched::solve_heuristic(instance);
  CHECK(heuristic.placements.empty());
  CHECK(heuristic.unplaced.empty());
}

TEST_CASE("the exact solver matches an independent brute force on tiny instances") {
  sim::RngRegistry registry(2024);
  auto& rng = registry.register_stream("sched-tiny");
  for (int trial = 0; trial < 60; ++trial) {
    ScheduleInstance instance;
    const int slots = static_cast<int>(rng.uniform_int(3, 6));
    for (int s = 0; s < slots; ++s) instance.slot_prices.push_back(0.1 + rng.uniform() * 0.4);
    const int rooms = static_cast<int>(rng.uniform_int(1, 2));
    for (int r = 0; r < rooms; ++r) {
      instance.rooms.push_back(
          {"r" + std::to_string(r), static_cast<int>(rng.uniform_int(2, 8)),
           0.5 + rng.uniform() * 2.0, 60});
    }
    const int requests = static_cast<int>(rng.uniform_int(1, 3));
    for (int q = 0; q < requests; ++q) {
      MeetingRequest req;
      req.id = "m" + std::to_string(q);
      req.duration_slots = static_cast<int>(rng.uniform_int(1, 2));
      req.earliest_slot = static_cast<int>(rng.uniform_int(0, slots - req.duration_slots));
      req.latest_slot = static_cast<int>(
          rng.uniform_int(req.earliest_slot + req.duration_slots - 1, slots - 1));
      req.attendees = static_cast<int>(rng.uniform_int(1, 6));
      instance.requests.push_back(req);
    }

    TinyOracle oracle{&instance};
    std::vector<std::vector<bool>> busy(instance.rooms.size(),
                                        std::vector<bool>(static_cast<std::size_t>(slots), false));
    oracle.search(0, busy, 0.0);

    const auto solution = sched::solve_exact(instance);
    if (!oracle.feasible) {
      CHECK_FALSE(solution.has_value());
    } else {
      REQUIRE(solution.has_value());
      CHECK(solution->objective_sgd == doctest::Approx(oracle.best).epsilon(1e-9));
      CHECK(sched::schedule_cost(*solution, instance) ==
            doctest::Approx(solution->objective_sgd).epsilon(1e-9));
    }
  }
}

TEST_CASE("heuristic equals exact on a single request") {
  auto instance = one_room_instance({0.4, 0.1, 0.2});
  instance.requests = {{"m1", 1, 0, 2, 2}};
  const auto exact = sched::solve_exact(instance);
  const auto heuristic = sched::solve_heuristic(instance);
  REQUIRE(exact.has_value());
  CHECK(heuristic.unplaced.empty());
  CHECK(heuristic.objective_sgd == doctest::Approx(exact->objective_sgd));
  CHECK(heuristic.placements[0].start_slot == exact->placements[0].start_slot);
}

TEST_CASE("heuristic flags unplaced requests when there are no rooms") {
  ScheduleInstance instance;
  instance.slot_prices = {0.1, 0.2};
  instance.requests = {{"m1", 1, 0, 1, 2}};
  const auto result = sched::solve_heuristic(instance);
  CHECK(result.placements.empty());
  CHECK(result.unplaced == std::vector<std::string>{"m1"});
}

TEST_CASE("exact is never costlier than the heuristic and both stay feasible") {
  sim::RngRegistry registry(31);
  auto& rng = registry.register_stream("sched-pair");
  for (int trial = 0; trial < 100; ++trial) {
    const auto instance = random_instance(rng);
    const auto exact = sched::solve_exact(instance);
    const auto heuristic = sched::solve_heuristic(instance);
    if (exact.has_value()) {
      CHECK(heuristic.unplaced.empty());
      CHECK(exact->objective_sgd <= heuristic.objective_sgd + 1e-9);
      CHECK_NOTHROW(sched::schedule_cost(*exact, instance));
      CHECK_NOTHROW(sched::schedule_cost(heuristic, instance));
    }
  }
}

TEST_CASE("uniform price scaling scales the objective and keeps the argmin") {
  sim::RngRegistry registry(47);
  auto& rng = registry.register_stream("sched-scale");
  for (int trial = 0; trial < 20; ++trial) {
    const auto instance = random_instance(rng);
    auto doubled = instance;
    for (auto& p : doubled.slot_prices) p *= 2.0;
    const auto base = sched::solve_exact(instance);
    const auto scaled = sched::solve_exact(doubled);
    REQUIRE(base.has_value() == scaled.has_value());
    if (base.has_value()) {
      CHECK(scaled->objective_sgd == doctest::Approx(2.0 * base->objective_sgd).epsilon(1e-9));
      REQUIRE(base->placements.size() == scaled->placements.size());
      for (std::size_t i = 0; i < base->placements.size(); ++i) {
        CHECK(base->placements[i].room_id == scaled->placements[i].room_id);
        CHECK(base->placements[i].start_slot == scaled->placements[i].start_slot);
      }
    }
  }
}

TEST_CASE("the exact solver refuses oversized instances") {
  ScheduleInstance instance;
  for (int s = 0; s < 20; ++s) instance.slot_prices.push_back(0.1);
  instance.rooms = {{"room1", 10, 1.0, 60}};
  instance.requests = {{"m1", 1, 0, 19, 2}};
  CHECK_THROWS_AS(sched::solve_exact(instance), std::invalid_argument);
  CHECK_NOTHROW(sched::solve_heuristic(instance));
}

TEST_CASE("the energy objective ignores prices") {
  auto instance = one_room_instance({0.9, 0.1});
  instance.objective = sched::ScheduleObjective::Energy;
  instance.requests = {{"m1", 1, 0, 1, 2}};
  const auto solution = sched::solve_exact(instance);
  REQUIRE(solution.has_value());
  // both slots cost the same energy; lexicographic tie-break picks slot 0
  CHECK(solution->placements[0].start_slot == 0);
  CHECK(solution->objective_sgd == doctest::Approx(1.0));
}
