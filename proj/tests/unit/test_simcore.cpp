#include <doctest.h>

#include <algorithm>
#include <vector>

#include "gridbed/sim/engine.hpp"
#include "gridbed/sim/rng.hpp"
#include "gridbed/sim/time.hpp"

using namespace gridbed;

TEST_CASE("schedule at the current time fires within the same run") {
  sim::Engine engine(1);
  std::vector<int> order;
  engine.schedule(0, sim::EventKind::LoadChange, [&](sim::Engine&) { order.push_back(1); });
  engine.run_until(10);
  CHECK(order == std::vector<int>{1});
}

TEST_CASE("events at the same instant fire in scheduling order") {
  sim::Engine engine(1);
  std::vector<int> order;
  engine.schedule(5, sim::EventKind::LoadChange, [&](sim::Engine&) { order.push_back(1); });
  engine.schedule(5, sim::EventKind::LoadChange, [&](sim::Engine&) { order.push_back(2); });
  engine.schedule(5, sim::EventKind::LoadChange, [&](sim::Engine&) { order.push_back(3); });
  engine.run_until(5);
  CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("an event 54 days out is accepted and fires") {
  const sim::SimTime horizon = sim::days(54);
  CHECK(horizon == 4'665'600'000);
  sim::Engine engine(1);
  bool fired = false;
  engine.schedule(horizon, sim::EventKind::LoadChange, [&](sim::Engine&) { fired = true; });
  const auto summary = engine.run_until(horizon);
  CHECK(fired);
  CHECK(summary.events_processed == 1);
  CHECK(summary.final_time == horizon);
}

TEST_CASE("scheduling in the past is a logic error") {
  sim::Engine engine(1);
  engine.schedule(10, sim::EventKind::LoadChange, [](sim::Engine&) {});
  engine.run_until(10);
  CHECK_THROWS_AS(engine.schedule(5, sim::EventKind::LoadChange, [](sim::Engine&) {}),
                  std::logic_error);
}

TEST_CASE("run_until with an empty queue advances the clock to the horizon") {
  sim::Engine engine(1);
  const auto summary = engine.run_until(1000);
  CHECK(summary.events_processed == 0);
  CHECK(summary.final_time == 1000);
  CHECK(engine.now() == 1000);
}

TEST_CASE("run_until processes only events at or before the horizon") {
  sim::Engine engine(1);
  int fired = 0;
  for (sim::SimTime t : {1, 2, 3}) {
    engine.schedule(t, sim::EventKind::LoadChange, [&](sim::Engine&) { ++fired; });
  }
  const auto summary = engine.run_until(2);
  CHECK(fired == 2);
  CHECK(summary.events_processed == 2);
  CHECK(summary.final_time == 2);
  engine.run_until(3);
  CHECK(fired == 3);
}

TEST_CASE("cancelled events never fire") {
  sim::Engine engine(1);
  int fired = 0;
  const auto handle = engine.schedule(5, sim::EventKind::LoadChange, [&](sim::Engine&) { ++fired; });
  engine.schedule(6, sim::EventKind::LoadChange, [&](sim::Engine&) { ++fired; });
  CHECK(engine.cancel(handle));
  CHECK_FALSE(engine.cancel(handle));
  const auto summary = engine.run_until(10);
  CHECK(fired == 1);
  CHECK(summary.events_processed == 1);
}

TEST_CASE("dispatch order equals ascending (fire_at, sequence) for random schedules") {
  sim::Engine engine(99);
  auto& rng = engine.rng().register_stream("gen");
  struct Seen {
    sim::SimTime at;
    std::uint64_t seq;
  };
  std::vector<Seen> dispatched;
  std::vector<std::pair<sim::SimTime, std::uint64_t>> scheduled;
  for (int i = 0; i < 500; ++i) {
    const auto at = rng.uniform_int(0, 50);
    const auto handle = engine.schedule(at, sim::EventKind::LoadChange, [&, at, i](sim::Engine& e) {
      CHECK(e.now() == at);  // never dispatch behind the clock
      dispatched.push_back({at, scheduled[static_cast<std::size_t>(i)].second});
    });
    scheduled.emplace_back(at, handle);
  }
  engine.run_until(50);
  REQUIRE(dispatched.size() == 500);
  for (std::size_t i = 1; i < dispatched.size(); ++i) {
    const bool ordered = dispatched[i - 1].at < dispatched[i].at ||
                         (dispatched[i - 1].at == dispatched[i].at &&
                          dispatched[i - 1].seq < dispatched[i].seq);
    CHECK(ordered);
  }
}

TEST_CASE("same seed and stream id replay the same sequence") {
  sim::RngRegistry a(42), b(42);
  auto& sa = a.register_stream("link:x|y");
  auto& sb = b.register_stream("link:x|y");
  for (int i = 0; i < 100; ++i) CHECK(sa.uniform() == sb.uniform());
}

TEST_CASE("stream derivation ignores registration order") {
  sim::RngRegistry a(42), b(42);
  a.register_stream("first");
  auto& target_a = a.register_stream("target");
  auto& target_b = b.register_stream("target");  // no "first" registered here
  for (int i = 0; i < 50; ++i) CHECK(target_a.next_u64() == target_b.next_u64());
}

TEST_CASE("different stream ids under one seed diverge") {
  sim::RngRegistry registry(42);
  auto& a = registry.register_stream("alpha");
  auto& b = registry.register_stream("beta");
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    if (a.uniform() == b.uniform()) ++equal;
  }
  CHECK(equal < 5);
}

TEST_CASE("uniform draws stay in [0,1) with a sane mean") {
  sim::RngRegistry registry(7);
  auto& stream = registry.register_stream("smoke");
  double sum = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const double u = stream.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double mean = sum / 10'000.0;
  CHECK(mean > 0.48);
  CHECK(mean < 0.52);
}

TEST_CASE("uniform_int covers its inclusive range") {
  sim::RngRegistry registry(7);
  auto& stream = registry.register_stream("ints");
  bool low = false, high = false;
  for (int i = 0; i < 2000; ++i) {
    const auto v = stream.uniform_int(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    low |= v == -3;
    high |= v == 3;
  }
  CHECK(low);
  CHECK(high);
}

TEST_CASE("drawing from an unregistered stream is an error") {
  sim::RngRegistry registry(7);
  CHECK_THROWS_AS(registry.stream("missing"), sim::UnknownStreamError);
}
