#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gridbed::sim {

class UnknownStreamError : public std::runtime_error {
 public:
  explicit UnknownStreamError(std::string_view id)
      : std::runtime_error("unknown rng stream: " + std::string(id)) {}
};

// One named random stream per stochastic component (one per link, one per
// sensor, ...). The state is derived from (seed, stream_id) alone, so adding
// or removing other streams never perturbs the draws of an existing one, and
// the same (seed, stream_id) yields the same sequence on every platform.
//
// Draws are built from raw 64-bit xoshiro256++ output instead of <random>
// distributions, whose results are implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t next_u64();

  // Uniform real in [0, 1).
  double uniform();

  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal(double mean, double stddev);

  const std::string& id() const { return id_; }

 private:
  std::uint64_t state_[4];
  std::string id_;
};

class RngRegistry {
 public:
  explicit RngRegistry(std::uint64_t seed) : seed_(seed) {}

  // Idempotent; returns the existing stream if already registered.
  RngStream& register_stream(std::string_view id);

  // Throws UnknownStreamError for ids that were never registered.
  RngStream& stream(std::string_view id);

  bool has(std::string_view id) const { return streams_.contains(std::string(id)); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::map<std::string, RngStream, std::less<>> streams_;
};

}  // namespace gridbed::sim
