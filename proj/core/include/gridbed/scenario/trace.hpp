#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridbed/drm/policy.hpp"
#include "gridbed/net/transport.hpp"
#include "gridbed/scenario/scenario.hpp"
#include "gridbed/sim/time.hpp"

namespace gridbed::scenario {

struct DemandLine {
  double base_kw = 0.0;
  double uncontrolled_kw = 0.0;
  double true_kw = 0.0;
  std::optional<double> perceived_kw;
};

struct CommandLine {
  enum class Phase { Issued, Applied, Lost };
  Phase phase = Phase::Issued;
  std::uint64_t command_id = 0;
  std::string appliance;
  drm::CommandAction action = drm::CommandAction::SwitchOff;
  sim::SimTime issued_at = 0;
  std::optional<sim::SimTime> applied_at;
  std::string lost_hop;
};

struct MessageLine {
  enum class Phase { Delivered, Lost };
  Phase phase = Phase::Delivered;
  std::uint64_t message_id = 0;
  std::string src;
  std::string dst;
  net::MessageKind kind = net::MessageKind::MeterReading;
  int size_bytes = 0;
  sim::SimTime created_at = 0;
  sim::SimTime latency_ms = 0;
  std::string lost_hop;
};

struct SensorLine {
  std::string mpn;
  std::string unit;
  bool motion = false;
  double noise_db = 0.0;
  double temp_c = 0.0;
  double humidity_pct = 0.0;
  double lux = 0.0;
};

struct PriceLine {
  double price_sgd_per_kwh = 0.0;
};

struct ShedLine {
  enum class Action { Shed, Restore, Insufficient };
  Action action = Action::Shed;
  std::vector<std::string> appliances;
  double shed_kw = 0.0;
  double required_kw = 0.0;
  double total_inconvenience = 0.0;
};

using TracePayload =
    std::variant<DemandLine, CommandLine, MessageLine, SensorLine, PriceLine, ShedLine>;

struct TraceLine {
  sim::SimTime at = 0;
  std::uint64_t seq = 0;
  TracePayload payload;

  TraceCategory category() const;
};

struct RunInfo {
  std::uint64_t events_processed = 0;
  sim::SimTime final_time = 0;
};

// Streaming JSONL writer: one metadata line carrying the full normalized
// scenario, the event lines in (at, seq) order, then an end marker with the
// line count so truncation is detectable. Keeps an FNV-1a 64 hash of every
// byte written.
class TraceWriter {
 public:
  // Passing an empty path keeps the trace in memory only.
  TraceWriter(const ScenarioSpec& scenario, const std::string& file_path);
  ~TraceWriter();

  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  // Honors the scenario's trace category filter.
  void emit(TraceLine line);
  void finish(const RunInfo& info);

  const std::vector<TraceLine>& lines() const { return lines_; }
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;
  std::uint64_t next_seq() const { return next_seq_; }

 private:
  struct Impl;
  Impl* impl_;
  std::vector<TraceLine> lines_;
  std::uint64_t hash_;
  std::uint64_t next_seq_ = 0;
  sim::SimTime last_at_ = 0;
  bool finished_ = false;
};

struct TraceDocument {
  ScenarioSpec scenario;
  std::vector<TraceLine> lines;
  RunInfo run;
  std::uint64_t file_hash = 0;
};

class TraceError : public std::runtime_error {
 public:
  explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

// Throws TraceError("truncated trace") when the end marker or metadata line
// is missing or the line count disagrees.
TraceDocument read_trace_file(const std::string& path);

std::uint64_t fnv1a64_bytes(std::string_view bytes, std::uint64_t seed = 1469598103934665603ULL);
std::string hash_hex(std::uint64_t hash);

}  // namespace gridbed::scenario
