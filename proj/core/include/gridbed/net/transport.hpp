#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridbed/net/topology.hpp"
#include "gridbed/sim/engine.hpp"

namespace gridbed::net {

enum class MessageKind { MeterReading, SensorSample, ControlCommand, PriceSignal, Ack };

const char* to_string(MessageKind kind);

struct Message {
  std::uint64_t id = 0;
  NodeId src;
  NodeId dst;
  MessageKind kind = MessageKind::MeterReading;
  int size_bytes = 1;
  sim::SimTime created_at = 0;
  std::optional<sim::SimTime> delivered_at;       // absent when lost
  std::vector<std::pair<NodeId, sim::SimTime>> hop_trace;
};

struct TransportOutcome {
  bool delivered = false;
  sim::SimTime delivered_at = 0;
  NodeId lost_at;       // first dropping hop (receiving endpoint)
  sim::SimTime lost_time = 0;
  std::vector<std::pair<NodeId, sim::SimTime>> hop_trace;
};

struct PathStats {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double loss_rate = 0.0;
};

class NoRouteError : public std::runtime_error {
 public:
  NoRouteError(const NodeId& src, const NodeId& dst)
      : std::runtime_error("no route from " + src + " to " + dst) {}
};

// Hop-by-hop transport over a static topology. Per hop, survival is a
// Bernoulli draw on the link's own stream and delay is base latency plus a
// uniform integer jitter in [-j, +j], clamped at zero. Message sizes are
// carried for reporting only; they do not slow transport down.
class Transport {
 public:
  using DeliveryFn = std::function<void(sim::Engine&, const Message&)>;
  using LossFn = std::function<void(sim::Engine&, const Message&, const NodeId& lost_at)>;

  Transport(const Topology& topology, sim::Engine& engine);

  // Samples the whole path immediately and schedules the delivery (or loss
  // bookkeeping) event. msg.created_at must equal engine.now().
  TransportOutcome send(Message msg, DeliveryFn on_delivery, LossFn on_loss = {});

  // Monte-Carlo estimate over dedicated stat streams; deterministic per seed
  // and independent of simulation traffic. Congestion windows are ignored
  // (steady-state view). p95 covers delivered samples only.
  PathStats path_latency_stats(const NodeId& src, const NodeId& dst, int samples);

  static std::string link_stream_id(const NodeId& a, const NodeId& b);

  const Topology& topology() const { return topology_; }

 private:
  const Topology& topology_;
  sim::Engine& engine_;
};

}  // namespace gridbed::net
