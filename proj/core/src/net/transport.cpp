#include "gridbed/net/transport.hpp"

#include <algorithm>
#include <cmath>

namespace gridbed::net {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::MeterReading: return "MeterReading";
    case MessageKind::SensorSample: return "SensorSample";
    case MessageKind::ControlCommand: return "ControlCommand";
    case MessageKind::PriceSignal: return "PriceSignal";
    case MessageKind::Ack: return "Ack";
  }
  return "?";
}

std::string Transport::link_stream_id(const NodeId& a, const NodeId& b) {
  return a < b ? "link:" + a + "|" + b : "link:" + b + "|" + a;
}

Transport::Transport(const Topology& topology, sim::Engine& engine)
    : topology_(topology), engine_(engine) {
  for (const auto& link : topology_.links()) {
    engine_.rng().register_stream(link_stream_id(link.a, link.b));
  }
}

namespace {

struct HopSample {
  bool lost = false;
  sim::SimTime delay_ms = 0;
};

// Order matters for reproducibility: one loss draw always, one jitter draw
// only when the hop survives and the link has jitter.
HopSample sample_hop(const LinkSpec& link, sim::SimTime entry_time, sim::RngStream& stream) {
  double loss = link.loss_prob;
  double latency = static_cast<double>(link.base_latency_ms);
  if (link.congestion && link.congestion->window.contains(entry_time)) {
    loss = std::min(1.0, loss * link.congestion->loss_multiplier);
    latency *= link.congestion->latency_multiplier;
  }
  HopSample out;
  if (stream.uniform() < loss) {
    out.lost = true;
    return out;
  }
  sim::SimTime delay = std::llround(latency);
  if (link.jitter_ms > 0) {
    delay += stream.uniform_int(-link.jitter_ms, link.jitter_ms);
  }
  out.delay_ms = std::max<sim::SimTime>(0, delay);
  return out;
}

}  // namespace

TransportOutcome Transport::send(Message msg, DeliveryFn on_delivery, LossFn on_loss) {
  const auto path = topology_.route(msg.src, msg.dst);
  if (path.empty()) throw NoRouteError(msg.src, msg.dst);

  TransportOutcome outcome;
  sim::SimTime t = msg.created_at;
  outcome.hop_trace.emplace_back(path.front(), t);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const LinkSpec* link = topology_.find_link(path[i], path[i + 1]);
    auto& stream = engine_.rng().stream(link_stream_id(link->a, link->b));
    const HopSample hop = sample_hop(*link, t, stream);
    if (hop.lost) {
      outcome.delivered = false;
      outcome.lost_at = path[i + 1];
      outcome.lost_time = t;
      msg.hop_trace = outcome.hop_trace;
      if (on_loss) {
        engine_.schedule(t, sim::EventKind::MessageDelivery,
                         [msg, lost_at = outcome.lost_at, fn = std::move(on_loss)](
                             sim::Engine& eng) { fn(eng, msg, lost_at); });
      }
      return outcome;
    }
    t += hop.delay_ms;
    outcome.hop_trace.emplace_back(path[i + 1], t);
  }

  outcome.delivered = true;
  outcome.delivered_at = t;
  msg.delivered_at = t;
  msg.hop_trace = outcome.hop_trace;
  engine_.schedule(t, sim::EventKind::MessageDelivery,
                   [msg = std::move(msg), fn = std::move(on_delivery)](sim::Engine& eng) {
                     if (fn) fn(eng, msg);
                   });
  return outcome;
}

PathStats Transport::path_latency_stats(const NodeId& src, const NodeId& dst, int samples) {
  if (samples < 1) throw std::invalid_argument("path_latency_stats: samples must be >= 1");
  const auto path = topology_.route(src, dst);
  if (path.empty()) throw NoRouteError(src, dst);

  std::vector<const LinkSpec*> links;
  std::vector<sim::RngStream*> streams;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const LinkSpec* link = topology_.find_link(path[i], path[i + 1]);
    links.push_back(link);
    streams.push_back(&engine_.rng().register_stream("pathstats:" + link_stream_id(link->a, link->b)));
  }

  std::vector<double> latencies;
  latencies.reserve(static_cast<std::size_t>(samples));
  int lost = 0;
  for (int s = 0; s < samples; ++s) {
    sim::SimTime t = 0;
    bool dropped = false;
    for (std::size_t i = 0; i < links.size(); ++i) {
      const LinkSpec nominal = [&] {
        LinkSpec l = *links[i];
        l.congestion.reset();
        return l;
      }();
      const HopSample hop = sample_hop(nominal, t, *streams[i]);
      if (hop.lost) {
        dropped = true;
        break;
      }
      t += hop.delay_ms;
    }
    if (dropped) {
      ++lost;
    } else {
      latencies.push_back(static_cast<double>(t));
    }
  }

  PathStats stats;
  stats.loss_rate = static_cast<double>(lost) / samples;
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double v : latencies) sum += v;
    stats.mean_ms = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(latencies.size())));
    stats.p95_ms = latencies[std::max<std::size_t>(rank, 1) - 1];
  }
  return stats;
}

}  // namespace gridbed::net
