#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridbed/sim/time.hpp"

namespace gridbed::net {

using NodeId = std::string;

enum class NodeKind {
  SmartMeter,
  DataConcentrator,
  TvwsBaseStation,
  Cloud,
  UHG,
  SmartPlug,
  MPN,
  BleSensor,
  WifiAP,
  ZigBeeRelay,
};

enum class LinkKind { BPL, TVWS, WiFi, ZigBee, ZWave, BLE, Fiber };

const char* to_string(NodeKind kind);
const char* to_string(LinkKind kind);
std::optional<LinkKind> link_kind_from_string(const std::string& name);

// Optional interval with elevated loss/latency, standing in for congestion.
struct CongestionWindow {
  sim::TimeInterval window;
  double loss_multiplier = 1.0;
  double latency_multiplier = 1.0;
};

struct LinkSpec {
  LinkKind kind;
  NodeId a;
  NodeId b;
  int base_latency_ms = 0;
  int jitter_ms = 0;       // uniform half-width around base
  double loss_prob = 0.0;  // sampled independently per hop
  std::optional<CongestionWindow> congestion;
};

struct Node {
  NodeId id;
  NodeKind kind;
  std::string unit;  // owning premises unit, empty for shared infrastructure
};

// Which node kinds a link technology may join (unordered pair).
bool link_kind_allows(LinkKind link, NodeKind a, NodeKind b);

class Topology {
 public:
  void add_node(NodeId id, NodeKind kind, std::string unit = "");
  // Validates endpoint existence and kind compatibility; throws on misuse.
  void add_link(LinkSpec link);
  bool remove_link(const NodeId& a, const NodeId& b);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<LinkSpec>& links() const { return links_; }
  const Node* find_node(const NodeId& id) const;
  const LinkSpec* find_link(const NodeId& a, const NodeId& b) const;

  // Shortest hop path src..dst inclusive; empty when no route exists.
  std::vector<NodeId> route(const NodeId& src, const NodeId& dst) const;

  // Structural checks: unique cloud, meters reach the cloud through a
  // concentrator, in-home devices reach it through a gateway.
  std::vector<std::string> validate() const;

  std::vector<NodeId> nodes_of_kind(NodeKind kind) const;

 private:
  int index_of(const NodeId& id) const;

  std::vector<Node> nodes_;
  std::vector<LinkSpec> links_;
  std::map<NodeId, int> index_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;  // node -> (peer, link)
};

struct LinkParams {
  int base_latency_ms = 0;
  int jitter_ms = 0;
  double loss_prob = 0.0;
};

// Out-of-the-box link parameters. Invented placeholders so scenarios run
// unconfigured, not measured values; scenarios may override any of them.
std::map<LinkKind, LinkParams> default_link_params();

struct HostelTemplate {
  int units = 0;
  // appliance ids per unit; each appliance gets a smart plug on the gateway
  std::map<std::string, std::vector<std::string>> plugs_by_unit;
  std::map<LinkKind, LinkParams> params = default_link_params();
  int mpns_per_unit = 4;  // one per bedroom plus the living room
};

struct OfficeTemplate {
  int rooms = 0;
  std::map<std::string, std::vector<std::string>> plugs_by_room;
  std::map<LinkKind, LinkParams> params = default_link_params();
  int rooms_per_relay = 5;
};

// Residential wiring: per unit a meter, gateway, sensor nodes and plugs;
// meter-BPL-concentrator-TVWS-basestation-Fiber-cloud on the metering side,
// gateway-WiFi-AP-Fiber-cloud on the service side.
Topology build_hostel_topology(const HostelTemplate& spec);

// Office section wiring: one sensor node per room, chained over ZigBee
// relays to a single gateway, which uplinks over WiFi.
Topology build_office_topology(const OfficeTemplate& spec);

// Node id helpers shared by builders and the simulation runner.
NodeId meter_node(const std::string& unit);
NodeId uhg_node(const std::string& unit);
NodeId mpn_node(const std::string& unit, int index);
NodeId plug_node(const std::string& unit, const std::string& appliance);
inline const NodeId kCloudNode = "cloud";
inline const NodeId kOfficeGatewayUnit = "section";

}  // namespace gridbed::net
