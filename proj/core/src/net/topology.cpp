#include "gridbed/net/topology.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace gridbed::net {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::SmartMeter: return "SmartMeter";
    case NodeKind::DataConcentrator: return "DataConcentrator";
    case NodeKind::TvwsBaseStation: return "TvwsBaseStation";
    case NodeKind::Cloud: return "Cloud";
    case NodeKind::UHG: return "UHG";
    case NodeKind::SmartPlug: return "SmartPlug";
    case NodeKind::MPN: return "MPN";
    case NodeKind::BleSensor: return "BleSensor";
    case NodeKind::WifiAP: return "WifiAP";
    case NodeKind::ZigBeeRelay: return "ZigBeeRelay";
  }
  return "?";
}

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::BPL: return "BPL";
    case LinkKind::TVWS: return "TVWS";
    case LinkKind::WiFi: return "WiFi";
    case LinkKind::ZigBee: return "ZigBee";
    case LinkKind::ZWave: return "ZWave";
    case LinkKind::BLE: return "BLE";
    case LinkKind::Fiber: return "Fiber";
  }
  return "?";
}

std::optional<LinkKind> link_kind_from_string(const std::string& name) {
  if (name == "BPL") return LinkKind::BPL;
  if (name == "TVWS") return LinkKind::TVWS;
  if (name == "WiFi") return LinkKind::WiFi;
  if (name == "ZigBee") return LinkKind::ZigBee;
  if (name == "ZWave") return LinkKind::ZWave;
  if (name == "BLE") return LinkKind::BLE;
  if (name == "Fiber") return LinkKind::Fiber;
  return std::nullopt;
}

bool link_kind_allows(LinkKind link, NodeKind a, NodeKind b) {
  auto pair_is = [&](NodeKind x, NodeKind y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  switch (link) {
    case LinkKind::BPL:
      return pair_is(NodeKind::SmartMeter, NodeKind::DataConcentrator);
    case LinkKind::TVWS:
      return pair_is(NodeKind::DataConcentrator, NodeKind::TvwsBaseStation);
    case LinkKind::WiFi:
      return pair_is(NodeKind::UHG, NodeKind::WifiAP);
    case LinkKind::ZigBee:
      return pair_is(NodeKind::MPN, NodeKind::UHG) ||
             pair_is(NodeKind::MPN, NodeKind::ZigBeeRelay) ||
             pair_is(NodeKind::ZigBeeRelay, NodeKind::ZigBeeRelay) ||
             pair_is(NodeKind::ZigBeeRelay, NodeKind::UHG);
    case LinkKind::ZWave:
      return pair_is(NodeKind::SmartPlug, NodeKind::UHG);
    case LinkKind::BLE:
      return pair_is(NodeKind::BleSensor, NodeKind::UHG);
    case LinkKind::Fiber:
      return pair_is(NodeKind::TvwsBaseStation, NodeKind::Cloud) ||
             pair_is(NodeKind::WifiAP, NodeKind::Cloud);
  }
  return false;
}

void Topology::add_node(NodeId id, NodeKind kind, std::string unit) {
  if (index_.contains(id)) throw std::invalid_argument("duplicate node id: " + id);
  index_[id] = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{std::move(id), kind, std::move(unit)});
  adjacency_.emplace_back();
}

void Topology::add_link(LinkSpec link) {
  const int ia = index_of(link.a);
  const int ib = index_of(link.b);
  if (ia < 0) throw std::invalid_argument("link references unknown node: " + link.a);
  if (ib < 0) throw std::invalid_argument("link references unknown node: " + link.b);
  if (ia == ib) throw std::invalid_argument("link endpoints equal: " + link.a);
  if (!link_kind_allows(link.kind, nodes_[ia].kind, nodes_[ib].kind)) {
    throw std::invalid_argument(std::string(to_string(link.kind)) + " link not valid between " +
                                to_string(nodes_[ia].kind) + " and " + to_string(nodes_[ib].kind));
  }
  if (link.loss_prob < 0.0 || link.loss_prob > 1.0) {
    throw std::invalid_argument("loss_prob must be in [0,1]");
  }
  if (link.base_latency_ms < 0 || link.jitter_ms < 0) {
    throw std::invalid_argument("link latencies must be non-negative");
  }
  const int li = static_cast<int>(links_.size());
  links_.push_back(std::move(link));
  adjacency_[ia].emplace_back(ib, li);
  adjacency_[ib].emplace_back(ia, li);
}

bool Topology::remove_link(const NodeId& a, const NodeId& b) {
  const int ia = index_of(a);
  const int ib = index_of(b);
  if (ia < 0 || ib < 0) return false;
  auto match = [&](const LinkSpec& l) {
    return (l.a == a && l.b == b) || (l.a == b && l.b == a);
  };
  auto it = std::find_if(links_.begin(), links_.end(), match);
  if (it == links_.end()) return false;
  const int li = static_cast<int>(it - links_.begin());
  links_.erase(it);
  for (auto& adj : adjacency_) {
    std::erase_if(adj, [&](const auto& e) { return e.second == li; });
    for (auto& e : adj) {
      if (e.second > li) --e.second;
    }
  }
  return true;
}

const Node* Topology::find_node(const NodeId& id) const {
  const int i = index_of(id);
  return i < 0 ? nullptr : &nodes_[i];
}

const LinkSpec* Topology::find_link(const NodeId& a, const NodeId& b) const {
  for (const auto& l : links_) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  }
  return nullptr;
}

std::vector<NodeId> Topology::route(const NodeId& src, const NodeId& dst) const {
  const int s = index_of(src);
  const int d = index_of(dst);
  if (s < 0 || d < 0) return {};
  std::vector<int> parent(nodes_.size(), -1);
  std::deque<int> frontier{s};
  parent[s] = s;
  while (!frontier.empty()) {
    const int cur = frontier.front();
    frontier.pop_front();
    if (cur == d) break;
    for (const auto& [peer, link] : adjacency_[cur]) {
      if (parent[peer] < 0) {
        parent[peer] = cur;
        frontier.push_back(peer);
      }
    }
  }
  if (parent[d] < 0) return {};
  std::vector<NodeId> path;
  for (int cur = d; cur != s; cur = parent[cur]) path.push_back(nodes_[cur].id);
  path.push_back(nodes_[s].id);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::string> Topology::validate() const {
  std::vector<std::string> errors;
  const auto clouds = nodes_of_kind(NodeKind::Cloud);
  if (clouds.empty()) {
    errors.push_back("topology has no cloud node");
    return errors;
  }
  if (clouds.size() > 1) errors.push_back("topology must have exactly one cloud node");
  const NodeId& cloud = clouds.front();

  auto path_contains_kind = [&](const std::vector<NodeId>& path, NodeKind kind) {
    return std::any_of(path.begin(), path.end(), [&](const NodeId& id) {
      return find_node(id)->kind == kind;
    });
  };

  for (const auto& node : nodes_) {
    if (node.id == cloud) continue;
    const auto path = route(node.id, cloud);
    if (path.empty()) {
      errors.push_back("node " + node.id + " has no path to the cloud");
      continue;
    }
    if (node.kind == NodeKind::SmartMeter && !path_contains_kind(path, NodeKind::DataConcentrator)) {
      errors.push_back("meter " + node.id + " does not reach the cloud via a concentrator");
    }
    const bool han_device = node.kind == NodeKind::SmartPlug || node.kind == NodeKind::MPN ||
                            node.kind == NodeKind::BleSensor;
    if (han_device && !path_contains_kind(path, NodeKind::UHG)) {
      errors.push_back("device " + node.id + " does not reach the cloud via a gateway");
    }
  }
  return errors;
}

std::vector<NodeId> Topology::nodes_of_kind(NodeKind kind) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == kind) out.push_back(n.id);
  }
  return out;
}

int Topology::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

std::map<LinkKind, LinkParams> default_link_params() {
  return {
      {LinkKind::BPL, {10, 2, 0.0}},  {LinkKind::TVWS, {30, 6, 0.0}},
      {LinkKind::WiFi, {5, 1, 0.0}},  {LinkKind::ZigBee, {15, 3, 0.0}},
      {LinkKind::ZWave, {20, 4, 0.0}}, {LinkKind::BLE, {10, 2, 0.0}},
      {LinkKind::Fiber, {2, 0, 0.0}},
  };
}

NodeId meter_node(const std::string& unit) { return "meter:" + unit; }
NodeId uhg_node(const std::string& unit) { return "uhg:" + unit; }
NodeId mpn_node(const std::string& unit, int index) {
  return "mpn:" + unit + ":" + std::to_string(index);
}
NodeId plug_node(const std::string& unit, const std::string& appliance) {
  return "plug:" + unit + ":" + appliance;
}

namespace {

LinkSpec make_link(LinkKind kind, NodeId a, NodeId b, const std::map<LinkKind, LinkParams>& params) {
  LinkSpec link;
  link.kind = kind;
  link.a = std::move(a);
  link.b = std::move(b);
  auto it = params.find(kind);
  if (it != params.end()) {
    link.base_latency_ms = it->second.base_latency_ms;
    link.jitter_ms = it->second.jitter_ms;
    link.loss_prob = it->second.loss_prob;
  }
  return link;
}

void add_shared_backhaul(Topology& topo, const std::map<LinkKind, LinkParams>& params,
                         bool with_metering) {
  topo.add_node(kCloudNode, NodeKind::Cloud);
  topo.add_node("wifi-ap", NodeKind::WifiAP);
  topo.add_link(make_link(LinkKind::Fiber, "wifi-ap", kCloudNode, params));
  if (with_metering) {
    topo.add_node("concentrator", NodeKind::DataConcentrator);
    topo.add_node("tvws-bs", NodeKind::TvwsBaseStation);
    topo.add_link(make_link(LinkKind::TVWS, "concentrator", "tvws-bs", params));
    topo.add_link(make_link(LinkKind::Fiber, "tvws-bs", kCloudNode, params));
  }
}

}  // namespace

Topology build_hostel_topology(const HostelTemplate& spec) {
  if (spec.units <= 0) throw std::invalid_argument("no premises: hostel template needs units > 0");
  Topology topo;
  add_shared_backhaul(topo, spec.params, /*with_metering=*/true);
  for (const auto& [unit, _] : spec.plugs_by_unit) (void)unit;  // ids validated below
  for (const auto& [unit, plugs] : spec.plugs_by_unit) {
    (void)plugs;
    if (unit.empty()) throw std::invalid_argument("empty unit id in hostel template");
  }
  // Unit ids are provided by the caller through plugs_by_unit keys plus any
  // plug-less units implied by the count; builders require explicit ids.
  if (static_cast<int>(spec.plugs_by_unit.size()) != spec.units) {
    throw std::invalid_argument("hostel template: plugs_by_unit must list every unit");
  }
  for (const auto& [unit, plugs] : spec.plugs_by_unit) {
    topo.add_node(meter_node(unit), NodeKind::SmartMeter, unit);
    topo.add_node(uhg_node(unit), NodeKind::UHG, unit);
    topo.add_link(make_link(LinkKind::BPL, meter_node(unit), "concentrator", spec.params));
    topo.add_link(make_link(LinkKind::WiFi, uhg_node(unit), "wifi-ap", spec.params));
    for (int m = 1; m <= spec.mpns_per_unit; ++m) {
      topo.add_node(mpn_node(unit, m), NodeKind::MPN, unit);
      topo.add_link(make_link(LinkKind::ZigBee, mpn_node(unit, m), uhg_node(unit), spec.params));
    }
    for (const auto& appliance : plugs) {
      topo.add_node(plug_node(unit, appliance), NodeKind::SmartPlug, unit);
      topo.add_link(make_link(LinkKind::ZWave, plug_node(unit, appliance), uhg_node(unit), spec.params));
    }
  }
  return topo;
}

Topology build_office_topology(const OfficeTemplate& spec) {
  if (spec.rooms <= 0) throw std::invalid_argument("no premises: office template needs rooms > 0");
  if (static_cast<int>(spec.plugs_by_room.size()) != spec.rooms) {
    throw std::invalid_argument("office template: plugs_by_room must list every room");
  }
  Topology topo;
  add_shared_backhaul(topo, spec.params, /*with_metering=*/false);
  const NodeId gateway = uhg_node(kOfficeGatewayUnit);
  topo.add_node(gateway, NodeKind::UHG, kOfficeGatewayUnit);
  topo.add_link(make_link(LinkKind::WiFi, gateway, "wifi-ap", spec.params));

  const int per_relay = std::max(1, spec.rooms_per_relay);
  const int relays = (spec.rooms + per_relay - 1) / per_relay;
  for (int r = 1; r <= relays; ++r) {
    topo.add_node("relay:" + std::to_string(r), NodeKind::ZigBeeRelay);
    const NodeId up = r == 1 ? gateway : "relay:" + std::to_string(r - 1);
    topo.add_link(make_link(LinkKind::ZigBee, "relay:" + std::to_string(r), up, spec.params));
  }
  int room_index = 0;
  for (const auto& [room, plugs] : spec.plugs_by_room) {
    const int relay = room_index / per_relay + 1;
    topo.add_node(mpn_node(room, 1), NodeKind::MPN, room);
    topo.add_link(make_link(LinkKind::ZigBee, mpn_node(room, 1),
                            "relay:" + std::to_string(relay), spec.params));
    for (const auto& appliance : plugs) {
      topo.add_node(plug_node(room, appliance), NodeKind::SmartPlug, room);
      topo.add_link(make_link(LinkKind::ZWave, plug_node(room, appliance), gateway, spec.params));
    }
    ++room_index;
  }
  return topo;
}

}  // namespace gridbed::net
