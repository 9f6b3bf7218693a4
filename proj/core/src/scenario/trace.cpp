#include "gridbed/scenario/trace.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridbed::scenario {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a64_bytes(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string out = "fnv1a:";
  for (int shift = 60; shift >= 0; shift -= 4) out.push_back(digits[(hash >> shift) & 0xF]);
  return out;
}

TraceCategory TraceLine::category() const {
  switch (payload.index()) {
    case 0: return TraceCategory::Demand;
    case 1: return TraceCategory::Command;
    case 2: return TraceCategory::Message;
    case 3: return TraceCategory::Sensor;
    case 4: return TraceCategory::Price;
    default: return TraceCategory::Shed;
  }
}

namespace {

json payload_to_json(const TraceLine& line) {
  json j;
  j["at"] = line.at;
  j["seq"] = line.seq;
  j["cat"] = to_string(line.category());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DemandLine>) {
          j["base_kw"] = p.base_kw;
          j["uncontrolled_kw"] = p.uncontrolled_kw;
          j["true_kw"] = p.true_kw;
          if (p.perceived_kw) {
            j["perceived_kw"] = *p.perceived_kw;
          } else {
            j["perceived_kw"] = nullptr;
          }
        } else if constexpr (std::is_same_v<T, CommandLine>) {
          j["phase"] = p.phase == CommandLine::Phase::Issued    ? "issued"
                       : p.phase == CommandLine::Phase::Applied ? "applied"
                                                                : "lost";
          j["command_id"] = p.command_id;
          j["appliance"] = p.appliance;
          j["action"] = drm::to_string(p.action);
          j["issued_at"] = p.issued_at;
          if (p.applied_at) j["applied_at"] = *p.applied_at;
          if (!p.lost_hop.empty()) j["lost_hop"] = p.lost_hop;
        } else if constexpr (std::is_same_v<T, MessageLine>) {
          j["phase"] = p.phase == MessageLine::Phase::Delivered ? "delivered" : "lost";
          j["message_id"] = p.message_id;
          j["src"] = p.src;
          j["dst"] = p.dst;
          j["kind"] = net::to_string(p.kind);
          j["size_bytes"] = p.size_bytes;
          j["created_at"] = p.created_at;
          if (p.phase == MessageLine::Phase::Delivered) {
            j["latency_ms"] = p.latency_ms;
          } else {
            j["lost_hop"] = p.lost_hop;
          }
        } else if constexpr (std::is_same_v<T, SensorLine>) {
          j["mpn"] = p.mpn;
          j["unit"] = p.unit;
          j["motion"] = p.motion;
          j["noise_db"] = p.noise_db;
          j["temp_c"] = p.temp_c;
          j["humidity_pct"] = p.humidity_pct;
          j["lux"] = p.lux;
        } else if constexpr (std::is_same_v<T, PriceLine>) {
          j["price_sgd_per_kwh"] = p.price_sgd_per_kwh;
        } else {
          j["action"] = p.action == ShedLine::Action::Shed      ? "shed"
                        : p.action == ShedLine::Action::Restore ? "restore"
                                                                : "insufficient";
          j["appliances"] = p.appliances;
          j["shed_kw"] = p.shed_kw;
          j["required_kw"] = p.required_kw;
          j["total_inconvenience"] = p.total_inconvenience;
        }
      },
      line.payload);
  return j;
}

TraceLine payload_from_json(const json& j) {
  TraceLine line;
  line.at = j.at("at").get<sim::SimTime>();
  line.seq = j.at("seq").get<std::uint64_t>();
  const auto cat = j.at("cat").get<std::string>();
  if (cat == "Demand") {
    DemandLine p;
    p.base_kw = j.at("base_kw").get<double>();
    p.uncontrolled_kw = j.at("uncontrolled_kw").get<double>();
    p.true_kw = j.at("true_kw").get<double>();
    if (!j.at("perceived_kw").is_null()) p.perceived_kw = j.at("perceived_kw").get<double>();
    line.payload = p;
  } else if (cat == "Command") {
    CommandLine p;
    const auto phase = j.at("phase").get<std::string>();
    p.phase = phase == "issued"    ? CommandLine::Phase::Issued
              : phase == "applied" ? CommandLine::Phase::Applied
                                   : CommandLine::Phase::Lost;
    p.command_id = j.at("command_id").get<std::uint64_t>();
    p.appliance = j.at("appliance").get<std::string>();
    p.action = j.at("action").get<std::string>() == "SwitchOff" ? drm::CommandAction::SwitchOff
                                                                : drm::CommandAction::SwitchOn;
    p.issued_at = j.at("issued_at").get<sim::SimTime>();
    if (j.contains("applied_at")) p.applied_at = j.at("applied_at").get<sim::SimTime>();
    if (j.contains("lost_hop")) p.lost_hop = j.at("lost_hop").get<std::string>();
    line.payload = p;
  } else if (cat == "Message") {
    MessageLine p;
    p.phase = j.at("phase").get<std::string>() == "delivered" ? MessageLine::Phase::Delivered
                                                              : MessageLine::Phase::Lost;
    p.message_id = j.at("message_id").get<std::uint64_t>();
    p.src = j.at("src").get<std::string>();
    p.dst = j.at("dst").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    for (auto k : {net::MessageKind::MeterReading, net::MessageKind::SensorSample,
                   net::MessageKind::ControlCommand, net::MessageKind::PriceSignal,
                   net::MessageKind::Ack}) {
      if (kind == net::to_string(k)) p.kind = k;
    }
    p.size_bytes = j.at("size_bytes").get<int>();
    p.created_at = j.at("created_at").get<sim::SimTime>();
    if (j.contains("latency_ms")) p.latency_ms = j.at("latency_ms").get<sim::SimTime>();
    if (j.contains("lost_hop")) p.lost_hop = j.at("lost_hop").get<std::string>();
    line.payload = p;
  } else if (cat == "Sensor") {
    SensorLine p;
    p.mpn = j.at("mpn").get<std::string>();
    p.unit = j.at("unit").get<std::string>();
    p.motion = j.at("motion").get<bool>();
    p.noise_db = j.at("noise_db").get<double>();
    p.temp_c = j.at("temp_c").get<double>();
    p.humidity_pct = j.at("humidity_pct").get<double>();
    p.lux = j.at("lux").get<double>();
    line.payload = p;
  } else if (cat == "Price") {
    line.payload = PriceLine{j.at("price_sgd_per_kwh").get<double>()};
  } else if (cat == "Shed") {
    ShedLine p;
    const auto action = j.at("action").get<std::string>();
    p.action = action == "shed"      ? ShedLine::Action::Shed
               : action == "restore" ? ShedLine::Action::Restore
                                     : ShedLine::Action::Insufficient;
    p.appliances = j.at("appliances").get<std::vector<std::string>>();
    p.shed_kw = j.at("shed_kw").get<double>();
    p.required_kw = j.at("required_kw").get<double>();
    p.total_inconvenience = j.at("total_inconvenience").get<double>();
    line.payload = p;
  } else {
    throw TraceError("unknown trace category: " + cat);
  }
  return line;
}

}  // namespace

struct TraceWriter::Impl {
  std::ofstream file;
  bool to_file = false;
  std::set<TraceCategory> categories;
  std::uint64_t written_lines = 0;
};

TraceWriter::TraceWriter(const ScenarioSpec& scenario, const std::string& file_path)
    : impl_(new Impl), hash_(1469598103934665603ULL) {
  impl_->categories = scenario.output.categories;
  if (!file_path.empty()) {
    impl_->file.open(file_path, std::ios::binary | std::ios::trunc);
    if (!impl_->file) throw TraceError("cannot open trace file for writing: " + file_path);
    impl_->to_file = true;
  }
  json meta;
  meta["kind"] = "meta";
  meta["schema_version"] = kSchemaVersion;
  meta["scenario"] = json::parse(serialize_scenario(scenario));
  const std::string text = meta.dump() + "\n";
  hash_ = fnv1a64_bytes(text, hash_);
  if (impl_->to_file) impl_->file << text;
}

TraceWriter::~TraceWriter() { delete impl_; }

void TraceWriter::emit(TraceLine line) {
  if (finished_) throw TraceError("emit after finish");
  if (line.at < last_at_) throw TraceError("trace lines must be time-ordered");
  last_at_ = line.at;
  line.seq = next_seq_++;
  if (!impl_->categories.contains(line.category())) return;
  const std::string text = payload_to_json(line).dump() + "\n";
  hash_ = fnv1a64_bytes(text, hash_);
  ++impl_->written_lines;
  if (impl_->to_file) impl_->file << text;
  lines_.push_back(std::move(line));
}

void TraceWriter::finish(const RunInfo& info) {
  if (finished_) return;
  finished_ = true;
  json end;
  end["kind"] = "end";
  end["at"] = info.final_time;
  end["lines"] = impl_->written_lines;
  end["events_processed"] = info.events_processed;
  const std::string text = end.dump() + "\n";
  hash_ = fnv1a64_bytes(text, hash_);
  if (impl_->to_file) {
    impl_->file << text;
    impl_->file.flush();
  }
}

std::string TraceWriter::hash_hex() const { return scenario::hash_hex(hash_); }

TraceDocument read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file: " + path);

  TraceDocument doc;
  std::string line;
  std::uint64_t hash = 1469598103934665603ULL;
  bool have_meta = false;
  bool have_end = false;
  std::uint64_t expected_lines = 0;
  std::uint64_t seen_lines = 0;

  while (std::getline(in, line)) {
    hash = fnv1a64_bytes(line + "\n", hash);
    json j;
    try {
      j = json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw TraceError("truncated trace");
    }
    if (j.contains("kind") && j.at("kind").is_string()) {
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "meta") {
        doc.scenario = parse_scenario(j.at("scenario").dump());
        have_meta = true;
        continue;
      }
      if (kind == "end") {
        have_end = true;
        expected_lines = j.at("lines").get<std::uint64_t>();
        doc.run.final_time = j.at("at").get<sim::SimTime>();
        doc.run.events_processed = j.at("events_processed").get<std::uint64_t>();
        continue;
      }
    }
    if (have_end) throw TraceError("trace has lines after the end marker");
    doc.lines.push_back(payload_from_json(j));
    ++seen_lines;
  }
  if (!have_meta || !have_end || seen_lines != expected_lines) {
    throw TraceError("truncated trace");
  }
  doc.file_hash = hash;
  return doc;
}

}  // namespace gridbed::scenario
