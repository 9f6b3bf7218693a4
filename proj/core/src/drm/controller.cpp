#include "gridbed/drm/controller.hpp"

#include <algorithm>

namespace gridbed::drm {

Controller::Controller(DrmPolicy policy, std::vector<ControllerAppliance> registry)
    : policy_(policy) {
  for (auto& a : registry) registry_.emplace(a.id, std::move(a));
}

void Controller::on_reading(const MeterReading& reading) {
  auto it = latest_.find(reading.unit);
  if (it == latest_.end() || reading.measured_at >= it->second.measured_at) {
    latest_[reading.unit] = reading;
  }
  // A reading that already shows a commanded state confirms the command even
  // if the ack is still in flight (or was lost).
  for (const auto& [id, on] : reading.appliance_states) {
    if (on) {
      pending_on_.erase(id);
      shed_.erase(id);
    } else if (auto pending = pending_off_.find(id); pending != pending_off_.end()) {
      pending_off_.erase(pending);
      if (auto reg = registry_.find(id); reg != registry_.end()) {
        shed_.emplace(id, reg->second.weight);
      }
    }
  }
}

void Controller::on_ack(const std::string& appliance_id, CommandAction action) {
  if (action == CommandAction::SwitchOff) {
    if (pending_off_.erase(appliance_id) > 0) {
      if (auto reg = registry_.find(appliance_id); reg != registry_.end()) {
        shed_.emplace(appliance_id, reg->second.weight);
      }
    }
  } else {
    pending_on_.erase(appliance_id);
    shed_.erase(appliance_id);
  }
}

double Controller::perceived_kw() const {
  double kw = 0.0;
  for (const auto& [unit, reading] : latest_) kw += reading.total_kw;
  return kw;
}

double Controller::effective_kw() const {
  double kw = perceived_kw();
  for (const auto& [id, issued_at] : pending_off_) {
    (void)issued_at;
    if (auto reg = registry_.find(id); reg != registry_.end()) kw -= reg->second.power_kw;
  }
  for (const auto& [id, issued_at] : pending_on_) {
    (void)issued_at;
    if (auto reg = registry_.find(id); reg != registry_.end()) kw += reg->second.power_kw;
  }
  return kw;
}

TickResult Controller::tick(sim::SimTime at) {
  TickResult result;
  if (latest_.empty()) return result;

  const double effective = effective_kw();
  if (effective > policy_.threshold_kw) {
    const double required = effective - policy_.threshold_kw;
    std::vector<ShedCandidate> candidates;
    for (const auto& [id, info] : registry_) {
      if (!info.flexible) continue;
      if (pending_off_.contains(id) || pending_on_.contains(id) || shed_.contains(id)) continue;
      auto unit_it = latest_.find(info.unit);
      if (unit_it == latest_.end()) continue;
      auto state_it = unit_it->second.appliance_states.find(id);
      if (state_it == unit_it->second.appliance_states.end() || !state_it->second) continue;
      candidates.push_back({id, info.power_kw, info.weight});
    }
    ShedSelection selection = select_shed_set(std::move(candidates), required);
    for (const auto& id : selection.appliance_ids) {
      result.commands.push_back({next_command_id_++, id, CommandAction::SwitchOff, at});
      pending_off_.emplace(id, at);
    }
    result.required_kw = required;
    result.shed = std::move(selection);
    return result;
  }

  // Gradual restore: one appliance per tick, most inconvenienced user first,
  // and never one that would push perceived demand back over
  // threshold - hysteresis.
  std::vector<std::pair<std::string, double>> restorable(shed_.begin(), shed_.end());
  std::sort(restorable.begin(), restorable.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [id, weight] : restorable) {
    (void)weight;
    if (pending_on_.contains(id)) continue;
    auto reg = registry_.find(id);
    if (reg == registry_.end()) continue;
    if (effective + reg->second.power_kw <= policy_.threshold_kw - policy_.restore_hysteresis_kw) {
      result.commands.push_back({next_command_id_++, id, CommandAction::SwitchOn, at});
      pending_on_.emplace(id, at);
      result.restored = id;
      break;
    }
  }
  return result;
}

}  // namespace gridbed::drm
