#include "gridbed/analytics/wastage.hpp"

#include <stdexcept>

namespace gridbed::analytics {

WastageResult compute_wastage(std::span<const RoomUsage> rooms, sim::TimeInterval window) {
  if (window.to <= window.from) throw std::invalid_argument("compute_wastage: empty window");
  WastageResult result;
  for (const auto& room : rooms) {
    if (room.occupancy.intervals.empty() || room.occupancy.intervals.front().from > window.from ||
        room.occupancy.intervals.back().to < window.to) {
      throw std::invalid_argument("compute_wastage: occupancy does not cover window for room " +
                                  room.room_id);
    }
    WastageRecord record;
    record.room_id = room.room_id;
    record.window = window;
    const auto idle_spans = room.occupancy.unoccupied_spans(window.from, window.to);
    for (const auto& usage : room.appliances) {
      double kwh = 0.0;
      for (const auto& span : idle_spans) {
        kwh += premises::appliance_energy_kwh(usage.appliance, usage.on_intervals, span);
      }
      if (usage.appliance.label == premises::ApplianceLabel::Light) {
        record.lights_kwh += kwh;
      } else if (usage.appliance.label == premises::ApplianceLabel::ACS) {
        record.acs_kwh += kwh;
      }
    }
    result.records.push_back(std::move(record));
  }
  result.aggregate.rooms = static_cast<int>(result.records.size());
  for (const auto& r : result.records) {
    result.aggregate.mean_lights_kwh += r.lights_kwh;
    result.aggregate.mean_acs_kwh += r.acs_kwh;
    result.aggregate.total_kwh += r.lights_kwh + r.acs_kwh;
  }
  if (result.aggregate.rooms > 0) {
    result.aggregate.mean_lights_kwh /= result.aggregate.rooms;
    result.aggregate.mean_acs_kwh /= result.aggregate.rooms;
  }
  return result;
}

std::pair<double, double> extrapolate_campus_wastage(double mean_lights_kwh, double mean_acs_kwh,
                                                     int room_count, double tariff_sgd_per_kwh) {
  if (room_count < 0) throw std::invalid_argument("room_count must be >= 0");
  if (tariff_sgd_per_kwh <= 0.0) throw std::invalid_argument("tariff must be > 0");
  const double total_kwh = (mean_lights_kwh + mean_acs_kwh) * room_count;
  return {total_kwh, total_kwh * tariff_sgd_per_kwh};
}

}  // namespace gridbed::analytics
