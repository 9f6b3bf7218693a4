#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridbed/premises/premises.hpp"

namespace gridbed::analytics {

// Energy a room's lights and conditioning spent while nobody was there.
struct WastageRecord {
  std::string room_id;
  double lights_kwh = 0.0;
  double acs_kwh = 0.0;
  sim::TimeInterval window;
};

struct WastageAggregate {
  double mean_lights_kwh = 0.0;
  double mean_acs_kwh = 0.0;
  double total_kwh = 0.0;
  int rooms = 0;
};

struct ApplianceUsage {
  premises::Appliance appliance;                 // definition; live state unused
  std::vector<sim::TimeInterval> on_intervals;   // actual on-history
};

struct RoomUsage {
  std::string room_id;
  premises::OccupancyTrace occupancy;
  std::vector<ApplianceUsage> appliances;
};

struct WastageResult {
  std::vector<WastageRecord> records;
  WastageAggregate aggregate;
};

// Exact interval arithmetic: per room, the energy of Light/ACS appliances
// inside the unoccupied spans of the window. Occupancy must cover the
// window.
WastageResult compute_wastage(std::span<const RoomUsage> rooms, sim::TimeInterval window);

// Campus-scale estimate from a per-room average:
// total_kwh = (lights + acs) * room_count, total_sgd = total_kwh * tariff.
std::pair<double, double> extrapolate_campus_wastage(double mean_lights_kwh, double mean_acs_kwh,
                                                     int room_count, double tariff_sgd_per_kwh);

}  // namespace gridbed::analytics
