#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ptim/incidents.hpp"
#include "ptim/network.hpp"

namespace ptim {

struct OptVehicle {
  int id = 0;
  CellId start;
};

struct OptJob {
  int incident_id = 0;
  CellId cell;
  double report_time = 0.0;
  TrafficParams params;
  double travel_factor = 1.0;  // scales travel into this job (UAV support)
};

struct OptServe {
  int vehicle = -1;  // index into the vehicle list
  double start = 0.0;
  double response = 0.0;
  double delay = 0.0;
};

struct OptPlan {
  double total_delay = 0.0;
  std::vector<std::vector<int>> routes;  // job indices per vehicle, in service order
  std::vector<OptServe> serve;           // per job
};

// Rough count of elementary steps of the exact search.
std::uint64_t clairvoyant_work(std::size_t vehicles, std::size_t jobs);

// Exact minimum total delay when every report time and location is known in
// advance. Vehicles leave their start cells at time 0 and may wait anywhere;
// a job starts once its vehicle has arrived and the incident is reported,
// and occupies the vehicle for its clearance time. Throws CapExceededError
// when the estimated work exceeds `cap` or there are more than 20 jobs.
OptPlan solve_clairvoyant(const GridNetwork& net, std::span<const OptVehicle> vehicles,
                          std::span<const OptJob> jobs, std::uint64_t cap);

}  // namespace ptim
