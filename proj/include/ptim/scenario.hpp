#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptim/erv.hpp"
#include "ptim/forecast.hpp"
#include "ptim/incidents.hpp"
#include "ptim/network.hpp"
#include "ptim/solvers.hpp"
#include "ptim/uav.hpp"

namespace ptim {

enum class Policy { Conventional, Proactive, Opt };

std::string to_string(Policy p);
// Accepts conventional, proactive (also pdronetim / p-dronetim) and opt.
Policy parse_policy(const std::string& name);

// Explicitly listed incident; anything left unset is sampled.
struct IncidentSpec {
  int id = 0;
  int severity = 1;
  CellId cell;
  double report_time = 0.0;
  std::optional<TrafficParams> params;
  std::optional<int> hazard;
  std::optional<int> sparsity;
};

struct ScheduleStage {
  int stage = 0;
  int count = 0;
};

enum class Placement { Forecast, Uniform };

struct Scenario {
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> network_seed;  // defaults to a stream of `seed`
  int rows = 10;
  int cols = 10;
  TimeRange edge_time;

  std::vector<ScheduleStage> schedule;  // generated incidents per stage
  std::vector<IncidentSpec> incidents;  // explicit incidents
  double stage_gap_h = 0.5;
  Placement placement = Placement::Forecast;

  int ervs = 3;
  int uavs = 0;
  bool cooperation = true;

  SolverConfig solver;  // seed is ignored; solves draw from `seed`
  FieldConfig field;
  double delta_lag1 = 0.3;
  double delta_lag2 = 0.1;
  std::optional<Forecast> forecast;  // overrides the generated field and kernel

  ErvConfig erv;
  Weights weights;
  UavConfig uav;
  std::uint64_t opt_cap = 1'000'000'000;

  // Throws InputError on an inconsistent scenario.
  void validate() const;

  nlohmann::json to_json() const;
  // Strict: unknown keys and wrong types raise InputError.
  static Scenario from_json(const nlohmann::json& j);
};

Scenario load_scenario(const std::string& path);

// JSON lines: {id, severity, cell, report_time_h} plus optional params,
// hazard and sparsity.
std::vector<IncidentSpec> parse_incident_stream(std::istream& in);

// Everything a scenario expands to before any policy runs.
struct World {
  GridNetwork net;
  Forecast forecast;
  std::vector<Incident> incidents;  // sorted by report time, then id
  std::vector<CellId> erv_start;
  std::vector<CellId> uav_start;
};

World materialize(const Scenario& sc);

// Forecast stage containing time t.
int stage_of(double t, double gap);

struct UavRecord {
  int uav_id = 0;
  CellId from;
  CellId cell;  // none when idle
  int incident_id = -1;
  double utility = 0.0;
};

struct StageOutcome {
  int epoch = 0;
  double time = 0.0;
  int stage = 0;
  int open_incidents = 0;
  std::vector<int> free_ervs;
  std::vector<int> free_uavs;
  std::vector<DispatchRecord> erv;
  std::vector<UavRecord> uav;
  double erv_cost = 0.0;      // DCOP objective of the chosen assignment
  double uav_utility = 0.0;   // summed utility of deployed UAVs
  std::uint64_t messages = 0; // ERV and UAV solves together
  double stage_delay = 0.0;   // delay of the incidents dispatched this epoch
  std::optional<SolveTrace> erv_trace;
};

struct IncidentOutcome {
  int id = 0;
  CellId cell;
  int severity = 1;
  int hazard = 1;
  int sparsity = 1;
  double report_time = 0.0;
  int erv_id = -1;
  double dispatch_time = 0.0;
  double travel_h = 0.0;
  double response_h = 0.0;  // realised, after any UAV cooperation
  int uav_id = -1;
  bool cooperated = false;
  double delay = 0.0;     // expected delay at the realised response time
  double variance = 0.0;
};

struct AssimilationRecord {
  int incident_id = 0;
  DelayBelief prior;
  DelayBelief observation;
  double beta = 0.0;
  DelayBelief posterior;
};

struct RunResult {
  Policy policy = Policy::Proactive;
  std::string solver_variant;
  std::vector<StageOutcome> stages;
  std::vector<IncidentOutcome> incidents;  // by report time, then id
  std::vector<AssimilationRecord> assimilation;
  double total_delay = 0.0;         // vehicle-hours
  double total_response_min = 0.0;
  double total_uav_utility = 0.0;
  double posterior_delay = 0.0;     // total delay after UAV observations
  std::uint64_t messages = 0;
};

RunResult run_policy(const Scenario& sc, Policy policy);
RunResult run_policy(const Scenario& sc, const World& world, Policy policy);

// Proactive stage loop: ERV solve, UAV solve, cooperation and assimilation
// at every epoch.
RunResult stage_loop(const Scenario& sc);

}  // namespace ptim
