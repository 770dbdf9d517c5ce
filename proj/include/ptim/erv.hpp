#pragma once

#include <limits>
#include <span>
#include <vector>

#include "ptim/dcop.hpp"
#include "ptim/forecast.hpp"
#include "ptim/incidents.hpp"
#include "ptim/network.hpp"

namespace ptim {

enum class AssignmentKind { Dispatch, Relocate };

const char* to_string(AssignmentKind kind);

struct AssignmentLogEntry {
  int stage = 0;
  CellId cell;
  AssignmentKind kind = AssignmentKind::Relocate;
};

struct ErvState {
  int id = 0;
  CellId cell;
  double available_at = 0.0;
  CellId depot;
  std::vector<AssignmentLogEntry> log;

  bool free_at(double time) const { return available_at <= time + 1e-9; }
};

struct Weights {
  double w_d = 1.0;  // dispatch to a reported incident
  double w_r = 0.0;  // relocation; resolved per stage when zero
};

struct ErvConfig {
  double w_r_factor = 100.0;  // w_r = factor x largest dispatch cost of the stage
  int lookahead = 2;          // future stages in the planning objective
  double stage_length_h = 0.5;
  int relocation_candidates = 10;
  // Relocations (and look-ahead repositioning) only target cells reachable
  // within this many hours.
  double relocation_radius_h = 0.5;
  int min_relocation_options = 3;
  TrafficParams anticipated = nominal_params();
};

// Everything a stage problem is built from. The pointers must outlive the
// context.
struct StageContext {
  double time = 0.0;
  int stage = 0;                // forecast stage index of `time`
  std::vector<Incident> open;   // reported and not yet dispatched
  const GridNetwork* net = nullptr;
  const Forecast* forecast = nullptr;
  Weights weights;  // w_r <= 0 means "resolve from the stage's dispatch costs"
  ErvConfig config;
};

std::vector<std::size_t> free_ervs(std::span<const ErvState> fleet, double time);

// Open incident served when `erv` is sent to `cell` (the one with the
// largest expected delay), or nullptr when the cell hosts none.
const Incident* incident_at(const StageContext& ctx, const ErvState& erv, CellId cell);

// Waiting time since the report plus travel time from the ERV's cell.
double response_time(const StageContext& ctx, const ErvState& erv, const Incident& incident);

// Current-stage cost of sending `erv` to `cell`: the weighted expected delay
// of the incident there, or w_r * (1 - expected probability next stage) for
// a relocation.
double unary_cost(const StageContext& ctx, const ErvState& erv, CellId cell);

// Relocation targets considered for `erv`: the most likely incident cells of
// the next stage within the relocation radius, plus the ERV's own cell.
std::vector<CellId> relocation_candidates(const StageContext& ctx, const ErvState& erv,
                                          std::size_t minimum = 0);

// Cost of a plan (d0, d1, ..., dh): the current-stage cost of d0 plus, for
// each future stage t, the expected delay of an anticipated incident served
// from d^t (forecast-weighted over incident cells, waiting out the ERV's busy
// time). Throws InputError if the plan length is not lookahead + 1 and
// ModelDomainError if a repositioning cannot arrive within its stage window.
double lookahead_cost(const StageContext& ctx, const ErvState& erv, std::span<const CellId> plan);

// Current-stage cost of d0 plus the cheapest feasible continuation over the
// look-ahead horizon.
double planning_cost(const StageContext& ctx, const ErvState& erv, CellId d0);

struct ErvStageProblem {
  DcopProblem problem{Sense::Minimize};
  Weights weights;
  std::vector<std::size_t> fleet_index;  // agent -> position in the fleet
};

// One agent per free ERV; domains are open incident cells plus relocation
// candidates. Every pair of agents is linked by a constraint that is +inf on
// equal cells and otherwise the sum of both agents' planning costs. With a
// single free ERV the planning cost becomes a unary constraint.
// Throws ModelDomainError when no ERV is free.
ErvStageProblem build_erv_problem(const StageContext& ctx, std::span<const ErvState> fleet);

struct DispatchRecord {
  int erv_id = 0;
  int incident_id = -1;  // -1 for relocations
  CellId from;
  CellId cell;
  AssignmentKind kind = AssignmentKind::Relocate;
  double travel_h = 0.0;
  double response_h = 0.0;    // dispatch only
  double completion_h = 0.0;  // when the ERV becomes free again
};

// Moves the fleet according to a solved assignment. Dispatched ERVs are busy
// for travel plus clearance and end at the incident; relocated ERVs are busy
// while travelling. Throws InputError when an agent is not in the fleet.
std::vector<DispatchRecord> apply_assignment(const StageContext& ctx, std::span<ErvState> fleet,
                                             const DcopProblem& problem, const Assignment& a);

}  // namespace ptim
