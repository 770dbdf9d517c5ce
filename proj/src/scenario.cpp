#include "ptim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <set>
#include <sstream>

#include "ptim/errors.hpp"
#include "ptim/opt.hpp"
#include "ptim/random.hpp"

namespace ptim {

namespace {

using nlohmann::json;

// Stream tags for derive_seed.
enum : std::uint64_t {
  kTagNetwork = 1,
  kTagField = 2,
  kTagIncident = 3,
  kTagErvStart = 4,
  kTagUavStart = 5,
  kTagErvSolve = 6,
  kTagUavSolve = 7,
  kTagObservation = 8,
};

constexpr double kEps = 1e-9;
constexpr int kMaxEpochs = 100000;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InputError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

TrafficParams params_from_json(const json& j) {
  check_keys(j, {"s", "s1_mean", "s1_sd", "q", "r_var", "clearance"}, "params");
  TrafficParams p;
  p.s = j.at("s").get<double>();
  p.s1_mean = j.at("s1_mean").get<double>();
  p.s1_sd = j.at("s1_sd").get<double>();
  p.q = j.at("q").get<double>();
  p.r_var = j.at("r_var").get<double>();
  p.clearance = j.at("clearance").get<double>();
  p.validate();
  return p;
}

json params_to_json(const TrafficParams& p) {
  return {{"s", p.s}, {"s1_mean", p.s1_mean}, {"s1_sd", p.s1_sd},
          {"q", p.q}, {"r_var", p.r_var},     {"clearance", p.clearance}};
}

IncidentSpec incident_from_json(const json& j) {
  check_keys(j, {"id", "severity", "cell", "report_time_h", "params", "hazard", "sparsity"}, "incident");
  IncidentSpec s;
  s.id = j.at("id").get<int>();
  s.severity = j.at("severity").get<int>();
  s.cell = CellId(j.at("cell").get<int>());
  s.report_time = j.at("report_time_h").get<double>();
  if (j.contains("params")) s.params = params_from_json(j.at("params"));
  if (j.contains("hazard")) s.hazard = j.at("hazard").get<int>();
  if (j.contains("sparsity")) s.sparsity = j.at("sparsity").get<int>();
  return s;
}

json incident_to_json(const IncidentSpec& s) {
  json j = {{"id", s.id}, {"severity", s.severity}, {"cell", s.cell.value},
            {"report_time_h", s.report_time}};
  if (s.params) j["params"] = params_to_json(*s.params);
  if (s.hazard) j["hazard"] = *s.hazard;
  if (s.sparsity) j["sparsity"] = *s.sparsity;
  return j;
}

int last_stage(const Scenario& sc) {
  int last = 0;
  for (const ScheduleStage& st : sc.schedule) last = std::max(last, st.stage);
  for (const IncidentSpec& s : sc.incidents) last = std::max(last, stage_of(s.report_time, sc.stage_gap_h));
  return last;
}

double realized_response(const IncidentOutcome& o, bool cooperated) {
  const double wait = o.dispatch_time - o.report_time;
  return wait + (cooperated ? cooperation_effect(o.travel_h, HazardIndex(o.hazard), true) : o.travel_h);
}

IncidentOutcome open_outcome(const Incident& inc) {
  IncidentOutcome o;
  o.id = inc.id;
  o.cell = inc.location;
  o.severity = inc.severity;
  o.hazard = inc.hazard;
  o.sparsity = inc.sparsity;
  o.report_time = inc.report_time;
  return o;
}

void finish_outcome(IncidentOutcome& o, const TrafficParams& p) {
  o.delay = expected_delay(p, o.response_h);
  o.variance = delay_variance(p, o.response_h);
}

void totals(RunResult& r) {
  std::sort(r.incidents.begin(), r.incidents.end(), [](const IncidentOutcome& a, const IncidentOutcome& b) {
    return a.report_time != b.report_time ? a.report_time < b.report_time : a.id < b.id;
  });
  r.total_delay = 0.0;
  r.total_response_min = 0.0;
  r.posterior_delay = 0.0;
  for (const IncidentOutcome& o : r.incidents) {
    r.total_delay += o.delay;
    r.total_response_min += o.response_h * 60.0;
    double post = o.delay;
    for (const AssimilationRecord& a : r.assimilation) {
      if (a.incident_id == o.id) post = a.posterior.mean;
    }
    r.posterior_delay += post;
  }
  r.total_uav_utility = 0.0;
  r.messages = 0;
  for (const StageOutcome& s : r.stages) {
    r.total_uav_utility += s.uav_utility;
    r.messages += s.messages;
  }
}

const Incident& find_incident(const World& w, int id) {
  for (const Incident& inc : w.incidents) {
    if (inc.id == id) return inc;
  }
  throw InputError("unknown incident " + std::to_string(id));
}

std::vector<double> epoch_times(const Scenario& sc, const World& w, bool include_stages) {
  std::set<double> times;
  if (include_stages) {
    const int last = last_stage(sc);
    for (int u = 0; u <= last; ++u) times.insert(u * sc.stage_gap_h);
  }
  for (const Incident& inc : w.incidents) times.insert(inc.report_time);
  return {times.begin(), times.end()};
}

// Next time strictly after `t` in a sorted list, or +inf.
double next_after(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t + kEps);
  return it == times.end() ? kInfinity : *it;
}

double next_release(std::span<const ErvState> fleet, double t) {
  double best = kInfinity;
  for (const ErvState& e : fleet) {
    if (e.available_at > t + kEps) best = std::min(best, e.available_at);
  }
  return best;
}

std::vector<ErvState> initial_fleet(const World& w) {
  std::vector<ErvState> fleet;
  for (std::size_t i = 0; i < w.erv_start.size(); ++i) {
    ErvState e;
    e.id = static_cast<int>(i);
    e.cell = w.erv_start[i];
    e.depot = w.erv_start[i];
    fleet.push_back(e);
  }
  return fleet;
}

RunResult run_proactive(const Scenario& sc, const World& w) {
  RunResult result;
  result.policy = Policy::Proactive;
  result.solver_variant = sc.solver.algorithm == Algorithm::MGM ? "MGM" : "DSA-B";

  std::vector<ErvState> fleet = initial_fleet(w);
  std::vector<UavState> uavs;
  for (std::size_t i = 0; i < w.uav_start.size(); ++i) {
    uavs.push_back({static_cast<int>(i), w.uav_start[i], 0.0});
  }

  const std::vector<double> scheduled = epoch_times(sc, w, true);
  std::vector<Incident> open;
  std::size_t pending = 0;
  double t = scheduled.empty() ? 0.0 : scheduled.front();

  for (int epoch = 0;; ++epoch) {
    if (epoch >= kMaxEpochs) throw ModelDomainError("stage loop did not terminate");
    while (pending < w.incidents.size() && w.incidents[pending].report_time <= t + kEps) {
      open.push_back(w.incidents[pending++]);
    }

    StageOutcome so;
    so.epoch = epoch;
    so.time = t;
    so.stage = stage_of(t, sc.stage_gap_h);
    so.open_incidents = static_cast<int>(open.size());
    for (std::size_t i : free_ervs(fleet, t)) so.free_ervs.push_back(fleet[i].id);
    for (const UavState& u : uavs) {
      if (u.free_at(t)) so.free_uavs.push_back(u.id);
    }

    std::vector<IncidentOutcome> dispatched;
    if (!so.free_ervs.empty()) {
      StageContext ctx;
      ctx.time = t;
      ctx.stage = so.stage;
      ctx.open = open;
      ctx.net = &w.net;
      ctx.forecast = &w.forecast;
      ctx.weights = sc.weights;
      ctx.config = sc.erv;
      ctx.config.stage_length_h = sc.stage_gap_h;
      ErvStageProblem sp = build_erv_problem(ctx, fleet);
      SolverConfig cfg = sc.solver;
      cfg.seed = derive_seed(sc.seed, kTagErvSolve, static_cast<std::uint64_t>(epoch));
      SolveTrace trace = solve(sp.problem, cfg);
      so.erv = apply_assignment(ctx, fleet, sp.problem, trace.final);
      so.erv_cost = trace.final_cost;
      so.messages += trace.messages.empty() ? 0 : trace.messages.back();
      so.erv_trace = std::move(trace);
      for (const DispatchRecord& rec : so.erv) {
        if (rec.kind != AssignmentKind::Dispatch) continue;
        auto it = std::find_if(open.begin(), open.end(),
                               [&](const Incident& i) { return i.id == rec.incident_id; });
        IncidentOutcome o = open_outcome(*it);
        o.erv_id = rec.erv_id;
        o.dispatch_time = t;
        o.travel_h = rec.travel_h;
        o.response_h = realized_response(o, false);
        dispatched.push_back(o);
        open.erase(it);
      }
    }

    // UAVs follow the ERVs to this epoch's incidents.
    std::vector<UavTarget> targets;
    for (const IncidentOutcome& o : dispatched) {
      targets.push_back({o.id, o.cell, sc.uav.matrix.benefit(o.severity, o.sparsity, o.hazard)});
    }
    std::vector<UavState> free_uavs;
    for (const UavState& u : uavs) {
      if (u.free_at(t)) free_uavs.push_back(u);
    }
    DcopProblem up = build_uav_problem(targets, free_uavs, w.net, sc.uav);
    if (!up.empty()) {
      SolverConfig cfg = sc.solver;
      cfg.seed = derive_seed(sc.seed, kTagUavSolve, static_cast<std::uint64_t>(epoch));
      const SolveTrace trace = solve(up, cfg);
      so.messages += trace.messages.empty() ? 0 : trace.messages.back();
      for (std::size_t a = 0; a < up.size(); ++a) {
        UavState& uav = *std::find_if(uavs.begin(), uavs.end(),
                                      [&](const UavState& u) { return u.id == up.agent_id(a); });
        UavRecord rec;
        rec.uav_id = uav.id;
        rec.from = uav.cell;
        rec.cell = trace.final.values[a];
        if (rec.cell.valid()) {
          // Serve the most valuable incident at that cell.
          const UavTarget* best = nullptr;
          for (const UavTarget& tg : targets) {
            if (tg.cell == rec.cell && (best == nullptr || tg.benefit > best->benefit)) best = &tg;
          }
          rec.incident_id = best->incident_id;
          rec.utility = uav_utility(*best, uav, w.net, sc.uav);
          auto o = std::find_if(dispatched.begin(), dispatched.end(),
                                [&](const IncidentOutcome& x) { return x.id == best->incident_id; });
          o->uav_id = uav.id;
          if (sc.cooperation) {
            o->cooperated = true;
            o->response_h = realized_response(*o, true);
          }
          const double completion =
              o->dispatch_time + o->travel_h + find_incident(w, o->id).params.clearance;
          uav.available_at = std::max({uav.available_at, t + w.net.travel_time(uav.cell, rec.cell), completion});
          uav.cell = rec.cell;
          so.uav_utility += rec.utility;
        }
        so.uav.push_back(rec);
      }
    }

    for (IncidentOutcome& o : dispatched) {
      const Incident& inc = find_incident(w, o.id);
      finish_outcome(o, inc.params);
      so.stage_delay += o.delay;
      if (o.uav_id >= 0 && o.variance > 0.0) {
        AssimilationRecord a;
        a.incident_id = o.id;
        a.prior = {o.delay, o.variance};
        Rng rng = make_rng(derive_seed(sc.seed, kTagObservation, static_cast<std::uint64_t>(o.id)));
        a.observation = simulate_observation(a.prior, sc.uav.observation_kappa, rng);
        a.beta = assimilation_weight(a.prior.variance, a.observation.variance);
        a.posterior = assimilate(a.prior, a.observation);
        result.assimilation.push_back(a);
      }
      result.incidents.push_back(o);
    }
    result.stages.push_back(std::move(so));

    double next = next_after(scheduled, t);
    if (!open.empty()) {
      next = std::min(next, next_release(fleet, t));
      if (std::isinf(next)) next = t + sc.stage_gap_h;
    }
    if (std::isinf(next)) break;
    t = next;
  }
  totals(result);
  return result;
}

RunResult run_conventional(const Scenario& sc, const World& w) {
  RunResult result;
  result.policy = Policy::Conventional;
  result.solver_variant = "closest-available";
  std::vector<ErvState> fleet = initial_fleet(w);
  const std::vector<double> reports = epoch_times(sc, w, false);
  std::vector<Incident> open;
  std::size_t pending = 0;
  if (reports.empty()) return result;
  double t = reports.front();

  for (int epoch = 0;; ++epoch) {
    if (epoch >= kMaxEpochs) throw ModelDomainError("dispatch loop did not terminate");
    while (pending < w.incidents.size() && w.incidents[pending].report_time <= t + kEps) {
      open.push_back(w.incidents[pending++]);
    }
    StageOutcome so;
    so.epoch = epoch;
    so.time = t;
    so.stage = stage_of(t, sc.stage_gap_h);
    so.open_incidents = static_cast<int>(open.size());
    for (std::size_t i : free_ervs(fleet, t)) so.free_ervs.push_back(fleet[i].id);

    // First come, first served; each takes the closest free vehicle.
    for (auto it = open.begin(); it != open.end();) {
      ErvState* pick = nullptr;
      double best = kInfinity;
      for (ErvState& e : fleet) {
        if (!e.free_at(t)) continue;
        const double d = w.net.travel_time(e.cell, it->location);
        if (d < best) {
          best = d;
          pick = &e;
        }
      }
      if (pick == nullptr) break;
      DispatchRecord rec;
      rec.erv_id = pick->id;
      rec.incident_id = it->id;
      rec.from = pick->cell;
      rec.cell = it->location;
      rec.kind = AssignmentKind::Dispatch;
      rec.travel_h = best;
      rec.response_h = t - it->report_time + best;
      rec.completion_h =
          t + best + it->params.clearance + w.net.travel_time(it->location, pick->depot);
      pick->available_at = rec.completion_h;
      pick->cell = pick->depot;
      pick->log.push_back({so.stage, it->location, AssignmentKind::Dispatch});
      so.erv.push_back(rec);

      IncidentOutcome o = open_outcome(*it);
      o.erv_id = pick->id;
      o.dispatch_time = t;
      o.travel_h = best;
      o.response_h = rec.response_h;
      finish_outcome(o, it->params);
      so.stage_delay += o.delay;
      result.incidents.push_back(o);
      it = open.erase(it);
    }
    result.stages.push_back(std::move(so));

    double next = next_after(reports, t);
    if (!open.empty()) next = std::min(next, next_release(fleet, t));
    if (std::isinf(next)) break;
    t = next;
  }
  totals(result);
  return result;
}

RunResult run_opt(const Scenario& sc, const World& w) {
  RunResult result;
  result.policy = Policy::Opt;
  result.solver_variant = "clairvoyant";
  const bool supported = sc.cooperation && sc.uavs > 0;

  std::vector<OptVehicle> vehicles;
  for (std::size_t i = 0; i < w.erv_start.size(); ++i) {
    vehicles.push_back({static_cast<int>(i), w.erv_start[i]});
  }
  std::vector<OptJob> jobs;
  for (const Incident& inc : w.incidents) {
    const double factor = supported ? 1.0 - HazardIndex(inc.hazard).reduction() : 1.0;
    jobs.push_back({inc.id, inc.location, inc.report_time, inc.params, factor});
  }
  const OptPlan plan = solve_clairvoyant(w.net, vehicles, jobs, sc.opt_cap);

  std::vector<DispatchRecord> records(jobs.size());
  for (std::size_t k = 0; k < plan.routes.size(); ++k) {
    CellId pos = vehicles[k].start;
    for (int j : plan.routes[k]) {
      const Incident& inc = w.incidents[static_cast<std::size_t>(j)];
      const OptServe& s = plan.serve[static_cast<std::size_t>(j)];
      DispatchRecord& rec = records[static_cast<std::size_t>(j)];
      rec.erv_id = vehicles[k].id;
      rec.incident_id = inc.id;
      rec.from = pos;
      rec.cell = inc.location;
      rec.kind = AssignmentKind::Dispatch;
      rec.travel_h = w.net.travel_time(pos, inc.location);
      rec.response_h = s.response;
      rec.completion_h = s.start + inc.params.clearance;
      pos = inc.location;
    }
  }

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Incident& inc = w.incidents[j];
    const double t = inc.report_time;
    if (result.stages.empty() || std::abs(result.stages.back().time - t) > kEps) {
      StageOutcome so;
      so.epoch = static_cast<int>(result.stages.size());
      so.time = t;
      so.stage = stage_of(t, sc.stage_gap_h);
      result.stages.push_back(so);
    }
    StageOutcome& so = result.stages.back();
    so.open_incidents += 1;
    so.erv.push_back(records[j]);

    IncidentOutcome o = open_outcome(inc);
    o.erv_id = records[j].erv_id;
    o.dispatch_time = plan.serve[j].start - plan.serve[j].response;
    o.travel_h = records[j].travel_h;
    o.response_h = plan.serve[j].response;
    o.cooperated = supported;
    finish_outcome(o, inc.params);
    so.stage_delay += o.delay;
    result.incidents.push_back(o);
  }
  totals(result);
  return result;
}

}  // namespace

std::string to_string(Policy p) {
  switch (p) {
    case Policy::Conventional: return "conventional";
    case Policy::Proactive: return "proactive";
    case Policy::Opt: return "opt";
  }
  return "?";
}

Policy parse_policy(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (n == "conventional" || n == "greedy") return Policy::Conventional;
  if (n == "proactive" || n == "pdronetim" || n == "p-dronetim") return Policy::Proactive;
  if (n == "opt" || n == "optimal" || n == "clairvoyant") return Policy::Opt;
  throw InputError("unknown policy '" + name + "'");
}

int stage_of(double t, double gap) {
  if (!(gap > 0.0)) throw InputError("stage gap must be positive");
  return static_cast<int>(std::floor(t / gap + kEps));
}

void Scenario::validate() const {
  if (rows < 2 || cols < 2) throw InputError("grid needs at least 2 rows and 2 columns");
  if (!(edge_time.lo > 0.0) || edge_time.hi < edge_time.lo) throw InputError("invalid edge time range");
  if (!(stage_gap_h > 0.0)) throw InputError("stage gap must be positive");
  if (ervs < 1) throw InputError("at least one ERV is required");
  if (uavs < 0) throw InputError("UAV count must be non-negative");
  for (const ScheduleStage& s : schedule) {
    if (s.stage < 0 || s.count < 0) throw InputError("schedule entries must be non-negative");
  }
  std::set<int> ids;
  for (const IncidentSpec& s : incidents) {
    if (!ids.insert(s.id).second) throw InputError("duplicate incident id " + std::to_string(s.id));
    if (s.id < 0) throw InputError("incident ids must be non-negative");
    if (s.severity < kMinSeverity || s.severity > kMaxSeverity) {
      throw InputError("incident severity must be in 1..4");
    }
    if (s.cell.value < 0 || s.cell.value >= rows * cols) throw InputError("incident cell out of range");
    if (!(s.report_time >= 0.0)) throw InputError("report time must be non-negative");
    if (s.hazard) HazardIndex{*s.hazard};
    if (s.sparsity) SensorSparsity{*s.sparsity};
    if (s.params) s.params->validate();
  }
  solver.validate();
  if (field.lo < 0.0 || field.hi > 1.0 || field.hi < field.lo) throw InputError("field range must lie in [0,1]");
  if (delta_lag1 < 0.0 || delta_lag2 < 0.0) throw InputError("dependency ratios must be non-negative");
  if (forecast && forecast->cells() != rows * cols) throw InputError("forecast does not match the grid");
  if (erv.lookahead < 0) throw InputError("look-ahead must be non-negative");
  if (erv.relocation_candidates < 1) throw InputError("need at least one relocation candidate");
  if (erv.relocation_radius_h < 0.0) throw InputError("relocation radius must be non-negative");
  if (!(weights.w_d > 0.0)) throw InputError("w_d must be positive");
  if (weights.w_r > 0.0 && !(weights.w_r > weights.w_d)) throw InputError("w_r must exceed w_d");
  if (!(erv.w_r_factor > 0.0)) throw InputError("w_r factor must be positive");
  if (!(uav.hours_per_benefit_unit > 0.0)) throw InputError("UAV exchange rate must be positive");
  if (uav.observation_kappa < 0.0) throw InputError("observation kappa must be non-negative");
}

json Scenario::to_json() const {
  json j;
  j["seed"] = seed;
  json net = {{"rows", rows}, {"cols", cols}, {"edge_time_h", {edge_time.lo, edge_time.hi}}};
  if (network_seed) net["seed"] = *network_seed;
  j["network"] = net;
  json sched = json::array();
  for (const ScheduleStage& s : schedule) sched.push_back({s.stage, s.count});
  j["schedule"] = sched;
  json incs = json::array();
  for (const IncidentSpec& s : incidents) incs.push_back(incident_to_json(s));
  j["incidents"] = incs;
  j["stage_gap_h"] = stage_gap_h;
  j["placement"] = placement == Placement::Forecast ? "forecast" : "uniform";
  j["fleet"] = {{"ervs", ervs}, {"uavs", uavs}};
  j["cooperation"] = cooperation;
  j["solver"] = {{"algorithm", ptim::to_string(solver.algorithm)},
                 {"iterations", solver.iterations},
                 {"threshold", solver.dsa_threshold}};
  json fc = {{"lo", field.lo},          {"hi", field.hi},
             {"normalize", field.normalize}, {"budget", field.budget},
             {"delta_lag1", delta_lag1}, {"delta_lag2", delta_lag2}};
  if (forecast) fc["data"] = forecast->to_json();
  j["forecast"] = fc;
  j["erv"] = {{"lookahead", erv.lookahead},
              {"relocation_candidates", erv.relocation_candidates},
              {"relocation_radius_h", erv.relocation_radius_h},
              {"min_relocation_options", erv.min_relocation_options},
              {"w_d", weights.w_d},
              {"w_r", weights.w_r},
              {"w_r_factor", erv.w_r_factor}};
  j["uav"] = {{"hours_per_benefit_unit", uav.hours_per_benefit_unit},
              {"observation_kappa", uav.observation_kappa},
              {"priority_matrix", uav.matrix.to_json()}};
  j["opt"] = {{"cap", opt_cap}};
  return j;
}

Scenario Scenario::from_json(const json& j) {
  Scenario sc;
  try {
    check_keys(j, {"seed", "network", "schedule", "incidents", "stage_gap_h", "placement", "fleet",
                   "cooperation", "solver", "forecast", "erv", "uav", "opt"},
               "scenario");
    read(j, "seed", sc.seed);
    if (j.contains("network")) {
      const json& n = j.at("network");
      check_keys(n, {"rows", "cols", "edge_time_h", "seed"}, "network");
      read(n, "rows", sc.rows);
      read(n, "cols", sc.cols);
      if (n.contains("edge_time_h")) {
        const auto r = n.at("edge_time_h").get<std::vector<double>>();
        if (r.size() != 2) throw InputError("edge_time_h must be [lo, hi]");
        sc.edge_time = {r[0], r[1]};
      }
      if (n.contains("seed")) sc.network_seed = n.at("seed").get<std::uint64_t>();
    }
    if (j.contains("schedule")) {
      for (const json& e : j.at("schedule")) {
        if (e.is_array()) {
          if (e.size() != 2) throw InputError("schedule entries are [stage, count]");
          sc.schedule.push_back({e[0].get<int>(), e[1].get<int>()});
        } else {
          check_keys(e, {"stage", "count"}, "schedule entry");
          sc.schedule.push_back({e.at("stage").get<int>(), e.at("count").get<int>()});
        }
      }
    }
    if (j.contains("incidents")) {
      for (const json& e : j.at("incidents")) sc.incidents.push_back(incident_from_json(e));
    }
    read(j, "stage_gap_h", sc.stage_gap_h);
    if (j.contains("placement")) {
      const auto p = j.at("placement").get<std::string>();
      if (p == "forecast") {
        sc.placement = Placement::Forecast;
      } else if (p == "uniform") {
        sc.placement = Placement::Uniform;
      } else {
        throw InputError("placement must be 'forecast' or 'uniform'");
      }
    }
    if (j.contains("fleet")) {
      const json& f = j.at("fleet");
      check_keys(f, {"ervs", "uavs"}, "fleet");
      read(f, "ervs", sc.ervs);
      read(f, "uavs", sc.uavs);
    }
    read(j, "cooperation", sc.cooperation);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s, {"algorithm", "iterations", "threshold"}, "solver");
      if (s.contains("algorithm")) sc.solver.algorithm = parse_algorithm(s.at("algorithm").get<std::string>());
      read(s, "iterations", sc.solver.iterations);
      read(s, "threshold", sc.solver.dsa_threshold);
    }
    if (j.contains("forecast")) {
      const json& f = j.at("forecast");
      check_keys(f, {"lo", "hi", "normalize", "budget", "delta_lag1", "delta_lag2", "data"}, "forecast");
      read(f, "lo", sc.field.lo);
      read(f, "hi", sc.field.hi);
      read(f, "normalize", sc.field.normalize);
      read(f, "budget", sc.field.budget);
      read(f, "delta_lag1", sc.delta_lag1);
      read(f, "delta_lag2", sc.delta_lag2);
      if (f.contains("data")) sc.forecast = Forecast::from_json(f.at("data"));
    }
    if (j.contains("erv")) {
      const json& e = j.at("erv");
      check_keys(e, {"lookahead", "relocation_candidates", "relocation_radius_h", "min_relocation_options",
                     "w_d", "w_r", "w_r_factor"},
                 "erv");
      read(e, "lookahead", sc.erv.lookahead);
      read(e, "relocation_candidates", sc.erv.relocation_candidates);
      read(e, "relocation_radius_h", sc.erv.relocation_radius_h);
      read(e, "min_relocation_options", sc.erv.min_relocation_options);
      read(e, "w_d", sc.weights.w_d);
      read(e, "w_r", sc.weights.w_r);
      read(e, "w_r_factor", sc.erv.w_r_factor);
    }
    if (j.contains("uav")) {
      const json& u = j.at("uav");
      check_keys(u, {"hours_per_benefit_unit", "observation_kappa", "priority_matrix"}, "uav");
      read(u, "hours_per_benefit_unit", sc.uav.hours_per_benefit_unit);
      read(u, "observation_kappa", sc.uav.observation_kappa);
      if (u.contains("priority_matrix")) sc.uav.matrix = PriorityMatrix::from_json(u.at("priority_matrix"));
    }
    if (j.contains("opt")) {
      const json& o = j.at("opt");
      check_keys(o, {"cap"}, "opt");
      if (o.contains("cap")) sc.opt_cap = o.at("cap").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed scenario: ") + e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("scenario file " + path + " is not valid JSON: " + e.what());
  }
  return Scenario::from_json(j);
}

std::vector<IncidentSpec> parse_incident_stream(std::istream& in) {
  std::vector<IncidentSpec> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(incident_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw InputError("incident stream line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

World materialize(const Scenario& sc) {
  sc.validate();
  const std::uint64_t net_seed = sc.network_seed.value_or(derive_seed(sc.seed, kTagNetwork));
  GridNetwork net = build_grid(sc.rows, sc.cols, sc.edge_time, net_seed);
  const int cells = net.cell_count();

  Forecast forecast;
  if (sc.forecast) {
    forecast = *sc.forecast;
  } else {
    const int stages = std::max(3, last_stage(sc) + sc.erv.lookahead + 16);
    forecast = Forecast(generate_field(net, stages, derive_seed(sc.seed, kTagField), sc.field),
                        DependencyKernel::four_neighborhood(net, sc.delta_lag1, sc.delta_lag2));
  }

  std::vector<Incident> incidents;
  int next_id = 0;
  for (const IncidentSpec& s : sc.incidents) {
    Incident inc = sample_incident(s.severity, s.cell, s.report_time,
                                   derive_seed(sc.seed, kTagIncident, static_cast<std::uint64_t>(s.id)), s.id);
    if (s.params) inc.params = *s.params;
    if (s.hazard) inc.hazard = *s.hazard;
    if (s.sparsity) inc.sparsity = *s.sparsity;
    incidents.push_back(inc);
    next_id = std::max(next_id, s.id + 1);
  }
  for (const ScheduleStage& st : sc.schedule) {
    for (int c = 0; c < st.count; ++c) {
      const int id = next_id++;
      Rng rng = make_rng(derive_seed(sc.seed, kTagIncident, static_cast<std::uint64_t>(id)));
      const int severity = uniform_int(rng, kMinSeverity, kMaxSeverity);
      const auto& dist = forecast.distribution(st.stage);
      const bool weighted = sc.placement == Placement::Forecast &&
                            std::any_of(dist.begin(), dist.end(), [](double p) { return p > 0.0; });
      int cell = 0;
      if (weighted) {
        std::discrete_distribution<int> pick(dist.begin(), dist.end());
        cell = pick(rng);
      } else {
        cell = uniform_int(rng, 0, cells - 1);
      }
      incidents.push_back(sample_incident(severity, CellId(cell), st.stage * sc.stage_gap_h, rng(), id));
    }
  }
  std::sort(incidents.begin(), incidents.end(), [](const Incident& a, const Incident& b) {
    return a.report_time != b.report_time ? a.report_time < b.report_time : a.id < b.id;
  });

  auto starts = [&](int count, std::uint64_t tag) {
    std::vector<CellId> out;
    for (int i = 0; i < count; ++i) {
      Rng rng = make_rng(derive_seed(sc.seed, tag, static_cast<std::uint64_t>(i)));
      out.emplace_back(uniform_int(rng, 0, cells - 1));
    }
    return out;
  };
  std::vector<CellId> erv_start = starts(sc.ervs, kTagErvStart);
  std::vector<CellId> uav_start = starts(sc.uavs, kTagUavStart);
  return World{std::move(net), std::move(forecast), std::move(incidents), std::move(erv_start),
               std::move(uav_start)};
}

RunResult run_policy(const Scenario& sc, const World& world, Policy policy) {
  switch (policy) {
    case Policy::Conventional: return run_conventional(sc, world);
    case Policy::Proactive: return run_proactive(sc, world);
    case Policy::Opt: return run_opt(sc, world);
  }
  throw InputError("unknown policy");
}

RunResult run_policy(const Scenario& sc, Policy policy) { return run_policy(sc, materialize(sc), policy); }

RunResult stage_loop(const Scenario& sc) { return run_policy(sc, Policy::Proactive); }

}  // namespace ptim
