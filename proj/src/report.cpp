#include "ptim/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ptim/errors.hpp"
#include "ptim/format.hpp"

namespace ptim {

using nlohmann::json;

namespace {

// JSON has no infinities; write them as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::string policy_label(const RunResult& r) {
  return r.policy == Policy::Proactive ? to_string(r.policy) + "-" + r.solver_variant : to_string(r.policy);
}

}  // namespace

json to_json(const StageOutcome& s) {
  json assignments = json::array();
  for (const DispatchRecord& d : s.erv) {
    json a = {{"erv", d.erv_id},
              {"cell", d.cell.value},
              {"kind", to_string(d.kind)},
              {"from", d.from.value},
              {"travel_h", d.travel_h},
              {"completion_h", d.completion_h}};
    if (d.kind == AssignmentKind::Dispatch) {
      a["incident"] = d.incident_id;
      a["response_h"] = d.response_h;
    }
    assignments.push_back(a);
  }
  json uavs = json::array();
  for (const UavRecord& u : s.uav) {
    json x = {{"uav", u.uav_id}, {"from", u.from.value}, {"utility", u.utility}};
    x["cell"] = u.cell.valid() ? json(u.cell.value) : json(nullptr);
    if (u.incident_id >= 0) x["incident"] = u.incident_id;
    uavs.push_back(x);
  }
  json out = {{"stage", s.stage},
              {"epoch", s.epoch},
              {"time_h", s.time},
              {"open_incidents", s.open_incidents},
              {"free_ervs", s.free_ervs},
              {"free_uavs", s.free_uavs},
              {"assignments", assignments},
              {"uav_assignments", uavs},
              {"erv_cost", number(s.erv_cost)},
              {"uav_utility", s.uav_utility},
              {"messages", s.messages},
              {"total_delay_veh_h", s.stage_delay}};
  if (s.erv_trace) out["iterations"] = s.erv_trace->best_cost.size();
  return out;
}

json to_json(const IncidentOutcome& o) {
  return {{"id", o.id},
          {"cell", o.cell.value},
          {"severity", o.severity},
          {"hazard", o.hazard},
          {"sparsity", o.sparsity},
          {"report_time_h", o.report_time},
          {"erv", o.erv_id},
          {"dispatch_time_h", o.dispatch_time},
          {"travel_h", o.travel_h},
          {"response_h", o.response_h},
          {"uav", o.uav_id},
          {"cooperated", o.cooperated},
          {"delay_veh_h", o.delay},
          {"delay_variance", o.variance}};
}

json to_json(const RunResult& r) {
  json stages = json::array();
  for (const StageOutcome& s : r.stages) stages.push_back(to_json(s));
  json incidents = json::array();
  for (const IncidentOutcome& o : r.incidents) incidents.push_back(to_json(o));
  json assim = json::array();
  for (const AssimilationRecord& a : r.assimilation) {
    assim.push_back({{"incident", a.incident_id},
                     {"prior_mean", a.prior.mean},
                     {"prior_var", a.prior.variance},
                     {"obs_mean", a.observation.mean},
                     {"obs_var", a.observation.variance},
                     {"beta", a.beta},
                     {"post_mean", a.posterior.mean},
                     {"post_var", a.posterior.variance}});
  }
  return {{"policy", to_string(r.policy)},
          {"solver_variant", r.solver_variant},
          {"total_delay_veh_h", r.total_delay},
          {"total_response_min", r.total_response_min},
          {"total_uav_utility", r.total_uav_utility},
          {"posterior_delay_veh_h", r.posterior_delay},
          {"messages", r.messages},
          {"stages", stages},
          {"incidents", incidents},
          {"assimilation", assim}};
}

void write_stages_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "policy,epoch,time_h,stage,open_incidents,free_ervs,free_uavs,dispatches,relocations,"
         "uav_deployments,erv_cost,uav_utility,messages,stage_delay_veh_h\n";
  for (const RunResult& r : runs) {
    for (const StageOutcome& s : r.stages) {
      const auto dispatches = std::count_if(s.erv.begin(), s.erv.end(), [](const DispatchRecord& d) {
        return d.kind == AssignmentKind::Dispatch;
      });
      const auto deployed = std::count_if(s.uav.begin(), s.uav.end(),
                                          [](const UavRecord& u) { return u.cell.valid(); });
      out << policy_label(r) << ',' << s.epoch << ',' << format_number(s.time) << ',' << s.stage << ','
          << s.open_incidents << ',' << s.free_ervs.size() << ',' << s.free_uavs.size() << ','
          << dispatches << ',' << (static_cast<long>(s.erv.size()) - dispatches) << ',' << deployed << ','
          << format_number(s.erv_cost) << ',' << format_number(s.uav_utility) << ',' << s.messages << ','
          << format_number(s.stage_delay) << '\n';
    }
  }
}

void write_comparison_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "policy,total_delay_veh_h,total_response_min,total_uav_utility,posterior_delay_veh_h,"
         "delay_rank,delay_change_vs_conventional_pct\n";
  std::vector<std::size_t> order(runs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return runs[a].total_delay < runs[b].total_delay; });
  std::vector<int> rank(runs.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i) + 1;
  const RunResult* conventional = nullptr;
  for (const RunResult& r : runs) {
    if (r.policy == Policy::Conventional) conventional = &r;
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunResult& r = runs[i];
    out << policy_label(r) << ',' << format_number(r.total_delay) << ','
        << format_number(r.total_response_min) << ',' << format_number(r.total_uav_utility) << ','
        << format_number(r.posterior_delay) << ',' << rank[i] << ',';
    if (conventional && conventional->total_delay > 0.0) {
      out << format_number(100.0 * (r.total_delay - conventional->total_delay) / conventional->total_delay);
    }
    out << '\n';
  }
}

void write_incidents_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "policy,incident_id,cell,severity,hazard,sparsity,report_time_h,erv,dispatch_time_h,travel_h,"
         "response_h,uav,cooperated,delay_veh_h,delay_variance\n";
  for (const RunResult& r : runs) {
    for (const IncidentOutcome& o : r.incidents) {
      out << policy_label(r) << ',' << o.id << ',' << o.cell.value << ',' << o.severity << ',' << o.hazard
          << ',' << o.sparsity << ',' << format_number(o.report_time) << ',' << o.erv_id << ','
          << format_number(o.dispatch_time) << ',' << format_number(o.travel_h) << ','
          << format_number(o.response_h) << ',' << o.uav_id << ',' << (o.cooperated ? 1 : 0) << ','
          << format_number(o.delay) << ',' << format_number(o.variance) << '\n';
    }
  }
}

void write_assimilation_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "policy,incident_id,prior_mean,prior_var,obs_mean,obs_var,beta,post_mean,post_var\n";
  for (const RunResult& r : runs) {
    for (const AssimilationRecord& a : r.assimilation) {
      out << policy_label(r) << ',' << a.incident_id << ',' << format_number(a.prior.mean) << ','
          << format_number(a.prior.variance) << ',' << format_number(a.observation.mean) << ','
          << format_number(a.observation.variance) << ',' << format_number(a.beta) << ','
          << format_number(a.posterior.mean) << ',' << format_number(a.posterior.variance) << '\n';
    }
  }
}

void write_traces_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "policy,epoch,iteration,best_cost,moves_this_round,messages\n";
  for (const RunResult& r : runs) {
    for (const StageOutcome& s : r.stages) {
      if (!s.erv_trace) continue;
      const SolveTrace& t = *s.erv_trace;
      for (std::size_t i = 0; i < t.best_cost.size(); ++i) {
        out << policy_label(r) << ',' << s.epoch << ',' << (i + 1) << ',' << format_number(t.best_cost[i])
            << ',' << t.moves[i] << ',' << t.messages[i] << '\n';
      }
    }
  }
}

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("axis must look like name=v1,v2,...: " + text);
  SweepAxis axis;
  axis.name = text.substr(0, eq);
  std::stringstream rest(text.substr(eq + 1));
  std::string v;
  while (std::getline(rest, v, ',')) {
    if (!v.empty()) axis.values.push_back(v);
  }
  if (axis.values.empty()) throw InputError("axis '" + axis.name + "' has no values");
  return axis;
}

json RunManifest::to_json() const {
  json axes_j = json::array();
  for (const SweepAxis& a : axes) axes_j.push_back({{"name", a.name}, {"values", a.values}});
  json j = {{"command", command},   {"scenario", scenario}, {"out_dir", out_dir}, {"seed", seed},
            {"policies", policies}, {"axes", axes_j},       {"trials", trials}};
  j["scenario_path"] = scenario_path ? json(*scenario_path) : json(nullptr);
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    if (j.contains("scenario_path") && !j.at("scenario_path").is_null()) {
      m.scenario_path = j.at("scenario_path").get<std::string>();
    }
    m.scenario = j.at("scenario");
    m.out_dir = j.value("out_dir", std::string());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.policies = j.value("policies", std::vector<std::string>{});
    for (const json& a : j.value("axes", json::array())) {
      m.axes.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<std::string>>()});
    }
    m.trials = j.value("trials", 1);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  if (m.command != "run" && m.command != "sweep") throw InputError("manifest command must be run or sweep");
  return m;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

void write_run_outputs(const std::string& dir, const RunManifest& manifest,
                       std::span<const RunResult> runs) {
  json all = json::array();
  for (const RunResult& r : runs) {
    json one = to_json(r);
    write_file(dir, "result_" + to_string(r.policy) + ".json", one.dump(2) + "\n");
    all.push_back(std::move(one));
  }
  write_file(dir, "results.json", json{{"seed", manifest.seed}, {"runs", all}}.dump(2) + "\n");
  std::ostringstream stages, comparison, incidents, assimilation, traces;
  write_stages_csv(stages, runs);
  write_comparison_csv(comparison, runs);
  write_incidents_csv(incidents, runs);
  write_assimilation_csv(assimilation, runs);
  write_traces_csv(traces, runs);
  write_file(dir, "stages.csv", stages.str());
  write_file(dir, "comparison.csv", comparison.str());
  write_file(dir, "incidents.csv", incidents.str());
  write_file(dir, "assimilation.csv", assimilation.str());
  write_file(dir, "traces.csv", traces.str());
  write_file(dir, "manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace ptim
