#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptim/scenario.hpp"

namespace ptim {

// Stage report: {stage, time_h, assignments: [{erv, cell, kind, response_h}],
// total_delay_veh_h, ...}.
nlohmann::json to_json(const StageOutcome& s);
nlohmann::json to_json(const IncidentOutcome& o);
nlohmann::json to_json(const RunResult& r);

// One row per stage per run.
void write_stages_csv(std::ostream& out, std::span<const RunResult> runs);
// One row per run, with the delay rank and the change against the
// conventional run when present.
void write_comparison_csv(std::ostream& out, std::span<const RunResult> runs);
void write_incidents_csv(std::ostream& out, std::span<const RunResult> runs);
// incident id, prior_mean, prior_var, obs_mean, obs_var, beta, post_mean, post_var
void write_assimilation_csv(std::ostream& out, std::span<const RunResult> runs);
// Convergence of every ERV solve: policy, epoch, iteration, best_cost,
// moves_this_round, messages.
void write_traces_csv(std::ostream& out, std::span<const RunResult> runs);

struct SweepAxis {
  std::string name;
  std::vector<std::string> values;
};

// "name=v1,v2,..."
SweepAxis parse_axis(const std::string& text);

struct RunManifest {
  std::string command;  // "run" or "sweep"
  std::optional<std::string> scenario_path;
  nlohmann::json scenario;  // full scenario, seeds included
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
  std::vector<SweepAxis> axes;
  int trials = 1;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Writes `text` to dir/name, creating dir. Throws InputError on IO failure.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

// Result files of a run command: results.json, result_<policy>.json,
// stages.csv, comparison.csv, incidents.csv, assimilation.csv, traces.csv and
// manifest.json.
void write_run_outputs(const std::string& dir, const RunManifest& manifest,
                       std::span<const RunResult> runs);

}  // namespace ptim
