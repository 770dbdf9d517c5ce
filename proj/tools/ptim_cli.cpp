// ptim: run incident-management scenarios, parameter sweeps and replays.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptim/errors.hpp"
#include "ptim/report.hpp"
#include "ptim/scenario.hpp"
#include "ptim/sweep.hpp"

namespace {

using nlohmann::json;
using namespace ptim;

enum Exit { kOk = 0, kModel = 1, kInput = 2, kCap = 3 };

std::vector<Policy> parse_policies(const std::vector<std::string>& names) {
  std::vector<Policy> out;
  for (const std::string& n : names) {
    const Policy p = parse_policy(n);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  if (out.empty()) throw InputError("no policies given");
  return out;
}

std::vector<std::string> policy_names(const std::vector<Policy>& ps) {
  std::vector<std::string> out;
  for (Policy p : ps) out.push_back(to_string(p));
  return out;
}

Scenario scenario_from_options(const std::string& path, const std::string& incidents_path,
                               const std::optional<std::uint64_t>& seed) {
  Scenario sc = path.empty() ? Scenario{} : load_scenario(path);
  if (!incidents_path.empty()) {
    std::ifstream in(incidents_path);
    if (!in) throw InputError("cannot read incident stream " + incidents_path);
    for (IncidentSpec& s : parse_incident_stream(in)) sc.incidents.push_back(std::move(s));
  }
  if (seed) sc.seed = *seed;
  sc.validate();
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proactive traffic-incident management simulator"};
  app.require_subcommand(1);

  std::string scenario_path, incidents_path, out_dir, manifest_path, dump_out;
  std::vector<std::string> policies;
  std::vector<std::string> axes;
  std::optional<std::uint64_t> seed;
  int trials = 10;

  auto* run = app.add_subcommand("run", "Run one scenario under one or more policies");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--incidents", incidents_path, "Extra incidents as JSON lines");
  run->add_option("--policy", policies, "conventional, proactive (pdronetim), opt")->default_val(
      std::vector<std::string>{"proactive"});
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");

  auto* sweep = app.add_subcommand("sweep", "Mean and standard error over a parameter grid");
  sweep->add_option("--scenario", scenario_path, "Base scenario JSON file");
  sweep->add_option("--axis", axes, "name=v1,v2,... (repeatable)")->required();
  sweep->add_option("--trials", trials, "Paired trials per grid point")->default_val(10);
  sweep->add_option("--policy", policies, "Policies to evaluate")->default_val(
      std::vector<std::string>{"proactive"});
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--seed", seed, "Override the scenario seed");

  auto* replay = app.add_subcommand("replay", "Re-run a manifest written by run or sweep");
  replay->add_option("--manifest", manifest_path, "manifest.json")->required();
  replay->add_option("--out", out_dir, "Output directory")->required();

  auto* dump = app.add_subcommand("dump-network", "Write the scenario's road network as JSON");
  dump->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  dump->add_option("--out", dump_out, "Output file (stdout when omitted)");
  dump->add_option("--seed", seed, "Override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*run || *sweep) {
      const Scenario sc = scenario_from_options(scenario_path, incidents_path, seed);
      RunManifest m;
      m.command = *run ? "run" : "sweep";
      if (!scenario_path.empty()) m.scenario_path = scenario_path;
      m.scenario = sc.to_json();
      m.out_dir = out_dir;
      m.seed = sc.seed;
      m.policies = policy_names(parse_policies(policies));
      if (*sweep) {
        for (const std::string& a : axes) m.axes.push_back(parse_axis(a));
        m.trials = trials;
      }
      std::cout << execute_manifest(m, out_dir, default_workers());
    } else if (*replay) {
      std::ifstream in(manifest_path);
      if (!in) throw InputError("cannot read manifest " + manifest_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw InputError(std::string("manifest is not valid JSON: ") + e.what());
      }
      std::cout << execute_manifest(RunManifest::from_json(j), out_dir, default_workers());
    } else if (*dump) {
      const Scenario sc = scenario_from_options(scenario_path, "", seed);
      const std::string text = materialize(sc).net.to_json().dump(2) + "\n";
      if (dump_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(dump_out);
        if (!(out << text)) throw InputError("cannot write " + dump_out);
      }
    }
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const ModelDomainError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModel;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModel;
  }
  return kOk;
}
