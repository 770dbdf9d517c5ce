#include "ptim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ptim/errors.hpp"
#include "ptim/format.hpp"
#include "ptim/random.hpp"

namespace ptim {

namespace {

constexpr std::uint64_t kTagTrial = 101;

int to_int(const std::string& name, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InputError("axis " + name + ": '" + v + "' is not an integer");
  }
}

double to_double(const std::string& name, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InputError("axis " + name + ": '" + v + "' is not a number");
  }
}

bool to_bool(const std::string& name, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw InputError("axis " + name + ": '" + v + "' is not a boolean");
}

}  // namespace

void apply_axis(Scenario& sc, const std::string& name, const std::string& value) {
  if (name == "iterations") {
    sc.solver.iterations = to_int(name, value);
  } else if (name == "threshold") {
    sc.solver.dsa_threshold = to_double(name, value);
  } else if (name == "algorithm") {
    sc.solver.algorithm = parse_algorithm(value);
  } else if (name == "ervs") {
    sc.ervs = to_int(name, value);
  } else if (name == "uavs") {
    sc.uavs = to_int(name, value);
  } else if (name == "incidents") {
    sc.incidents.clear();
    sc.schedule = {{0, to_int(name, value)}};
  } else if (name == "cooperation") {
    sc.cooperation = to_bool(name, value);
  } else if (name == "lookahead") {
    sc.erv.lookahead = to_int(name, value);
  } else if (name == "kappa") {
    sc.uav.observation_kappa = to_double(name, value);
  } else if (name == "gap") {
    sc.stage_gap_h = to_double(name, value);
  } else {
    throw InputError("unknown sweep axis '" + name + "'");
  }
  sc.validate();
}

int default_workers() {
  if (const char* env = std::getenv("PTIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr error;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepPoint> run_sweep(const Scenario& base, std::span<const SweepAxis> axes,
                                  std::span<const Policy> policies, int trials, int workers) {
  if (axes.empty()) throw InputError("sweep needs at least one axis");
  if (trials < 1) throw InputError("sweep needs at least one trial");
  if (policies.empty()) throw InputError("sweep needs at least one policy");

  // Enumerate the grid of axis values, first axis slowest.
  std::vector<std::vector<std::pair<std::string, std::string>>> grid{{}};
  for (const SweepAxis& axis : axes) {
    if (axis.values.empty()) throw InputError("axis '" + axis.name + "' has no values");
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& g : grid) {
      for (const std::string& v : axis.values) {
        auto c = g;
        c.emplace_back(axis.name, v);
        next.push_back(std::move(c));
      }
    }
    grid = std::move(next);
  }
  std::vector<Scenario> scenarios;
  for (const auto& coords : grid) {
    Scenario sc = base;
    for (const auto& [name, value] : coords) apply_axis(sc, name, value);
    scenarios.push_back(std::move(sc));
  }

  const std::size_t per_point = static_cast<std::size_t>(trials) * policies.size();
  const std::size_t jobs = scenarios.size() * per_point;
  std::vector<RunResult> results(jobs);
  parallel_for(jobs, workers, [&](std::size_t i) {
    const std::size_t point = i / per_point;
    const std::size_t trial = (i % per_point) / policies.size();
    const Policy policy = policies[i % policies.size()];
    Scenario sc = scenarios[point];
    sc.seed = derive_seed(base.seed, kTagTrial, trial);
    sc.network_seed.reset();
    results[i] = run_policy(sc, policy);
    for (StageOutcome& s : results[i].stages) s.erv_trace.reset();
  });

  std::vector<SweepPoint> points;
  for (std::size_t p = 0; p < scenarios.size(); ++p) {
    for (std::size_t k = 0; k < policies.size(); ++k) {
      std::vector<double> delay, response, utility, messages;
      for (int t = 0; t < trials; ++t) {
        const RunResult& r = results[p * per_point + static_cast<std::size_t>(t) * policies.size() + k];
        delay.push_back(r.total_delay);
        response.push_back(r.total_response_min);
        utility.push_back(r.total_uav_utility);
        messages.push_back(static_cast<double>(r.messages));
      }
      SweepPoint sp;
      sp.coords = grid[p];
      sp.policy = policies[k];
      sp.trials = trials;
      sp.delay = summarize(delay);
      sp.response_min = summarize(response);
      sp.uav_utility = summarize(utility);
      sp.messages = summarize(messages);
      points.push_back(std::move(sp));
    }
  }
  return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepAxis> axes,
                     std::span<const SweepPoint> points) {
  for (const SweepAxis& a : axes) out << a.name << ',';
  out << "policy,trials,mean_delay_veh_h,se_delay_veh_h,mean_response_min,se_response_min,"
         "mean_uav_utility,se_uav_utility,mean_messages\n";
  for (const SweepPoint& p : points) {
    for (const auto& c : p.coords) out << c.second << ',';
    out << to_string(p.policy) << ',' << p.trials << ',' << format_number(p.delay.mean) << ','
        << format_number(p.delay.std_error) << ',' << format_number(p.response_min.mean) << ','
        << format_number(p.response_min.std_error) << ',' << format_number(p.uav_utility.mean) << ','
        << format_number(p.uav_utility.std_error) << ',' << format_number(p.messages.mean) << '\n';
  }
}

std::string execute_manifest(const RunManifest& m, const std::string& out_dir, int workers) {
  const Scenario sc = Scenario::from_json(m.scenario);
  std::vector<Policy> policies;
  for (const std::string& n : m.policies) {
    const Policy p = parse_policy(n);
    if (std::find(policies.begin(), policies.end(), p) == policies.end()) policies.push_back(p);
  }
  if (policies.empty()) throw InputError("manifest lists no policies");
  std::ostringstream summary;
  if (m.command == "run") {
    const World world = materialize(sc);
    std::vector<RunResult> runs;
    for (Policy p : policies) runs.push_back(run_policy(sc, world, p));
    write_run_outputs(out_dir, m, runs);
    for (const RunResult& r : runs) {
      summary << to_string(r.policy) << ": total delay " << format_number(r.total_delay)
              << " veh-h, response " << format_number(r.total_response_min) << " min\n";
    }
  } else if (m.command == "sweep") {
    const auto points = run_sweep(sc, m.axes, policies, m.trials, workers);
    std::ostringstream csv;
    write_sweep_csv(csv, m.axes, points);
    write_file(out_dir, "sweep.csv", csv.str());
    write_file(out_dir, "manifest.json", m.to_json().dump(2) + "\n");
    summary << "wrote " << points.size() << " sweep rows\n";
  } else {
    throw InputError("unknown manifest command '" + m.command + "'");
  }
  return summary.str();
}

}  // namespace ptim
