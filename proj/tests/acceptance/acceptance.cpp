// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "ptim/dcop.hpp"
#include "ptim/errors.hpp"
#include "ptim/incidents.hpp"
#include "ptim/report.hpp"
#include "ptim/scenario.hpp"
#include "ptim/solvers.hpp"
#include "ptim/stats.hpp"
#include "ptim/sweep.hpp"
#include "ptim/uav.hpp"

namespace fs = std::filesystem;
using namespace ptim;

namespace {

int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

void criterion(int id, const std::string& title, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2fs", secs);
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << title << " | " << o.detail
            << " | " << buf << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Scenario tim_scenario(std::uint64_t seed, int ervs, int incidents) {
  Scenario sc;
  sc.seed = seed;
  sc.ervs = ervs;
  sc.uavs = 0;
  sc.schedule = {{0, incidents}};
  sc.solver.iterations = 45;
  return sc;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Files present in both directories with identical bytes, and nothing else.
bool same_tree(const fs::path& a, const fs::path& b, std::string& why, int& files) {
  std::vector<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a)) na.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) nb.push_back(e.path().filename().string());
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  if (na != nb) {
    why = "different file sets";
    return false;
  }
  for (const std::string& n : na) {
    if (read_all(a / n) != read_all(b / n)) {
      why = n + " differs";
      return false;
    }
  }
  files = static_cast<int>(na.size());
  return true;
}

}  // namespace

int main() {
  // Instances shared by criteria 1 and 2.
  std::vector<DcopProblem> instances;
  for (std::uint64_t i = 0; i < 100; ++i) instances.push_back(oracle::random_instance(i));

  criterion(1, "MGM and DSA(0.9, 45 it) never beat the brute-force optimum; DSA optimal on >= 60%", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    int below = 0, dsa_opt = 0, mgm_opt = 0, oracle_mismatch = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const DcopProblem& p = instances[i];
      const OptimumResult opt = brute_force_optimum(p);
      if (!same(opt.cost, oracle::enumerate_optimum(p).cost)) ++oracle_mismatch;
      SolverConfig mgm{Algorithm::MGM, 45, 0.9, 100 + i};
      SolverConfig dsa{Algorithm::DSA, 45, 0.9, 100 + i};
      const double cm = solve(p, mgm).final_cost;
      const double cd = solve(p, dsa).final_cost;
      if (cm < opt.cost && !same(cm, opt.cost)) ++below;
      if (cd < opt.cost && !same(cd, opt.cost)) ++below;
      if (same(cd, opt.cost)) ++dsa_opt;
      if (same(cm, opt.cost)) ++mgm_opt;
    }
    const double secs = seconds_since(t0);
    const bool pass = below == 0 && oracle_mismatch == 0 && dsa_opt >= 60 && secs < 10.0;
    return Outcome{pass, "below-optimum " + std::to_string(below) + ", DSA optimal " +
                             std::to_string(dsa_opt) + "/100, MGM optimal " + std::to_string(mgm_opt) +
                             "/100, oracle mismatches " + std::to_string(oracle_mismatch) + ", " +
                             fmt("%.2f s (limit 10 s)", secs)};
  });

  criterion(2, "MGM terminates in a 1-local optimum on every criterion-1 instance", [&] {
    int bad = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      SolverConfig mgm{Algorithm::MGM, 45, 0.9, 100 + i};
      const SolveTrace t = solve(instances[i], mgm);
      if (!oracle::is_local_optimum(instances[i], t.last)) ++bad;
    }
    return Outcome{bad == 0, std::to_string(bad) + " of 100 final assignments improvable by one agent"};
  });

  // Paired TIM scenarios for criteria 3 and 4.
  std::vector<double> d_mgm, d_09, d_05, d_01;
  double paired_secs = 0.0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < 100; ++i) {
      Scenario sc = tim_scenario(3000 + i, 3, 5);
      const World w = materialize(sc);
      sc.solver.algorithm = Algorithm::MGM;
      d_mgm.push_back(run_policy(sc, w, Policy::Proactive).total_delay);
      sc.solver.algorithm = Algorithm::DSA;
      for (auto [thr, out] : {std::pair{0.9, &d_09}, std::pair{0.5, &d_05}, std::pair{0.1, &d_01}}) {
        sc.solver.dsa_threshold = thr;
        out->push_back(run_policy(sc, w, Policy::Proactive).total_delay);
      }
    }
    paired_secs = seconds_since(t0);
  }

  criterion(3, "DSA(0.9) mean delay <= MGM over 100 paired scenarios, sign test p < 0.05", [&] {
    std::size_t wins = 0, losses = 0;
    for (std::size_t i = 0; i < d_mgm.size(); ++i) {
      if (same(d_09[i], d_mgm[i])) continue;
      (d_09[i] < d_mgm[i] ? wins : losses)++;
    }
    const double p = sign_test_p_value(wins, losses);
    const double m_dsa = summarize(d_09).mean, m_mgm = summarize(d_mgm).mean;
    const bool pass = m_dsa <= m_mgm && p < 0.05 && paired_secs < 120.0;
    return Outcome{pass, fmt("mean DSA %.1f", m_dsa) + fmt(" vs MGM %.1f veh-h", m_mgm) + ", wins " +
                             std::to_string(wins) + " losses " + std::to_string(losses) +
                             fmt(", p = %.3g", p) + fmt(", %.1f s for 400 runs (limit 120 s)", paired_secs)};
  });

  criterion(4, "mean delay DSA(0.9) <= DSA(0.5) <= DSA(0.1) within 5% slack", [&] {
    const double a = summarize(d_09).mean, b = summarize(d_05).mean, c = summarize(d_01).mean;
    const bool pass = a <= b * 1.05 && b <= c * 1.05;
    return Outcome{pass, fmt("0.9: %.1f", a) + fmt(", 0.5: %.1f", b) + fmt(", 0.1: %.1f veh-h", c)};
  });

  criterion(5, "OPT <= proactive on 20 five-stage request sequences; proactive improves on conventional", [&] {
    int violations = 0;
    std::vector<double> improvement;
    for (std::uint64_t i = 0; i < 20; ++i) {
      Scenario sc;
      sc.seed = 5000 + i;
      sc.ervs = 3;
      sc.uavs = 3;
      sc.schedule = oracle::staged_sequence(i);
      const World w = materialize(sc);
      const double opt = run_policy(sc, w, Policy::Opt).total_delay;
      const double pro = run_policy(sc, w, Policy::Proactive).total_delay;
      const double con = run_policy(sc, w, Policy::Conventional).total_delay;
      if (opt > pro && !same(opt, pro)) ++violations;
      improvement.push_back(100.0 * (con - pro) / con);
    }
    const Summary s = summarize(improvement);
    const auto [lo, hi] = std::minmax_element(improvement.begin(), improvement.end());
    const bool pass = violations == 0 && s.mean > 0.0;
    return Outcome{pass, std::to_string(violations) + " OPT violations" +
                             fmt(", mean improvement over conventional %.1f%%", s.mean) +
                             fmt(" (range %.1f", *lo) + fmt("..%.1f%%)", *hi)};
  });

  criterion(6, "15 requests: mean delay with 9 ERVs <= 6 ERVs <= 3 ERVs over 20 paired seeds", [&] {
    std::vector<double> m3, m6, m9;
    for (std::uint64_t i = 0; i < 20; ++i) {
      m3.push_back(run_policy(tim_scenario(6000 + i, 3, 15), Policy::Proactive).total_delay);
      m6.push_back(run_policy(tim_scenario(6000 + i, 6, 15), Policy::Proactive).total_delay);
      m9.push_back(run_policy(tim_scenario(6000 + i, 9, 15), Policy::Proactive).total_delay);
    }
    const double a = summarize(m9).mean, b = summarize(m6).mean, c = summarize(m3).mean;
    return Outcome{a <= b && b <= c, fmt("9: %.0f", a) + fmt(", 6: %.0f", b) + fmt(", 3: %.0f veh-h", c)};
  });

  criterion(7, "delay model: non-negative, deterministic reduction to 1e-12, worked value to 1e-9", [&] {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> sev(1, 4);
    std::uniform_real_distribution<double> resp(0.0, 5.0);
    int negative = 0;
    double worst_rel = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Incident inc = sample_incident(sev(rng), CellId(0), 0.0, rng());
      const double r = resp(rng);
      if (expected_delay(inc.params, r) < 0.0 || delay_variance(inc.params, r) < 0.0) ++negative;
      TrafficParams p = inc.params;
      p.s1_sd = 0.0;
      p.r_var = 0.0;
      const double rbar = r + p.clearance;
      const double closed = (p.s - p.s1_mean) * (p.q - p.s1_mean) * rbar * rbar / (2.0 * (p.s - p.q));
      const double got = expected_delay(p, r);
      if (closed > 0.0) {
        worst_rel = std::max(worst_rel, std::abs(got - closed) / closed);
      } else if (got != 0.0) {
        worst_rel = std::max(worst_rel, 1.0);
      }
    }
    const TrafficParams w{1800, 1100, 200, 1500, 0.04, 0.0};
    const double worked = stochastic_delay(w, 0.8);
    const double err = std::abs(worked - 1088.0 / 3.0) / (1088.0 / 3.0);
    const bool pass = negative == 0 && worst_rel <= 1e-12 && err <= 1e-9;
    return Outcome{pass, std::to_string(negative) + " negative of 10000" +
                             fmt(", worst reduction error %.2e", worst_rel) +
                             fmt(", worked value %.9f", worked) + fmt(" (rel err %.1e)", err)};
  });

  criterion(8, "assimilation contracts variance; reduction = 2/3 at kappa 0.5; mean is convex", [&] {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> mean(0.0, 1e5), var(1e-3, 1e6), ratio(1e-3, 1e3);
    int not_contracted = 0, not_convex = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const DelayBelief prior{mean(rng), var(rng)};
      const DelayBelief obs{mean(rng), prior.variance * ratio(rng)};
      const DelayBelief post = assimilate(prior, obs);
      if (!(post.variance < prior.variance)) ++not_contracted;
      const double lo = std::min(prior.mean, obs.mean), hi = std::max(prior.mean, obs.mean);
      if (post.mean < lo - 1e-9 * hi || post.mean > hi + 1e-9 * hi) ++not_convex;
      const DelayBelief k = assimilate(prior, {obs.mean, 0.5 * prior.variance});
      worst = std::max(worst, std::abs((prior.variance - k.variance) / prior.variance - 2.0 / 3.0));
    }
    const bool pass = not_contracted == 0 && not_convex == 0 && worst <= 1e-12;
    return Outcome{pass, std::to_string(not_contracted) + " not contracted, " + std::to_string(not_convex) +
                             " outside [prior, obs]" + fmt(", worst |reduction - 2/3| %.1e", worst)};
  });

  criterion(9, "cooperation never raises delay over 20 pairs; HI 5 cuts response by exactly 11%", [&] {
    int worse = 0, better = 0, cooperated = 0, hi5_bad = 0, hi5_seen = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      Scenario sc;
      sc.seed = 9000 + i;
      sc.ervs = 3;
      sc.uavs = 3;
      const int n = 5 + static_cast<int>(i % 11);
      sc.schedule = {{0, (n + 2) / 3}, {1, (n + 1) / 3}, {2, n / 3}};
      const World w = materialize(sc);
      sc.cooperation = true;
      const RunResult on = run_policy(sc, w, Policy::Proactive);
      sc.cooperation = false;
      const RunResult off = run_policy(sc, w, Policy::Proactive);
      if (on.total_delay > off.total_delay && !same(on.total_delay, off.total_delay)) ++worse;
      if (on.total_delay < off.total_delay && !same(on.total_delay, off.total_delay)) ++better;
      for (const IncidentOutcome& o : on.incidents) {
        if (!o.cooperated) continue;
        ++cooperated;
        if (o.hazard == 5) {
          ++hi5_seen;
          const double wait = o.dispatch_time - o.report_time;
          if (std::abs(o.response_h - (wait + 0.89 * o.travel_h)) > 1e-12) ++hi5_bad;
        }
      }
    }
    const double reduced = cooperation_effect(1.0, HazardIndex(5), true);
    const bool exact = std::abs(HazardIndex(5).reduction() - 0.11) == 0.0 && std::abs(reduced - 0.89) < 1e-15;
    const bool pass = worse == 0 && exact && hi5_bad == 0;
    return Outcome{pass, std::to_string(worse) + " pairs worse, " + std::to_string(better) +
                             " strictly better, " + std::to_string(cooperated) + " supported incidents (" +
                             std::to_string(hi5_seen) + " at HI 5, " + std::to_string(hi5_bad) +
                             " off), 1.0 h at HI 5 -> " + fmt("%.2f h", reduced)};
  });

  criterion(10, "manifest replays reproduce every CSV/JSON output byte for byte", [&] {
    const fs::path root = fs::temp_directory_path() / ("ptim_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    Scenario sc;
    sc.seed = 10;
    sc.ervs = 3;
    sc.uavs = 3;
    sc.schedule = {{0, 3}, {1, 2}, {2, 2}, {3, 2}, {4, 1}};
    RunManifest run;
    run.command = "run";
    run.scenario = sc.to_json();
    run.out_dir = (root / "run_a").string();
    run.seed = sc.seed;
    run.policies = {"conventional", "proactive", "opt"};
    execute_manifest(run, (root / "run_a").string(), 1);
    const auto replay = RunManifest::from_json(nlohmann::json::parse(read_all(root / "run_a" / "manifest.json")));
    execute_manifest(replay, (root / "run_b").string(), 1);

    RunManifest sweep = run;
    sweep.command = "sweep";
    sweep.policies = {"proactive", "conventional"};
    sweep.axes = {parse_axis("threshold=0.1,0.5,0.9"), parse_axis("ervs=2,3")};
    sweep.trials = 3;
    execute_manifest(sweep, (root / "sweep_a").string(), 1);
    execute_manifest(sweep, (root / "sweep_b").string(), 3);

    std::string why_run, why_sweep;
    int n_run = 0, n_sweep = 0;
    const bool ok_run = same_tree(root / "run_a", root / "run_b", why_run, n_run);
    const bool ok_sweep = same_tree(root / "sweep_a", root / "sweep_b", why_sweep, n_sweep);
    fs::remove_all(root);
    return Outcome{ok_run && ok_sweep,
                   "run replay " + (ok_run ? std::to_string(n_run) + " files identical" : why_run) +
                       ", sweep 1 vs 3 workers " +
                       (ok_sweep ? std::to_string(n_sweep) + " files identical" : why_sweep)};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures;
}
