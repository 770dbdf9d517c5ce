#include <doctest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <random>

#include "ptim/errors.hpp"
#include "ptim/opt.hpp"

using namespace ptim;

namespace {

// Every split of the jobs over the vehicles and every service order.
double brute_force(const GridNetwork& net, const std::vector<OptVehicle>& vs,
                   const std::vector<OptJob>& jobs) {
  const std::size_t m = jobs.size();
  std::vector<int> owner(m, 0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> split = [&](std::size_t k) {
    if (k == m) {
      double total = 0.0;
      for (std::size_t v = 0; v < vs.size(); ++v) {
        std::vector<int> mine;
        for (std::size_t j = 0; j < m; ++j) {
          if (owner[j] == static_cast<int>(v)) mine.push_back(static_cast<int>(j));
        }
        double vbest = std::numeric_limits<double>::infinity();
        do {
          CellId at = vs[v].start;
          double t = 0.0, cost = 0.0;
          for (int j : mine) {
            const OptJob& job = jobs[static_cast<std::size_t>(j)];
            const double arrive = t + net.travel_time(at, job.cell) * job.travel_factor;
            const double start = std::max(arrive, job.report_time);
            cost += expected_delay(job.params, start - job.report_time);
            t = start + job.params.clearance;
            at = job.cell;
          }
          vbest = std::min(vbest, cost);
        } while (std::next_permutation(mine.begin(), mine.end()));
        total += vbest;
      }
      best = std::min(best, total);
      return;
    }
    for (std::size_t v = 0; v < vs.size(); ++v) {
      owner[k] = static_cast<int>(v);
      split(k + 1);
    }
  };
  split(0);
  return best;
}

}  // namespace

TEST_CASE("clairvoyant optimum matches brute force over splits and orders") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const GridNetwork net = build_grid(5, 5, {0.1, 1.5}, 700 + trial);
    std::uniform_int_distribution<int> cell(0, 24), nv(1, 3), nj(1, 6), sev(1, 4);
    std::uniform_real_distribution<double> when(0.0, 2.0), factor(0.89, 1.0);
    std::vector<OptVehicle> vs;
    const int v = nv(rng);
    for (int i = 0; i < v; ++i) vs.push_back({i + 1, CellId(cell(rng))});
    std::vector<OptJob> jobs;
    const int m = nj(rng);
    for (int j = 0; j < m; ++j) {
      const Incident inc = sample_incident(sev(rng), CellId(cell(rng)), when(rng), rng(), j);
      jobs.push_back({j, inc.location, inc.report_time, inc.params, trial % 2 ? factor(rng) : 1.0});
    }
    const OptPlan plan = solve_clairvoyant(net, vs, jobs, 1'000'000'000);
    CHECK(plan.total_delay == doctest::Approx(brute_force(net, vs, jobs)).epsilon(1e-10));

    // the reported routes reproduce the reported total
    double sum = 0.0;
    std::vector<int> seen(jobs.size(), 0);
    for (std::size_t k = 0; k < plan.routes.size(); ++k) {
      for (int j : plan.routes[k]) {
        ++seen[static_cast<std::size_t>(j)];
        CHECK(plan.serve[static_cast<std::size_t>(j)].vehicle == static_cast<int>(k));
        sum += plan.serve[static_cast<std::size_t>(j)].delay;
      }
    }
    for (int s : seen) CHECK(s == 1);
    CHECK(sum == doctest::Approx(plan.total_delay));
  }
}

TEST_CASE("no jobs cost nothing") {
  const GridNetwork net = build_grid(3, 3, {0.1, 1.5}, 1);
  const OptVehicle vs[1] = {{1, CellId(0)}};
  const OptPlan plan = solve_clairvoyant(net, vs, {}, 100);
  CHECK(plan.total_delay == 0.0);
}

TEST_CASE("work estimate and cap") {
  CHECK(clairvoyant_work(3, 10) < clairvoyant_work(3, 12));
  CHECK(clairvoyant_work(2, 8) < clairvoyant_work(3, 8));
  const GridNetwork net = build_grid(3, 3, {0.1, 1.5}, 1);
  const OptVehicle vs[1] = {{1, CellId(0)}};
  std::vector<OptJob> jobs;
  for (int j = 0; j < 21; ++j) jobs.push_back({j, CellId(j % 9), 0.0, sample_incident(1, CellId(0), 0, j).params});
  CHECK_THROWS_AS(solve_clairvoyant(net, vs, jobs, std::numeric_limits<std::uint64_t>::max()), CapExceededError);
  jobs.resize(6);
  CHECK_THROWS_AS(solve_clairvoyant(net, vs, jobs, 5), CapExceededError);
  jobs[0].cell = CellId(40);
  CHECK_THROWS_AS(solve_clairvoyant(net, vs, jobs, 1'000'000'000), InputError);
}
