#include "ptim/opt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "ptim/errors.hpp"

namespace ptim {

namespace {

constexpr int kMaxJobs = 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Label {
  double finish = 0.0;
  double cost = 0.0;
  int prev_last = -1;
  int prev_label = -1;
};

struct Step {
  double start, response, delay, finish;
};

class VehicleDp {
 public:
  VehicleDp(const GridNetwork& net, const OptVehicle& v, std::span<const OptJob> jobs)
      : net_(net), vehicle_(v), jobs_(jobs), m_(static_cast<int>(jobs.size())) {}

  Step step(CellId from, double free, int j) const {
    const OptJob& job = jobs_[static_cast<std::size_t>(j)];
    const double arrive = free + net_.travel_time(from, job.cell) * job.travel_factor;
    const double start = std::max(arrive, job.report_time);
    const double response = start - job.report_time;
    const double delay = expected_delay(job.params, response);
    return {start, response, delay, start + job.params.clearance};
  }

  // Minimum cost of serving exactly the jobs in each subset of `universe`
  // (indexed by full-width masks). Labels are kept when `keep` is set so a
  // route can be rebuilt.
  std::vector<double> run(std::uint32_t universe, bool keep) {
    const std::size_t states = std::size_t{1} << m_;
    labels_.assign(keep ? states * static_cast<std::size_t>(m_) : 0, {});
    std::vector<std::vector<Label>> cur(states * static_cast<std::size_t>(m_));
    std::vector<double> best(states, kInf);
    best[0] = 0.0;
    for (int j = 0; j < m_; ++j) {
      if (!(universe >> j & 1u)) continue;
      const Step s = step(vehicle_.start, 0.0, j);
      cur[slot(1u << j, j)].push_back({s.finish, s.delay, -1, -1});
    }
    for (std::uint32_t S = 1; S < states; ++S) {
      if ((S & ~universe) != 0) continue;
      for (int last = 0; last < m_; ++last) {
        if (!(S >> last & 1u)) continue;
        auto& ls = cur[slot(S, last)];
        for (std::size_t li = 0; li < ls.size(); ++li) {
          const Label lab = ls[li];
          best[S] = std::min(best[S], lab.cost);
          for (int j = 0; j < m_; ++j) {
            if ((S >> j & 1u) || !(universe >> j & 1u)) continue;
            const Step s = step(jobs_[static_cast<std::size_t>(last)].cell, lab.finish, j);
            insert(cur[slot(S | (1u << j), j)],
                   {s.finish, lab.cost + s.delay, last, static_cast<int>(li)});
          }
        }
        if (keep) {
          labels_[slot(S, last)] = std::move(ls);
        } else {
          std::vector<Label>().swap(ls);
        }
      }
    }
    return best;
  }

  // Cheapest order for exactly the jobs in `subset`; run(subset, true) first.
  std::vector<int> route(std::uint32_t subset) const {
    int best_last = -1;
    int best_label = -1;
    double best_cost = kInf;
    for (int last = 0; last < m_; ++last) {
      if (!(subset >> last & 1u)) continue;
      const auto& ls = labels_[slot(subset, last)];
      for (std::size_t li = 0; li < ls.size(); ++li) {
        if (ls[li].cost < best_cost) {
          best_cost = ls[li].cost;
          best_last = last;
          best_label = static_cast<int>(li);
        }
      }
    }
    std::vector<int> order;
    std::uint32_t S = subset;
    while (best_last >= 0) {
      order.push_back(best_last);
      const Label& lab = labels_[slot(S, best_last)][static_cast<std::size_t>(best_label)];
      S &= ~(1u << best_last);
      best_last = lab.prev_last;
      best_label = lab.prev_label;
    }
    std::reverse(order.begin(), order.end());
    return order;
  }

 private:
  std::size_t slot(std::uint32_t S, int last) const {
    return static_cast<std::size_t>(S) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(last);
  }

  // Keeps only labels not dominated in both finish time and cost.
  static void insert(std::vector<Label>& set, const Label& lab) {
    for (const Label& o : set) {
      if (o.finish <= lab.finish && o.cost <= lab.cost) return;
    }
    std::erase_if(set, [&](const Label& o) { return lab.finish <= o.finish && lab.cost <= o.cost; });
    set.push_back(lab);
  }

  const GridNetwork& net_;
  OptVehicle vehicle_;
  std::span<const OptJob> jobs_;
  int m_;
  std::vector<std::vector<Label>> labels_;
};

}  // namespace

std::uint64_t clairvoyant_work(std::size_t vehicles, std::size_t jobs) {
  if (jobs > 40) return std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t subsets = std::uint64_t{1} << jobs;
  std::uint64_t pow3 = 1;
  for (std::size_t i = 0; i < jobs; ++i) pow3 *= 3;
  return vehicles * (subsets * jobs * jobs + pow3);
}

OptPlan solve_clairvoyant(const GridNetwork& net, std::span<const OptVehicle> vehicles,
                          std::span<const OptJob> jobs, std::uint64_t cap) {
  const std::size_t m = jobs.size();
  if (vehicles.empty() && m > 0) throw ModelDomainError("no vehicles to serve the incidents");
  if (m > static_cast<std::size_t>(kMaxJobs)) {
    throw CapExceededError("clairvoyant search limited to " + std::to_string(kMaxJobs) +
                           " incidents, got " + std::to_string(m));
  }
  const std::uint64_t work = clairvoyant_work(vehicles.size(), m);
  if (work > cap) {
    throw CapExceededError("clairvoyant search needs about " + std::to_string(work) +
                           " steps, cap is " + std::to_string(cap));
  }
  for (const OptJob& job : jobs) {
    if (!net.contains(job.cell)) throw InputError("incident at an invalid cell");
    if (job.travel_factor < 0.0) throw InputError("travel factor must be non-negative");
  }

  OptPlan plan;
  plan.routes.assign(vehicles.size(), {});
  plan.serve.assign(m, {});
  if (m == 0) return plan;

  const std::size_t states = std::size_t{1} << m;
  const std::uint32_t full = static_cast<std::uint32_t>(states - 1);

  // f[S]: best cost of serving S with the vehicles seen so far.
  std::vector<double> f;
  std::vector<std::vector<std::uint32_t>> choice(vehicles.size());
  for (std::size_t k = 0; k < vehicles.size(); ++k) {
    VehicleDp dp(net, vehicles[k], jobs);
    const std::vector<double> g = dp.run(full, false);
    auto& pick = choice[k];
    pick.assign(states, 0);
    if (k == 0) {
      f = g;
      for (std::uint32_t S = 0; S < states; ++S) pick[S] = S;
      continue;
    }
    std::vector<double> next(states, kInf);
    for (std::uint32_t S = 0; S < states; ++S) {
      // T walks the submasks of S, largest first, ending with the empty set.
      std::uint32_t T = S;
      while (true) {
        const double c = f[S & ~T] + g[T];
        if (c < next[S]) {
          next[S] = c;
          pick[S] = T;
        }
        if (T == 0) break;
        T = (T - 1) & S;
      }
    }
    f = std::move(next);
  }

  plan.total_delay = f[full];
  std::uint32_t rest = full;
  for (std::size_t k = vehicles.size(); k-- > 0;) {
    const std::uint32_t mine = choice[k][rest];
    rest &= ~mine;
    if (mine == 0) continue;
    VehicleDp dp(net, vehicles[k], jobs);
    dp.run(mine, true);
    plan.routes[k] = dp.route(mine);
    CellId pos = vehicles[k].start;
    double free = 0.0;
    for (int j : plan.routes[k]) {
      const Step s = dp.step(pos, free, j);
      plan.serve[static_cast<std::size_t>(j)] = {static_cast<int>(k), s.start, s.response, s.delay};
      pos = jobs[static_cast<std::size_t>(j)].cell;
      free = s.finish;
    }
  }
  return plan;
}

}  // namespace ptim
