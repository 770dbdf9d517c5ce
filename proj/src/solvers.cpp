#include "ptim/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "ptim/errors.hpp"
#include "ptim/format.hpp"
#include "ptim/random.hpp"

namespace ptim {

std::string to_string(Algorithm a) { return a == Algorithm::MGM ? "mgm" : "dsa"; }

Algorithm parse_algorithm(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mgm") return Algorithm::MGM;
  if (lower == "dsa" || lower == "dsa-b") return Algorithm::DSA;
  throw InputError("unknown algorithm '" + name + "' (expected mgm or dsa)");
}

void SolverConfig::validate() const {
  if (iterations < 1) throw InputError("solver iterations must be at least 1");
  if (!(dsa_threshold >= 0.0 && dsa_threshold <= 1.0)) {
    throw InputError("DSA threshold must lie in [0, 1]");
  }
}

namespace {

Assignment initial_assignment(const DcopProblem& p, Rng& rng) {
  Assignment a;
  a.values.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& dom = p.domain(i);
    std::vector<CellId> open;
    for (CellId v : dom) {
      if (std::find(a.values.begin(), a.values.end(), v) == a.values.end()) open.push_back(v);
    }
    const auto& pool = open.empty() ? dom : open;
    a.values.push_back(pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))]);
  }
  return a;
}

std::uint64_t neighbor_links(const DcopProblem& p) {
  std::uint64_t links = 0;
  for (std::size_t i = 0; i < p.size(); ++i) links += p.neighbors(i).size();
  return links;
}

}  // namespace

SolveTrace solve(const DcopProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  p.validate();
  const std::size_t n = p.size();
  Rng rng = make_rng(cfg.seed);

  SolveTrace trace;
  trace.variant = cfg.algorithm == Algorithm::MGM ? "MGM" : "DSA-B";
  trace.initial = initial_assignment(p, rng);

  Assignment current = trace.initial;
  trace.final = current;
  trace.final_cost = total_cost(p, current);

  const std::uint64_t links = neighbor_links(p);
  std::uint64_t messages = links;  // initial value exchange

  std::vector<double> gain(n);
  std::vector<CellId> proposal(n);
  std::vector<char> move(n);

  for (int it = 0; it < cfg.iterations; ++it) {
    // `current` is the snapshot every agent received at the end of the
    // previous round; no agent sees a neighbour's in-round decision.
    for (std::size_t i = 0; i < n; ++i) {
      const double here = p.local_cost(i, current.values[i], current);
      double best = here;
      CellId best_value = current.values[i];
      for (CellId v : p.domain(i)) {
        if (v == current.values[i]) continue;
        const double c = p.local_cost(i, v, current);
        if (p.better(c, best)) {
          best = c;
          best_value = v;
        }
      }
      gain[i] = p.improvement(here, best);
      proposal[i] = best_value;
    }

    int moved = 0;
    if (cfg.algorithm == Algorithm::MGM) {
      messages += links;  // gain exchange
      for (std::size_t i = 0; i < n; ++i) {
        bool wins = gain[i] > 0.0;
        for (std::size_t j : p.neighbors(i)) {
          if (!wins) break;
          if (gain[j] > gain[i] || (gain[j] == gain[i] && j < i)) wins = false;
        }
        move[i] = wins;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double draw = uniform(rng, 0.0, 1.0);
        move[i] = gain[i] > 0.0 && draw < cfg.dsa_threshold;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (move[i]) {
        current.values[i] = proposal[i];
        ++moved;
      }
    }
    messages += links;  // new values to neighbours

    const double cost = total_cost(p, current);
    if (p.better(cost, trace.final_cost)) {
      trace.final_cost = cost;
      trace.final = current;
    }
    trace.current_cost.push_back(cost);
    trace.best_cost.push_back(trace.final_cost);
    trace.moves.push_back(moved);
    trace.messages.push_back(messages);
  }
  trace.last = current;
  return trace;
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  out << "iteration,best_cost,moves_this_round,messages\n";
  for (std::size_t i = 0; i < trace.best_cost.size(); ++i) {
    out << (i + 1) << ',' << format_number(trace.best_cost[i]) << ',' << trace.moves[i] << ','
        << trace.messages[i] << '\n';
  }
}

std::vector<Summary> monte_carlo_compare(const ProblemGenerator& generator,
                                         std::span<const SolverConfig> cfgs, int trials,
                                         std::uint64_t base_seed) {
  if (trials < 1) throw InputError("monte carlo comparison needs at least one trial");
  std::vector<std::vector<double>> finals(cfgs.size());
  for (int t = 0; t < trials; ++t) {
    const DcopProblem problem = generator(derive_seed(base_seed, static_cast<std::uint64_t>(t)));
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
      SolverConfig cfg = cfgs[c];
      cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
      finals[c].push_back(solve(problem, cfg).final_cost);
    }
  }
  std::vector<Summary> out;
  for (const auto& f : finals) out.push_back(summarize(f));
  return out;
}

}  // namespace ptim
