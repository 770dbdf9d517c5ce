#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ptim/dcop.hpp"
#include "ptim/stats.hpp"

namespace ptim {

enum class Algorithm { MGM, DSA };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::DSA;
  int iterations = 45;
  double dsa_threshold = 0.9;
  std::uint64_t seed = 1;

  void validate() const;
};

// Per-round record of a synchronous local search run.
struct SolveTrace {
  std::string variant;               // "MGM" or "DSA-B"
  std::vector<double> best_cost;     // best total cost seen up to each round
  std::vector<double> current_cost;  // total cost of the assignment after each round
  std::vector<int> moves;            // agents that changed value in each round
  std::vector<std::uint64_t> messages;  // cumulative messages after each round
  Assignment initial;
  Assignment last;   // assignment after the final round
  Assignment final;  // best assignment seen (anytime result)
  double final_cost = 0.0;
};

// Synchronous MGM or DSA-B. Each round every agent reads its neighbours'
// values from the previous round, computes its best unilateral change and
// gain, and then MGM moves only the agent whose positive gain is strictly
// largest among its neighbours (ties go to the lower agent index) while DSA
// moves every agent with a positive gain whose coin flip falls below the
// threshold. Throws InputError on empty domains.
SolveTrace solve(const DcopProblem& p, const SolverConfig& cfg);

void write_trace_csv(std::ostream& out, const SolveTrace& trace);

using ProblemGenerator = std::function<DcopProblem(std::uint64_t seed)>;

// Runs every configuration on the same generated problem per trial and
// summarises the final costs per configuration.
std::vector<Summary> monte_carlo_compare(const ProblemGenerator& generator,
                                         std::span<const SolverConfig> cfgs, int trials,
                                         std::uint64_t base_seed = 0);

}  // namespace ptim
