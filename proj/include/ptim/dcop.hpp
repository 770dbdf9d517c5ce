#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ptim/network.hpp"

namespace ptim {

enum class Sense { Minimize, Maximize };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// One value per agent, indexed like DcopProblem::agents().
struct Assignment {
  std::vector<CellId> values;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

using BinaryCost = std::function<double(CellId, CellId)>;
using UnaryCost = std::function<double(CellId)>;

struct BinaryConstraint {
  std::size_t a = 0;
  std::size_t b = 0;
  BinaryCost cost;
};

struct UnaryConstraint {
  std::size_t agent = 0;
  UnaryCost cost;
};

// Agents, their domains and cost (or utility) functions. Conflicts are
// expressed by returning +inf (minimise) or -inf (maximise); infinities are
// absorbing under addition.
class DcopProblem {
 public:
  explicit DcopProblem(Sense sense = Sense::Minimize) : sense_(sense) {}

  std::size_t add_agent(int id, std::vector<CellId> domain);
  void add_binary(std::size_t a, std::size_t b, BinaryCost cost);
  void add_unary(std::size_t agent, UnaryCost cost);

  Sense sense() const { return sense_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  int agent_id(std::size_t agent) const { return ids_.at(agent); }
  const std::vector<int>& agent_ids() const { return ids_; }
  const std::vector<CellId>& domain(std::size_t agent) const { return domains_.at(agent); }
  const std::vector<BinaryConstraint>& binary_constraints() const { return binary_; }
  const std::vector<UnaryConstraint>& unary_constraints() const { return unary_; }
  const std::vector<std::size_t>& neighbors(std::size_t agent) const { return neighbors_.at(agent); }

  // Adds a binary constraint between every pair of agents.
  void connect_all(const std::function<BinaryCost(std::size_t, std::size_t)>& make);

  // Value of the worst possible outcome (+inf or -inf).
  double worst() const { return sense_ == Sense::Minimize ? kInfinity : -kInfinity; }
  // True when x is strictly preferred over y.
  bool better(double x, double y) const { return sense_ == Sense::Minimize ? x < y : x > y; }
  // Improvement obtained by going from `from` to `to`; zero when both are
  // the worst value.
  double improvement(double from, double to) const;

  // Sum of all constraints touching `agent` when it takes `value` and every
  // other agent keeps its value in `a`.
  double local_cost(std::size_t agent, CellId value, const Assignment& a) const;

  // Throws InputError when the problem is malformed.
  void validate() const;

 private:
  Sense sense_;
  std::vector<int> ids_;
  std::vector<std::vector<CellId>> domains_;
  std::vector<BinaryConstraint> binary_;
  std::vector<UnaryConstraint> unary_;
  std::vector<std::vector<std::size_t>> binary_of_;  // constraint indices per agent
  std::vector<std::vector<std::size_t>> unary_of_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

// Sum of all constraint evaluations. Throws InputError on an incomplete
// assignment.
double total_cost(const DcopProblem& p, const Assignment& a);

struct OptimumResult {
  Assignment assignment;
  double cost = 0.0;
  std::uint64_t evaluated = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// Exhaustive enumeration in lexicographic order of domain indices (agent 0
// most significant); the first optimum found is kept. Throws
// CapExceededError when the product of domain sizes exceeds `cap`.
OptimumResult brute_force_optimum(const DcopProblem& p,
                                  std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace ptim
