#include "ptim/dcop.hpp"

#include <algorithm>
#include <string>

#include "ptim/errors.hpp"

namespace ptim {

std::size_t DcopProblem::add_agent(int id, std::vector<CellId> domain) {
  ids_.push_back(id);
  domains_.push_back(std::move(domain));
  binary_of_.emplace_back();
  unary_of_.emplace_back();
  neighbors_.emplace_back();
  return ids_.size() - 1;
}

void DcopProblem::add_binary(std::size_t a, std::size_t b, BinaryCost cost) {
  if (a >= size() || b >= size() || a == b) {
    throw InputError("binary constraint must reference two distinct declared agents");
  }
  binary_.push_back({a, b, std::move(cost)});
  binary_of_[a].push_back(binary_.size() - 1);
  binary_of_[b].push_back(binary_.size() - 1);
  auto link = [this](std::size_t x, std::size_t y) {
    auto& n = neighbors_[x];
    if (std::find(n.begin(), n.end(), y) == n.end()) {
      n.insert(std::upper_bound(n.begin(), n.end(), y), y);
    }
  };
  link(a, b);
  link(b, a);
}

void DcopProblem::add_unary(std::size_t agent, UnaryCost cost) {
  if (agent >= size()) throw InputError("unary constraint references an undeclared agent");
  unary_.push_back({agent, std::move(cost)});
  unary_of_[agent].push_back(unary_.size() - 1);
}

void DcopProblem::connect_all(const std::function<BinaryCost(std::size_t, std::size_t)>& make) {
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = a + 1; b < size(); ++b) add_binary(a, b, make(a, b));
  }
}

double DcopProblem::improvement(double from, double to) const {
  if (from == to) return 0.0;  // also covers inf == inf
  return sense_ == Sense::Minimize ? from - to : to - from;
}

double DcopProblem::local_cost(std::size_t agent, CellId value, const Assignment& a) const {
  double sum = 0.0;
  for (std::size_t ci : unary_of_[agent]) sum += unary_[ci].cost(value);
  for (std::size_t ci : binary_of_[agent]) {
    const BinaryConstraint& c = binary_[ci];
    sum += c.a == agent ? c.cost(value, a.values[c.b]) : c.cost(a.values[c.a], value);
  }
  return sum;
}

void DcopProblem::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (domains_[i].empty()) {
      throw InputError("agent " + std::to_string(ids_[i]) + " has an empty domain");
    }
  }
}

double total_cost(const DcopProblem& p, const Assignment& a) {
  if (a.values.size() != p.size()) throw InputError("assignment does not cover every agent");
  double sum = 0.0;
  for (const UnaryConstraint& c : p.unary_constraints()) sum += c.cost(a.values[c.agent]);
  for (const BinaryConstraint& c : p.binary_constraints()) {
    sum += c.cost(a.values[c.a], a.values[c.b]);
  }
  return sum;
}

OptimumResult brute_force_optimum(const DcopProblem& p, std::uint64_t cap) {
  p.validate();
  const std::size_t n = p.size();
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t d = p.domain(i).size();
    if (space > cap / d) {
      throw CapExceededError("search space exceeds the enumeration cap of " +
                             std::to_string(cap));
    }
    space *= d;
  }
  if (space > cap) {
    throw CapExceededError("search space exceeds the enumeration cap of " + std::to_string(cap));
  }

  std::vector<std::size_t> idx(n, 0);
  Assignment current;
  current.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) current.values[i] = p.domain(i)[0];

  OptimumResult best;
  best.assignment = current;
  best.cost = total_cost(p, current);
  best.evaluated = 1;
  if (n == 0) return best;
  // Odometer with the last agent varying fastest gives lexicographic order.
  while (true) {
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < p.domain(pos).size()) {
        current.values[pos] = p.domain(pos)[idx[pos]];
        break;
      }
      idx[pos] = 0;
      current.values[pos] = p.domain(pos)[0];
      if (pos == 0) return best;
    }
    const double c = total_cost(p, current);
    ++best.evaluated;
    if (p.better(c, best.cost)) {
      best.cost = c;
      best.assignment = current;
    }
  }
}

}  // namespace ptim
