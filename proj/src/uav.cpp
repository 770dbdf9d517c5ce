#include "ptim/uav.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "ptim/errors.hpp"

namespace ptim {

namespace {

constexpr std::array<double, 5> kHazardReduction{0.03, 0.05, 0.07, 0.09, 0.11};

std::size_t matrix_index(int severity, int sparsity, int hazard) {
  if (severity < 1 || severity > 4) throw InputError("severity must be in 1..4");
  if (sparsity < 1 || sparsity > 5) throw InputError("sensor sparsity must be in 1..5");
  if (hazard < 1 || hazard > 5) throw InputError("hazard index must be in 1..5");
  return static_cast<std::size_t>(((severity - 1) * 5 + (sparsity - 1)) * 5 + (hazard - 1));
}

}  // namespace

HazardIndex::HazardIndex(int l) : level(l) {
  if (l < 1 || l > 5) throw InputError("hazard index must be in 1..5, got " + std::to_string(l));
}

double HazardIndex::reduction() const { return kHazardReduction[static_cast<std::size_t>(level - 1)]; }

SensorSparsity::SensorSparsity(int l) : level(l) {
  if (l < 1 || l > 5) throw InputError("sensor sparsity must be in 1..5, got " + std::to_string(l));
}

PriorityMatrix PriorityMatrix::standard() {
  PriorityMatrix m;
  for (int w = 1; w <= 4; ++w) {
    for (int ss = 1; ss <= 5; ++ss) {
      for (int hi = 1; hi <= 5; ++hi) m.set(w, ss, hi, static_cast<double>(w * (ss + hi)));
    }
  }
  return m;
}

PriorityMatrix PriorityMatrix::from_json(const nlohmann::json& j) {
  // [severity][sparsity][hazard]
  PriorityMatrix m;
  try {
    if (!j.is_array() || j.size() != 4) throw InputError("priority matrix needs 4 severity rows");
    for (int w = 0; w < 4; ++w) {
      if (!j[w].is_array() || j[w].size() != 5) throw InputError("priority matrix needs 5 sparsity rows");
      for (int ss = 0; ss < 5; ++ss) {
        if (!j[w][ss].is_array() || j[w][ss].size() != 5) {
          throw InputError("priority matrix needs 5 hazard columns");
        }
        for (int hi = 0; hi < 5; ++hi) m.set(w + 1, ss + 1, hi + 1, j[w][ss][hi].get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed priority matrix: ") + e.what());
  }
  return m;
}

double PriorityMatrix::benefit(int severity, int sparsity, int hazard) const {
  return values_[matrix_index(severity, sparsity, hazard)];
}

void PriorityMatrix::set(int severity, int sparsity, int hazard, double value) {
  values_[matrix_index(severity, sparsity, hazard)] = value;
}

nlohmann::json PriorityMatrix::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (int w = 1; w <= 4; ++w) {
    nlohmann::json rows = nlohmann::json::array();
    for (int ss = 1; ss <= 5; ++ss) {
      nlohmann::json cols = nlohmann::json::array();
      for (int hi = 1; hi <= 5; ++hi) cols.push_back(benefit(w, ss, hi));
      rows.push_back(std::move(cols));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

double priority_benefit(int severity, int sparsity, int hazard) {
  static const PriorityMatrix m = PriorityMatrix::standard();
  return m.benefit(severity, sparsity, hazard);
}

double uav_utility(const UavTarget& target, const UavState& uav, const GridNetwork& net,
                   const UavConfig& cfg) {
  if (!(cfg.hours_per_benefit_unit > 0.0)) throw InputError("flight-time exchange rate must be positive");
  return target.benefit - net.travel_time(uav.cell, target.cell) / cfg.hours_per_benefit_unit;
}

DcopProblem build_uav_problem(std::span<const UavTarget> targets, std::span<const UavState> uavs,
                              const GridNetwork& net, const UavConfig& cfg) {
  DcopProblem p(Sense::Maximize);
  if (targets.empty() || uavs.empty()) return p;

  // One target per cell: keep the most valuable.
  std::vector<UavTarget> unique;
  for (const UavTarget& t : targets) {
    auto it = std::find_if(unique.begin(), unique.end(),
                           [&](const UavTarget& u) { return u.cell == t.cell; });
    if (it == unique.end()) {
      unique.push_back(t);
    } else if (t.benefit > it->benefit) {
      *it = t;
    }
  }
  std::sort(unique.begin(), unique.end(),
            [](const UavTarget& a, const UavTarget& b) { return a.cell < b.cell; });

  const int cells = net.cell_count();
  auto tables = std::make_shared<std::vector<std::vector<double>>>();
  for (const UavState& uav : uavs) {
    std::vector<CellId> domain{CellId::none()};
    std::vector<double> table(static_cast<std::size_t>(cells), std::nan(""));
    for (const UavTarget& t : unique) {
      domain.push_back(t.cell);
      table[t.cell.value] = uav_utility(t, uav, net, cfg);
    }
    tables->push_back(std::move(table));
    p.add_agent(uav.id, std::move(domain));
  }

  auto utility = [tables](std::size_t agent, CellId x) {
    return x.valid() ? (*tables)[agent][x.value] : 0.0;
  };
  if (p.size() == 1) {
    p.add_unary(0, [utility](CellId x) { return utility(0, x); });
  } else {
    p.connect_all([utility](std::size_t a, std::size_t b) -> BinaryCost {
      return [utility, a, b](CellId x, CellId y) {
        if (x.valid() && x == y) return -kInfinity;
        return utility(a, x) + utility(b, y);
      };
    });
  }
  return p;
}

double assimilation_weight(double prior_variance, double observation_variance) {
  if (prior_variance < 0.0 || observation_variance < 0.0) {
    throw InputError("variances must be non-negative");
  }
  const double total = prior_variance + observation_variance;
  if (!(total > 0.0)) throw InputError("prior and observation variances cannot both be zero");
  if (std::isinf(observation_variance)) return 0.0;
  return prior_variance / total;
}

DelayBelief assimilate(const DelayBelief& prior, const DelayBelief& observation) {
  const double beta = assimilation_weight(prior.variance, observation.variance);
  return {(1.0 - beta) * prior.mean + beta * observation.mean, (1.0 - beta) * prior.variance};
}

DelayBelief simulate_observation(const DelayBelief& prior, double kappa, Rng& rng) {
  if (kappa < 0.0) throw InputError("observation kappa must be non-negative");
  std::normal_distribution<double> z(0.0, 1.0);
  const double latent = std::max(0.0, prior.mean + std::sqrt(prior.variance) * z(rng));
  const double obs_var = kappa * prior.variance;
  const double observed = std::max(0.0, latent + std::sqrt(obs_var) * z(rng));
  return {observed, obs_var};
}

double cooperation_effect(double response_time, HazardIndex hi, bool uav_assigned_same_cell) {
  if (response_time < 0.0) throw InputError("response time must be non-negative");
  return uav_assigned_same_cell ? response_time * (1.0 - hi.reduction()) : response_time;
}

}  // namespace ptim
