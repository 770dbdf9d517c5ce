#pragma once

#include <array>
#include <span>

#include <json.hpp>

#include "ptim/dcop.hpp"
#include "ptim/network.hpp"
#include "ptim/random.hpp"

namespace ptim {

// Hazard on the ERV's route to the incident, 1 (very low) .. 5 (very high).
// UAV support confirms the route and shortens the response accordingly.
struct HazardIndex {
  int level = 1;

  explicit HazardIndex(int l);
  // Fractional response-time reduction with UAV support: 3, 5, 7, 9 or 11 %.
  double reduction() const;
};

// Sparsity of the freeway sensor network at an incident, 1 (very low
// uncertainty) .. 5 (very high).
struct SensorSparsity {
  int level = 1;

  explicit SensorSparsity(int l);
};

struct UavState {
  int id = 0;
  CellId cell;
  double available_at = 0.0;

  bool free_at(double time) const { return available_at <= time + 1e-9; }
};

struct DelayBelief {
  double mean = 0.0;
  double variance = 0.0;
};

// Benefit of deploying a UAV, indexed by severity (1..4), sensor sparsity
// (1..5) and hazard index (1..5).
class PriorityMatrix {
 public:
  // benefit = severity * (sparsity + hazard)
  static PriorityMatrix standard();
  static PriorityMatrix from_json(const nlohmann::json& j);

  double benefit(int severity, int sparsity, int hazard) const;
  void set(int severity, int sparsity, int hazard, double value);
  nlohmann::json to_json() const;

 private:
  std::array<double, 4 * 5 * 5> values_{};
};

double priority_benefit(int severity, int sparsity, int hazard);

struct UavConfig {
  // Hours of flight that cost one benefit unit.
  double hours_per_benefit_unit = 0.1;
  // Observation variance as a fraction of the prior variance.
  double observation_kappa = 0.5;
  PriorityMatrix matrix = PriorityMatrix::standard();
};

struct UavTarget {
  int incident_id = 0;
  CellId cell;
  double benefit = 0.0;
};

// Benefit of the target minus the flight time to it in benefit units.
double uav_utility(const UavTarget& target, const UavState& uav, const GridNetwork& net,
                   const UavConfig& cfg);

// Maximisation problem over free UAVs. Domains are the target cells plus
// CellId::none() (stay idle, utility 0). Two UAVs on one target cell yield
// -inf. Empty when there are no targets or no UAVs.
DcopProblem build_uav_problem(std::span<const UavTarget> targets, std::span<const UavState> uavs,
                              const GridNetwork& net, const UavConfig& cfg);

// Precision-weighted fusion of a prior delay estimate with an observation.
// Throws InputError when both variances are zero or either is negative.
DelayBelief assimilate(const DelayBelief& prior, const DelayBelief& observation);
double assimilation_weight(double prior_variance, double observation_variance);

// Simulated UAV observation: the latent delay is drawn around the prior, the
// observation around the latent delay with variance kappa * prior variance.
DelayBelief simulate_observation(const DelayBelief& prior, double kappa, Rng& rng);

double cooperation_effect(double response_time, HazardIndex hi, bool uav_assigned_same_cell);

}  // namespace ptim
