#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptim/network.hpp"

namespace ptim {

// Probability of a primary (independent) incident per cell and stage.
class PrimaryProbField {
 public:
  PrimaryProbField() = default;
  PrimaryProbField(int cells, int stages);

  int cells() const { return cells_; }
  int stages() const { return stages_; }

  // Stages outside [0, stages) read as zero probability.
  double at(CellId cell, int stage) const;
  void set(CellId cell, int stage, double p);

 private:
  int cells_ = 0;
  int stages_ = 0;
  std::vector<double> values_;  // stage-major
};

struct KernelEntry {
  CellId j;  // source of the primary incident
  CellId k;  // cell where the secondary incident may occur
  int lag = 1;  // stages between the two, 1 or 2
  double value = 0.0;
};

// Secondary-incident density ratios: how strongly a primary incident at j,
// lag stages earlier, raises the incident probability at k.
class DependencyKernel {
 public:
  DependencyKernel() = default;
  explicit DependencyKernel(int cells);

  int cells() const { return cells_; }
  void add(const KernelEntry& e);
  void set(const KernelEntry& e);
  double value(CellId j, CellId k, int lag) const;
  const std::vector<std::pair<CellId, double>>& sources(CellId k, int lag) const;
  std::vector<KernelEntry> entries() const;

  // Couples each cell to its 4-neighbourhood with fixed ratios per lag.
  static DependencyKernel four_neighborhood(const GridNetwork& net, double lag1 = 0.3,
                                            double lag2 = 0.1);

 private:
  int cells_ = 0;
  std::vector<std::vector<std::pair<CellId, double>>> by_target_[2];
};

// Primary probability at (k, stage) plus lag-1 and lag-2 secondary
// contributions, clamped to [0, 1].
double expected_probability(const PrimaryProbField& field, const DependencyKernel& kernel,
                            CellId k, int stage);

struct FieldConfig {
  double lo = 0.0;
  double hi = 0.15;
  bool normalize = false;  // rescale stages whose sum exceeds budget
  double budget = 1.0;
};

PrimaryProbField generate_field(const GridNetwork& net, int stages, std::uint64_t seed,
                                const FieldConfig& config = {});

// Field and kernel together, with the expected probabilities precomputed for
// every cell and stage. Immutable.
class Forecast {
 public:
  Forecast() = default;
  Forecast(PrimaryProbField field, DependencyKernel kernel);

  const PrimaryProbField& field() const { return field_; }
  const DependencyKernel& kernel() const { return kernel_; }
  int cells() const { return field_.cells(); }
  int stages() const { return field_.stages(); }

  double probability(CellId cell, int stage) const;
  // Expected probabilities of one stage normalised to sum to one (all zeros
  // when the stage carries no probability mass).
  const std::vector<double>& distribution(int stage) const;

  nlohmann::json to_json() const;
  static Forecast from_json(const nlohmann::json& j);

 private:
  PrimaryProbField field_;
  DependencyKernel kernel_;
  std::vector<double> expected_;  // stage-major
  std::vector<std::vector<double>> normalized_;
  std::vector<double> zeros_;
};

}  // namespace ptim
