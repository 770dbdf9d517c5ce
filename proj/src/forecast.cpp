#include "ptim/forecast.hpp"

#include <algorithm>
#include <string>

#include "ptim/errors.hpp"
#include "ptim/random.hpp"

namespace ptim {

PrimaryProbField::PrimaryProbField(int cells, int stages)
    : cells_(cells), stages_(stages), values_(static_cast<std::size_t>(cells) * stages, 0.0) {
  if (cells <= 0 || stages <= 0) throw InputError("field needs positive cells and stages");
}

double PrimaryProbField::at(CellId cell, int stage) const {
  if (cell.value < 0 || cell.value >= cells_) throw InputError("cell outside probability field");
  if (stage < 0 || stage >= stages_) return 0.0;
  return values_[static_cast<std::size_t>(stage) * cells_ + cell.value];
}

void PrimaryProbField::set(CellId cell, int stage, double p) {
  if (cell.value < 0 || cell.value >= cells_ || stage < 0 || stage >= stages_) {
    throw InputError("probability field index out of range");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("probabilities must lie in [0, 1]");
  values_[static_cast<std::size_t>(stage) * cells_ + cell.value] = p;
}

DependencyKernel::DependencyKernel(int cells) : cells_(cells) {
  for (auto& lag : by_target_) lag.resize(static_cast<std::size_t>(cells));
}

namespace {

void check_entry(const KernelEntry& e, int cells) {
  if (e.j.value < 0 || e.j.value >= cells || e.k.value < 0 || e.k.value >= cells) {
    throw InputError("kernel entry references a cell outside the kernel");
  }
  if (e.lag != 1 && e.lag != 2) throw InputError("kernel lag must be 1 or 2");
  if (!(e.value >= 0.0)) throw InputError("kernel ratios must be non-negative");
}

}  // namespace

void DependencyKernel::add(const KernelEntry& e) {
  check_entry(e, cells_);
  auto& list = by_target_[e.lag - 1][e.k.value];
  for (auto& [j, v] : list) {
    if (j == e.j) {
      v += e.value;
      return;
    }
  }
  list.emplace_back(e.j, e.value);
}

void DependencyKernel::set(const KernelEntry& e) {
  check_entry(e, cells_);
  auto& list = by_target_[e.lag - 1][e.k.value];
  for (auto& [j, v] : list) {
    if (j == e.j) {
      v = e.value;
      return;
    }
  }
  list.emplace_back(e.j, e.value);
}

double DependencyKernel::value(CellId j, CellId k, int lag) const {
  for (const auto& [src, v] : sources(k, lag)) {
    if (src == j) return v;
  }
  return 0.0;
}

const std::vector<std::pair<CellId, double>>& DependencyKernel::sources(CellId k, int lag) const {
  if (lag != 1 && lag != 2) throw InputError("kernel lag must be 1 or 2");
  if (k.value < 0 || k.value >= cells_) throw InputError("cell outside dependency kernel");
  return by_target_[lag - 1][k.value];
}

std::vector<KernelEntry> DependencyKernel::entries() const {
  std::vector<KernelEntry> out;
  for (int lag = 1; lag <= 2; ++lag) {
    for (int k = 0; k < cells_; ++k) {
      for (const auto& [j, v] : by_target_[lag - 1][k]) out.push_back({j, CellId(k), lag, v});
    }
  }
  return out;
}

DependencyKernel DependencyKernel::four_neighborhood(const GridNetwork& net, double lag1,
                                                     double lag2) {
  DependencyKernel kernel(net.cell_count());
  for (int k = 0; k < net.cell_count(); ++k) {
    for (CellId j : net.neighbors(CellId(k))) {
      if (lag1 > 0.0) kernel.add({j, CellId(k), 1, lag1});
      if (lag2 > 0.0) kernel.add({j, CellId(k), 2, lag2});
    }
  }
  return kernel;
}

double expected_probability(const PrimaryProbField& field, const DependencyKernel& kernel,
                            CellId k, int stage) {
  if (stage < 0) throw InputError("stage index must be non-negative");
  if (field.cells() != kernel.cells()) throw InputError("field and kernel sizes differ");
  double p = field.at(k, stage);
  for (int lag = 1; lag <= 2; ++lag) {
    for (const auto& [j, delta] : kernel.sources(k, lag)) p += delta * field.at(j, stage - lag);
  }
  return std::clamp(p, 0.0, 1.0);
}

PrimaryProbField generate_field(const GridNetwork& net, int stages, std::uint64_t seed,
                                const FieldConfig& config) {
  if (stages < 3) throw InputError("a forecast field needs at least 3 stages");
  if (config.lo < 0.0 || config.hi > 1.0 || config.hi < config.lo) {
    throw InputError("field range must satisfy 0 <= lo <= hi <= 1");
  }
  PrimaryProbField field(net.cell_count(), stages);
  Rng rng = make_rng(seed);
  for (int u = 0; u < stages; ++u) {
    std::vector<double> row(static_cast<std::size_t>(net.cell_count()));
    double sum = 0.0;
    for (double& p : row) {
      p = uniform(rng, config.lo, config.hi);
      sum += p;
    }
    if (config.normalize && sum > config.budget && sum > 0.0) {
      for (double& p : row) p *= config.budget / sum;
    }
    for (int c = 0; c < net.cell_count(); ++c) field.set(CellId(c), u, row[c]);
  }
  return field;
}

Forecast::Forecast(PrimaryProbField field, DependencyKernel kernel)
    : field_(std::move(field)), kernel_(std::move(kernel)) {
  if (field_.cells() != kernel_.cells()) throw InputError("field and kernel sizes differ");
  const int n = field_.cells();
  expected_.resize(static_cast<std::size_t>(n) * field_.stages());
  normalized_.resize(static_cast<std::size_t>(field_.stages()));
  zeros_.assign(static_cast<std::size_t>(n), 0.0);
  for (int u = 0; u < field_.stages(); ++u) {
    double sum = 0.0;
    for (int c = 0; c < n; ++c) {
      const double p = expected_probability(field_, kernel_, CellId(c), u);
      expected_[static_cast<std::size_t>(u) * n + c] = p;
      sum += p;
    }
    auto& dist = normalized_[u];
    dist.assign(static_cast<std::size_t>(n), 0.0);
    if (sum > 0.0) {
      for (int c = 0; c < n; ++c) dist[c] = expected_[static_cast<std::size_t>(u) * n + c] / sum;
    }
  }
}

double Forecast::probability(CellId cell, int stage) const {
  if (cell.value < 0 || cell.value >= cells()) throw InputError("cell outside forecast");
  if (stage < 0 || stage >= stages()) return 0.0;
  return expected_[static_cast<std::size_t>(stage) * cells() + cell.value];
}

const std::vector<double>& Forecast::distribution(int stage) const {
  if (stage < 0 || stage >= stages()) return zeros_;
  return normalized_[stage];
}

nlohmann::json Forecast::to_json() const {
  nlohmann::json pr = nlohmann::json::array();
  for (int u = 0; u < stages(); ++u) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < cells(); ++c) row.push_back(field_.at(CellId(c), u));
    pr.push_back(std::move(row));
  }
  nlohmann::json delta = nlohmann::json::array();
  for (const KernelEntry& e : kernel_.entries()) {
    delta.push_back({{"j", e.j.value}, {"k", e.k.value}, {"lag", e.lag}, {"value", e.value}});
  }
  return {{"cells", cells()}, {"stages", stages()}, {"pr_p", std::move(pr)},
          {"delta", std::move(delta)}};
}

Forecast Forecast::from_json(const nlohmann::json& j) {
  try {
    const int cells = j.at("cells").get<int>();
    const int stages = j.at("stages").get<int>();
    PrimaryProbField field(cells, stages);
    const auto& pr = j.at("pr_p");
    if (!pr.is_array() || static_cast<int>(pr.size()) != stages) {
      throw InputError("pr_p must hold one row per stage");
    }
    for (int u = 0; u < stages; ++u) {
      if (!pr[u].is_array() || static_cast<int>(pr[u].size()) != cells) {
        throw InputError("pr_p rows must hold one value per cell");
      }
      for (int c = 0; c < cells; ++c) field.set(CellId(c), u, pr[u][c].get<double>());
    }
    DependencyKernel kernel(cells);
    if (j.contains("delta")) {
      for (const auto& e : j.at("delta")) {
        kernel.set({CellId(e.at("j").get<int>()), CellId(e.at("k").get<int>()),
                    e.at("lag").get<int>(), e.at("value").get<double>()});
      }
    }
    return Forecast(std::move(field), std::move(kernel));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed forecast: ") + e.what());
  }
}

}  // namespace ptim
