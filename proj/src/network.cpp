#include "ptim/network.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

#include "ptim/errors.hpp"
#include "ptim/random.hpp"

namespace ptim {

namespace {

void check_dimensions(int rows, int cols) {
  if (rows < 2 || cols < 2) {
    throw InputError("grid needs at least 2 rows and 2 columns, got " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  }
}

}  // namespace

GridNetwork::GridNetwork(int rows, int cols, std::vector<Edge> edges)
    : rows_(rows), cols_(cols), edges_(std::move(edges)) {
  adjacency_.resize(static_cast<std::size_t>(cell_count()));
  for (const Edge& e : edges_) {
    adjacency_[e.a.value].emplace_back(e.b.value, e.time_h);
    adjacency_[e.b.value].emplace_back(e.a.value, e.time_h);
  }
  compute_all_pairs();
}

GridNetwork GridNetwork::from_edge_times(int rows, int cols, std::vector<double> times) {
  check_dimensions(rows, cols);
  if (times.size() != grid_edge_count(rows, cols)) {
    throw InputError("expected " + std::to_string(grid_edge_count(rows, cols)) +
                     " edge times, got " + std::to_string(times.size()));
  }
  std::vector<Edge> edges;
  edges.reserve(times.size());
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      if (c + 1 < cols) edges.push_back({CellId(id), CellId(id + 1), times[k++]});
      if (r + 1 < rows) edges.push_back({CellId(id), CellId(id + cols), times[k++]});
    }
  }
  for (const Edge& e : edges) {
    if (!(e.time_h > 0.0)) throw InputError("edge travel times must be positive");
  }
  return GridNetwork(rows, cols, std::move(edges));
}

// Dijkstra from every source; the grid is small enough that the full table
// is cheaper than caching on demand behind a lock.
void GridNetwork::compute_all_pairs() {
  const int n = cell_count();
  dist_.assign(static_cast<std::size_t>(n) * n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  for (int src = 0; src < n; ++src) {
    double* row = &dist_[static_cast<std::size_t>(src) * n];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    row[src] = 0.0;
    frontier.emplace(0.0, src);
    while (!frontier.empty()) {
      auto [d, u] = frontier.top();
      frontier.pop();
      if (d > row[u]) continue;
      for (auto [v, w] : adjacency_[u]) {
        const double nd = d + w;
        if (nd < row[v]) {
          row[v] = nd;
          frontier.emplace(nd, v);
        }
      }
    }
  }
  // Sums taken in opposite directions can differ in the last bit; keep the
  // matrix exactly symmetric.
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double& ab = dist_[static_cast<std::size_t>(a) * n + b];
      double& ba = dist_[static_cast<std::size_t>(b) * n + a];
      ab = ba = std::min(ab, ba);
    }
  }
}

CellId GridNetwork::cell(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw InputError("cell coordinates out of range");
  }
  return CellId(row * cols_ + col);
}

std::pair<int, int> GridNetwork::coords(CellId c) const {
  if (!contains(c)) throw InputError("invalid cell id " + std::to_string(c.value));
  return {c.value / cols_, c.value % cols_};
}

double GridNetwork::travel_time(CellId from, CellId to) const {
  if (!contains(from) || !contains(to)) {
    throw InputError("invalid cell id in travel time query (" + std::to_string(from.value) +
                     ", " + std::to_string(to.value) + ")");
  }
  return dist_[static_cast<std::size_t>(from.value) * cell_count() + to.value];
}

std::span<const double> GridNetwork::times_from(CellId from) const {
  if (!contains(from)) throw InputError("invalid cell id " + std::to_string(from.value));
  return {dist_.data() + static_cast<std::size_t>(from.value) * cell_count(),
          static_cast<std::size_t>(cell_count())};
}

std::vector<CellId> GridNetwork::neighbors(CellId c) const {
  auto [r, col] = coords(c);
  std::vector<CellId> out;
  if (r > 0) out.push_back(CellId(c.value - cols_));
  if (col > 0) out.push_back(CellId(c.value - 1));
  if (col + 1 < cols_) out.push_back(CellId(c.value + 1));
  if (r + 1 < rows_) out.push_back(CellId(c.value + cols_));
  return out;
}

nlohmann::json GridNetwork::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : edges_) edges.push_back({e.a.value, e.b.value, e.time_h});
  return {{"rows", rows_}, {"cols", cols_}, {"edges", std::move(edges)}};
}

GridNetwork build_grid(int rows, int cols, TimeRange range, std::uint64_t seed) {
  check_dimensions(rows, cols);
  if (!(range.lo > 0.0) || range.hi < range.lo) {
    throw InputError("edge time range must satisfy 0 < lo <= hi");
  }
  Rng rng = make_rng(seed);
  std::vector<double> times(grid_edge_count(rows, cols));
  for (double& t : times) t = uniform(rng, range.lo, range.hi);
  return GridNetwork::from_edge_times(rows, cols, std::move(times));
}

double travel_time(const GridNetwork& net, CellId from, CellId to) {
  return net.travel_time(from, to);
}

}  // namespace ptim
