#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ptim {

// Index of a grid cell in row-major order. A default-constructed CellId is
// "no cell" and is used where a vehicle may stay unassigned.
struct CellId {
  int value = -1;

  constexpr CellId() = default;
  constexpr explicit CellId(int v) : value(v) {}

  constexpr bool valid() const { return value >= 0; }
  static constexpr CellId none() { return CellId(); }

  friend constexpr auto operator<=>(CellId, CellId) = default;
};

struct TimeRange {
  double lo = 0.1;
  double hi = 1.5;
};

struct Edge {
  CellId a;
  CellId b;
  double time_h = 0.0;
};

// City-block road grid. Cells are intersections, edges are road segments
// with a traversal time in hours. All-pairs shortest travel times are
// computed once at construction; the object is immutable afterwards and
// safe to share between threads.
class GridNetwork {
 public:
  // Edge times listed in canonical order: for every cell in row-major order,
  // the edge to its right neighbour (if any) and then to the one below.
  static GridNetwork from_edge_times(int rows, int cols, std::vector<double> times);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cell_count() const { return rows_ * cols_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  bool contains(CellId c) const { return c.value >= 0 && c.value < cell_count(); }
  CellId cell(int row, int col) const;
  std::pair<int, int> coords(CellId c) const;

  // Shortest-path travel time in hours. Throws InputError on invalid cells.
  double travel_time(CellId from, CellId to) const;
  std::span<const double> times_from(CellId from) const;

  std::vector<CellId> neighbors(CellId c) const;

  nlohmann::json to_json() const;

 private:
  GridNetwork(int rows, int cols, std::vector<Edge> edges);
  void compute_all_pairs();

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::vector<double> dist_;  // cell_count x cell_count
};

// Number of undirected edges on a rows x cols grid.
constexpr std::size_t grid_edge_count(int rows, int cols) {
  return static_cast<std::size_t>(2 * rows * cols - rows - cols);
}

GridNetwork build_grid(int rows, int cols, TimeRange edge_time_range, std::uint64_t seed);

double travel_time(const GridNetwork& net, CellId from, CellId to);

}  // namespace ptim

template <>
struct std::hash<ptim::CellId> {
  std::size_t operator()(ptim::CellId c) const noexcept { return std::hash<int>{}(c.value); }
};
