#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wildfire {

// Value tier of a cell. Classes are fixed for the whole episode.
enum class CellClass : std::uint8_t { Red = 0, Yellow = 1, Green = 2 };

inline const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Red: return "red";
    case CellClass::Yellow: return "yellow";
    default: return "green";
  }
}

// Per-class cost of one burning cell for one time step. All entries are
// non-positive and strictly ordered: red is the most expensive to lose.
struct UtilityMap {
  double red = -10.0;
  double yellow = -5.0;
  double green = -1.0;

  double of(CellClass c) const {
    switch (c) {
      case CellClass::Red: return red;
      case CellClass::Yellow: return yellow;
      default: return green;
    }
  }

  bool valid() const { return red < yellow && yellow < green && green <= 0.0; }
};

// Full simulation state of the grid at one time step: which cells burn and
// how much fuel each has left. Immutable value; transitions return a copy.
// Invariant: a burning cell always has fuel >= 1.
struct GridState {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> fire;   // 1 = burning
  std::vector<std::uint8_t> fuel;   // remaining burnable steps, 0..m
  std::vector<CellClass> classes;

  static GridState filled(int rows, int cols, int fuel_level,
                          CellClass cls = CellClass::Green) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be positive");
    if (fuel_level < 0 || fuel_level > 255) throw std::invalid_argument("fuel level out of range");
    GridState g;
    g.rows = rows;
    g.cols = cols;
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    g.fire.assign(n, 0);
    g.fuel.assign(n, static_cast<std::uint8_t>(fuel_level));
    g.classes.assign(n, cls);
    return g;
  }

  int cell_count() const { return rows * cols; }
  int at(int r, int c) const { return r * cols + c; }
  int row_of(int cell) const { return cell / cols; }
  int col_of(int cell) const { return cell % cols; }
  bool in_range(int cell) const { return cell >= 0 && cell < cell_count(); }

  bool burning(int cell) const { return fire[static_cast<std::size_t>(cell)] != 0; }

  bool any_fire() const {
    return std::any_of(fire.begin(), fire.end(), [](std::uint8_t f) { return f != 0; });
  }

  void ignite(int cell) {
    if (fuel[static_cast<std::size_t>(cell)] == 0)
      throw std::logic_error("cannot ignite a cell with no fuel");
    fire[static_cast<std::size_t>(cell)] = 1;
  }

  // Checks the structural invariants; used by tests and debug assertions.
  bool valid() const {
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    if (rows < 1 || cols < 1) return false;
    if (fire.size() != n || fuel.size() != n || classes.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (fire[i] != 0 && fuel[i] == 0) return false;
    return true;
  }

  bool operator==(const GridState&) const = default;
};

// Suppression order for one step: the set of targeted cells. The empty set
// is the legal no-op. Targets are kept sorted and unique so actions compare
// lexicographically (no-op sorts first).
struct Action {
  std::vector<int> targets;

  static Action noop() { return {}; }

  static Action single(int cell) { return Action{{cell}}; }

  // Validates and canonicalizes a target list against a grid.
  static Action of(std::vector<int> cells, const GridState& grid) {
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
      throw std::invalid_argument("duplicate action target");
    for (int c : cells)
      if (!grid.in_range(c)) throw std::out_of_range("action target out of range");
    return Action{std::move(cells)};
  }

  bool is_noop() const { return targets.empty(); }
  int size() const { return static_cast<int>(targets.size()); }
  bool contains(int cell) const {
    return std::binary_search(targets.begin(), targets.end(), cell);
  }

  auto operator<=>(const Action&) const = default;
};

inline bool action_valid(const Action& a, const GridState& grid, int k_max) {
  if (a.size() > k_max) return false;
  for (std::size_t i = 0; i < a.targets.size(); ++i) {
    if (!grid.in_range(a.targets[i])) return false;
    if (i > 0 && a.targets[i] <= a.targets[i - 1]) return false;
  }
  return true;
}

// 8-connected Moore neighborhood, clipped at the grid edges. Returned in
// ascending cell-index order; never contains the cell itself.
inline std::vector<int> neighbors(const GridState& s, int cell) {
  if (!s.in_range(cell)) throw std::out_of_range("cell index out of range");
  const int r = s.row_of(cell);
  const int c = s.col_of(cell);
  std::vector<int> out;
  out.reserve(8);
  for (int dr = -1; dr <= 1; ++dr) {
    const int nr = r + dr;
    if (nr < 0 || nr >= s.rows) continue;
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const int nc = c + dc;
      if (nc < 0 || nc >= s.cols) continue;
      out.push_back(s.at(nr, nc));
    }
  }
  return out;
}

// Step reward: sum of class utilities over burning cells. Always <= 0,
// and 0 exactly when nothing burns.
inline double reward(const GridState& s, const UtilityMap& util) {
  double total = 0.0;
  const std::size_t n = s.fire.size();
  for (std::size_t i = 0; i < n; ++i)
    if (s.fire[i]) total += util.of(s.classes[i]);
  return total;
}

}  // namespace wildfire
