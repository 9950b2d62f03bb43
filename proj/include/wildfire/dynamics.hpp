#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wildfire/grid.hpp"
#include "wildfire/rng.hpp"

namespace wildfire {

// Parametric spread kernel. wind_direction is the compass bearing the wind
// blows TOWARD, in degrees [0, 360): 0 = north (row decreasing), 90 = east
// (column increasing). A cell directly downwind of a burning neighbor gets
// the full wind boost.
struct SpreadParams {
  double wind_direction_deg = 0.0;
  double wind_strength = 0.0;  // kappa in [0, 1]
  double base_rate = 0.0;      // rho in [0, 1]

  bool valid() const {
    return wind_direction_deg >= 0.0 && wind_direction_deg < 360.0 &&
           wind_strength >= 0.0 && wind_strength <= 1.0 &&
           base_rate >= 0.0 && base_rate <= 1.0;
  }
};

// File-loaded stand-in for an externally trained spread model: one ignition
// contribution per cell, combined across burning neighbors exactly like the
// parametric kernel. Covers every cell of the configured grid.
struct TableSpread {
  int rows = 0;
  int cols = 0;
  std::vector<double> prob;  // per-cell contribution of one burning neighbor

  bool valid() const {
    if (rows < 1 || cols < 1) return false;
    if (prob.size() != static_cast<std::size_t>(rows) * cols) return false;
    for (double p : prob)
      if (!(p >= 0.0 && p <= 1.0)) return false;
    return true;
  }
};

using SpreadModel = std::variant<SpreadParams, TableSpread>;

struct DynamicsParams {
  double q = 1.0;  // probability a suppression effort extinguishes its target
  SpreadModel spread = SpreadParams{};
  // When set, a cell ignites iff its ignition probability is >= 0.5 instead
  // of being sampled.
  bool deterministic_spread = false;
};

namespace detail {

// Compass bearing, in degrees, of the displacement from cell j to cell i.
inline double bearing_deg(const GridState& s, int from, int to) {
  const double dr = static_cast<double>(s.row_of(to) - s.row_of(from));
  const double dc = static_cast<double>(s.col_of(to) - s.col_of(from));
  double deg = std::atan2(dc, -dr) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  return deg;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Contribution of one burning neighbor toward igniting `cell`.
inline double neighbor_contribution(const GridState& s, int burning, int cell,
                                    const SpreadParams& p) {
  const double theta =
      (p.wind_direction_deg - bearing_deg(s, burning, cell)) * std::numbers::pi / 180.0;
  const double lambda = 1.0 + p.wind_strength * std::cos(theta);
  return clamp01(p.base_rate * lambda);
}

inline double neighbor_contribution(const GridState&, int, int cell, const TableSpread& t) {
  return t.prob[static_cast<std::size_t>(cell)];
}

}  // namespace detail

// Probability that `cell` ignites in the next step given the current fire
// map: independent contributions from burning neighbors combined by
// noisy-or. Zero when no neighbor burns. The cell itself must be unburnt
// with fuel left; querying a burning or fuel-exhausted cell is an error.
inline double ignition_probability(const GridState& s, int cell, const DynamicsParams& params) {
  if (!s.in_range(cell)) throw std::out_of_range("cell index out of range");
  if (s.burning(cell)) throw std::invalid_argument("ignition query on a burning cell");
  if (s.fuel[static_cast<std::size_t>(cell)] == 0)
    throw std::invalid_argument("ignition query on a fuel-exhausted cell");

  double p_none = 1.0;
  for (int nb : neighbors(s, cell)) {
    if (!s.burning(nb)) continue;
    const double c = std::visit(
        [&](const auto& model) { return detail::neighbor_contribution(s, nb, cell, model); },
        params.spread);
    p_none *= 1.0 - c;
  }
  return 1.0 - p_none;
}

inline double ignition_probability(const GridState& s, int cell, const SpreadParams& spread) {
  DynamicsParams params;
  params.spread = spread;
  return ignition_probability(s, cell, params);
}

// One transition of the environment. Order of effects:
//   1. each targeted burning cell is extinguished with probability q;
//   2. every still-burning cell loses one unit of fuel, and stops burning
//      at fuel 0;
//   3. every cell that was not burning before the step and still has fuel
//      ignites with ignition_probability evaluated on the pre-step fire map.
// A cell suppressed in (1) was burning pre-step, so it cannot re-ignite in
// the same tick; a newly ignited cell starts consuming fuel next step.
inline GridState step(const GridState& s, const Action& action, const DynamicsParams& params,
                      Rng& rng) {
  for (int t : action.targets)
    if (!s.in_range(t)) throw std::out_of_range("action target out of range");

  GridState next = s;

  for (int t : action.targets) {
    if (!s.burning(t)) continue;  // suppression on an unburnt cell is a no-op
    if (rng.bernoulli(params.q)) next.fire[static_cast<std::size_t>(t)] = 0;
  }

  const int n = s.cell_count();
  for (int i = 0; i < n; ++i) {
    if (!next.fire[static_cast<std::size_t>(i)]) continue;
    if (--next.fuel[static_cast<std::size_t>(i)] == 0)
      next.fire[static_cast<std::size_t>(i)] = 0;
  }

  for (int i = 0; i < n; ++i) {
    if (s.burning(i)) continue;
    if (next.fuel[static_cast<std::size_t>(i)] == 0) continue;
    const double p = ignition_probability(s, i, params);
    const bool ignites = params.deterministic_spread ? (p >= 0.5) : rng.bernoulli(p);
    if (ignites) next.fire[static_cast<std::size_t>(i)] = 1;
  }
  return next;
}

// TableSpread file format: CSV with header `row,col,prob`, one line per
// cell, UTF-8, LF line endings.
inline TableSpread load_table_spread(const std::string& path, int rows, int cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spread table: " + path);

  TableSpread table;
  table.rows = rows;
  table.cols = cols;
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  table.prob.assign(n, -1.0);

  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(in, line)) fail("missing header");
  ++line_no;
  if (line == "row,col,prob\r") line.pop_back();
  if (line != "row,col,prob") fail("expected header 'row,col,prob'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    long r = -1, c = -1;
    double p = -1.0;
    char comma1 = 0, comma2 = 0;
    if (!(ss >> r >> comma1 >> c >> comma2 >> p) || comma1 != ',' || comma2 != ',')
      fail("malformed line '" + line + "'");
    if (r < 0 || r >= rows || c < 0 || c >= cols) fail("cell out of range");
    if (!(p >= 0.0 && p <= 1.0)) fail("probability outside [0,1]");
    const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
    if (table.prob[idx] >= 0.0) fail("duplicate cell");
    table.prob[idx] = p;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (table.prob[i] < 0.0)
      throw std::runtime_error(path + ": missing cell (" + std::to_string(i / cols) + "," +
                               std::to_string(i % cols) + ")");
  }
  return table;
}

inline void save_table_spread(const TableSpread& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write spread table: " + path);
  out.precision(17);
  out << "row,col,prob\n";
  for (int r = 0; r < table.rows; ++r)
    for (int c = 0; c < table.cols; ++c)
      out << r << ',' << c << ',' << table.prob[static_cast<std::size_t>(r) * table.cols + c]
          << '\n';
}

}  // namespace wildfire
