#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wildfire/dynamics.hpp"
#include "wildfire/grid.hpp"

namespace wildfire {

// Per-cell binary "seen burning" map, same dimensions as the grid.
struct Observation {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> seen;

  static Observation blank(int rows, int cols) {
    Observation o;
    o.rows = rows;
    o.cols = cols;
    o.seen.assign(static_cast<std::size_t>(rows) * cols, 0);
    return o;
  }

  // The exact fire map of a state, as an observation. Used for fully
  // observed rollouts and for the initial sighting of a known fire.
  static Observation exact(const GridState& s) {
    Observation o;
    o.rows = s.rows;
    o.cols = s.cols;
    o.seen = s.fire;
    return o;
  }

  bool operator==(const Observation&) const = default;
};

struct SensingParams {
  double gamma_obs = 0.5;  // threshold on the one-step burn marginal
  double eta = 0.0;        // per-cell likelihood smoothing; 0 = exact indicator
};

// One-step marginal probability that a non-acted cell burns after a
// transition out of `prev`: certain for a cell that keeps burning, zero for
// one that burns out, and the ignition probability for an unburnt cell.
inline double burn_marginal(const GridState& prev, int cell, const DynamicsParams& dyn) {
  if (prev.burning(cell)) return prev.fuel[static_cast<std::size_t>(cell)] >= 2 ? 1.0 : 0.0;
  if (prev.fuel[static_cast<std::size_t>(cell)] == 0) return 0.0;
  return ignition_probability(prev, cell, dyn);
}

// Observation model. Acted cells are read exactly from the new state
// ("eyes on location"); every other cell reports 1 iff its one-step burn
// marginal under the dynamics strictly exceeds gamma_obs.
inline Observation observe(const GridState& prev, const GridState& state, const Action& action,
                           const DynamicsParams& dyn, const SensingParams& sp) {
  if (prev.rows != state.rows || prev.cols != state.cols)
    throw std::invalid_argument("observe: state dimension mismatch");
  Observation o = Observation::blank(state.rows, state.cols);
  const int n = state.cell_count();
  for (int i = 0; i < n; ++i) {
    if (action.contains(i)) {
      o.seen[static_cast<std::size_t>(i)] = state.fire[static_cast<std::size_t>(i)];
    } else {
      o.seen[static_cast<std::size_t>(i)] =
          burn_marginal(prev, i, dyn) > sp.gamma_obs ? 1 : 0;
    }
  }
  return o;
}

// Likelihood O(o | s', a) of an observation given the transition that a
// particle recorded. With eta = 0 this is the exact-match indicator; with
// eta > 0, a product of (1-eta) per agreeing cell and eta per disagreement.
inline double observation_likelihood(const Observation& o, const GridState& prev,
                                     const GridState& state, const Action& action,
                                     const DynamicsParams& dyn, const SensingParams& sp) {
  if (o.rows != state.rows || o.cols != state.cols)
    throw std::invalid_argument("observation dimension mismatch");
  const Observation emitted = observe(prev, state, action, dyn, sp);
  if (sp.eta == 0.0) return emitted.seen == o.seen ? 1.0 : 0.0;
  double w = 1.0;
  for (std::size_t i = 0; i < o.seen.size(); ++i)
    w *= (emitted.seen[i] == o.seen[i]) ? (1.0 - sp.eta) : sp.eta;
  return w;
}

}  // namespace wildfire
