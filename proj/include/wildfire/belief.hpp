#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "wildfire/dynamics.hpp"
#include "wildfire/grid.hpp"
#include "wildfire/rng.hpp"
#include "wildfire/sensing.hpp"

namespace wildfire {

// One belief particle. Besides the hypothesized current state it records
// the state it was advanced from, because the observation model thresholds
// a marginal computed from that previous state.
struct Particle {
  GridState prev;
  GridState cur;
};

// Fixed-size, equally weighted particle set approximating the belief.
struct Belief {
  std::vector<Particle> particles;

  int size() const { return static_cast<int>(particles.size()); }
  bool empty() const { return particles.empty(); }
};

inline Belief initial_belief(const GridState& known_state, int n_particles) {
  if (n_particles < 1) throw std::invalid_argument("belief needs at least one particle");
  Belief b;
  b.particles.assign(static_cast<std::size_t>(n_particles),
                     Particle{known_state, known_state});
  return b;
}

// Fraction of particles whose current state has the cell burning.
inline double belief_marginal(const Belief& b, int cell) {
  if (b.empty()) throw std::invalid_argument("empty belief");
  if (!b.particles.front().cur.in_range(cell)) throw std::out_of_range("cell index out of range");
  int burning = 0;
  for (const Particle& p : b.particles)
    if (p.cur.burning(cell)) ++burning;
  return static_cast<double>(burning) / static_cast<double>(b.size());
}

// Optional instrumentation for update_belief: which propagated particle
// each output slot was resampled from, and whether the uniform fallback
// fired. Lets tests check the resampling distribution directly.
struct UpdateTrace {
  std::vector<int> resample_indices;
  bool uniform_fallback = false;
};

// Particle filter without rejection. For each slot, draws a source particle
// uniformly with replacement, advances it through the transition model, and
// weights it by the observation likelihood. If every weight is zero the
// weights are reset to 1/|b|, so resampling is uniform over the propagated
// particles instead of discarding the step. Multinomial resampling returns
// an equally weighted set of the same size.
inline Belief update_belief(const Belief& b, const Action& action, const Observation& o,
                            const DynamicsParams& dyn, const SensingParams& sp, Rng& rng,
                            UpdateTrace* trace = nullptr) {
  if (b.empty()) throw std::invalid_argument("empty belief");
  const int n = b.size();

  std::vector<Particle> propagated;
  propagated.reserve(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(n), 0.0);

  for (int i = 0; i < n; ++i) {
    const Particle& src = b.particles[static_cast<std::size_t>(rng.index(n))];
    GridState next = step(src.cur, action, dyn, rng);
    weights[static_cast<std::size_t>(i)] =
        observation_likelihood(o, src.cur, next, action, dyn, sp);
    propagated.push_back(Particle{src.cur, std::move(next)});
  }

  double total = 0.0;
  for (double w : weights) total += w;
  const bool fallback = (total == 0.0);
  if (fallback) {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(n));
    total = 1.0;
  }

  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative[i] = acc;
  }

  Belief out;
  out.particles.reserve(static_cast<std::size_t>(n));
  if (trace) {
    trace->resample_indices.clear();
    trace->uniform_fallback = fallback;
  }
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), weights.size() - 1);
    out.particles.push_back(propagated[k]);
    if (trace) trace->resample_indices.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace wildfire
