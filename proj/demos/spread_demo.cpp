// Renders a few steps of fire spread on a small grid to the terminal:
// '#' burning, '.' fuel left, ' ' burnt out.
#include <iostream>

#include "wildfire/dynamics.hpp"
#include "wildfire/grid.hpp"
#include "wildfire/rng.hpp"

using namespace wildfire;

static void draw(const GridState& s) {
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const int i = s.at(r, c);
      std::cout << (s.burning(i) ? '#' : (s.fuel[static_cast<std::size_t>(i)] ? '.' : ' '));
    }
    std::cout << "\n";
  }
  std::cout << "\n";
}

int main() {
  GridState state = GridState::filled(12, 12, 5);
  state.ignite(state.at(6, 6));

  DynamicsParams dyn;
  dyn.q = 1.0;
  dyn.spread = SpreadParams{90.0, 0.8, 0.3};  // wind blowing east

  Rng rng(7);
  for (int t = 0; t < 10 && state.any_fire(); ++t) {
    std::cout << "t = " << t << "\n";
    draw(state);
    state = step(state, Action::noop(), dyn, rng);
  }
  return 0;
}
