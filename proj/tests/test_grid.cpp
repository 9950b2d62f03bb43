#include <catch2/catch.hpp>

#include "wildfire/grid.hpp"
#include "wildfire/rng.hpp"

using namespace wildfire;

namespace {

GridState random_state(Rng& rng, int rows, int cols, int max_fuel) {
  GridState s = GridState::filled(rows, cols, 0);
  for (int i = 0; i < s.cell_count(); ++i) {
    s.fuel[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.index(max_fuel + 1));
    s.classes[static_cast<std::size_t>(i)] = static_cast<CellClass>(rng.index(3));
    if (s.fuel[static_cast<std::size_t>(i)] >= 1 && rng.bernoulli(0.3))
      s.fire[static_cast<std::size_t>(i)] = 1;
  }
  return s;
}

// direct summation over every cell, independent of reward()
double reward_oracle(const GridState& s, const UtilityMap& u) {
  double total = 0;
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c)
      if (s.fire[static_cast<std::size_t>(s.at(r, c))])
        total += u.of(s.classes[static_cast<std::size_t>(s.at(r, c))]);
  return total;
}

}  // namespace

TEST_CASE("neighbors clips at grid edges") {
  const GridState g = GridState::filled(4, 4, 5);
  CHECK(neighbors(g, g.at(0, 0)).size() == 3);
  CHECK(neighbors(g, g.at(1, 1)).size() == 8);
  CHECK(neighbors(g, g.at(0, 1)).size() == 5);
  CHECK_THROWS_AS(neighbors(g, 16), std::out_of_range);
  CHECK_THROWS_AS(neighbors(g, -1), std::out_of_range);
}

TEST_CASE("neighbors never contains the cell itself") {
  const GridState g = GridState::filled(5, 3, 1);
  for (int i = 0; i < g.cell_count(); ++i) {
    for (int nb : neighbors(g, i)) CHECK(nb != i);
  }
}

TEST_CASE("neighbors is symmetric") {
  const GridState g = GridState::filled(6, 7, 1);
  for (int i = 0; i < g.cell_count(); ++i) {
    for (int nb : neighbors(g, i)) {
      const auto back = neighbors(g, nb);
      CHECK(std::find(back.begin(), back.end(), i) != back.end());
    }
  }
}

TEST_CASE("reward of a fire-free grid is zero") {
  const GridState g = GridState::filled(4, 4, 5);
  CHECK(reward(g, UtilityMap{}) == 0.0);
}

TEST_CASE("reward sums class utilities over burning cells") {
  GridState g = GridState::filled(4, 4, 5);
  g.classes[0] = CellClass::Red;
  g.classes[5] = CellClass::Green;
  g.classes[6] = CellClass::Green;
  g.ignite(0);
  g.ignite(5);
  g.ignite(6);
  const UtilityMap u;
  CHECK(reward(g, u) == Approx(-12.0));
  CHECK(reward(g, u) == Approx(reward_oracle(g, u)));
}

TEST_CASE("reward of a fully burning all-green 4x4 grid") {
  GridState g = GridState::filled(4, 4, 5);
  for (int i = 0; i < 16; ++i) g.ignite(i);
  CHECK(reward(g, UtilityMap{}) == Approx(-16.0));
}

TEST_CASE("reward matches the summation oracle on random states") {
  Rng rng(7);
  const UtilityMap u;
  for (int trial = 0; trial < 50; ++trial) {
    const GridState s = random_state(rng, 5, 5, 4);
    CHECK(reward(s, u) == Approx(reward_oracle(s, u)));
  }
}

TEST_CASE("reward is monotone and additive in burning cells") {
  Rng rng(9);
  const UtilityMap u;
  for (int trial = 0; trial < 30; ++trial) {
    GridState s = random_state(rng, 4, 4, 4);
    const double base = reward(s, u);

    // adding one more burning cell never increases the reward
    std::vector<int> unburnt;
    for (int i = 0; i < s.cell_count(); ++i)
      if (!s.burning(i) && s.fuel[static_cast<std::size_t>(i)] >= 1) unburnt.push_back(i);
    if (!unburnt.empty()) {
      GridState more = s;
      more.ignite(unburnt[static_cast<std::size_t>(rng.index(static_cast<int>(unburnt.size())))]);
      CHECK(reward(more, u) < base);
    }

    // additivity: total equals the sum over single-cell fires
    double single_sum = 0;
    for (int i = 0; i < s.cell_count(); ++i) {
      if (!s.burning(i)) continue;
      GridState solo = s;
      std::fill(solo.fire.begin(), solo.fire.end(), 0);
      solo.fire[static_cast<std::size_t>(i)] = 1;
      single_sum += reward(solo, u);
    }
    CHECK(reward(s, u) == Approx(single_sum));
  }
}

TEST_CASE("utility map ordering is validated") {
  CHECK(UtilityMap{}.valid());
  CHECK_FALSE(UtilityMap{-1, -5, -10}.valid());
  CHECK_FALSE(UtilityMap{-10, -5, 1}.valid());
}

TEST_CASE("grid state invariant rejects burning cells without fuel") {
  GridState g = GridState::filled(2, 2, 0);
  CHECK_THROWS_AS(g.ignite(0), std::logic_error);
  g.fire[0] = 1;  // force the broken state
  CHECK_FALSE(g.valid());
}

TEST_CASE("actions canonicalize and validate") {
  const GridState g = GridState::filled(3, 3, 1);
  const Action a = Action::of({5, 2}, g);
  CHECK(a.targets == std::vector<int>{2, 5});
  CHECK_THROWS_AS(Action::of({1, 1}, g), std::invalid_argument);
  CHECK_THROWS_AS(Action::of({9}, g), std::out_of_range);
  CHECK(action_valid(Action::noop(), g, 0));
  CHECK_FALSE(action_valid(Action::of({1, 2}, g), g, 1));

  // no-op sorts before every other action
  CHECK(Action::noop() < Action::single(0));
  CHECK(Action::single(0) < Action::single(1));
}
