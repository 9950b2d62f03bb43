#include <catch2/catch.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "wildfire/config.hpp"
#include "wildfire/harness.hpp"

using namespace wildfire;

namespace {

PlannerConfig tiny_planner() {
  PlannerConfig p;
  p.n_simulations = 48;
  p.max_depth = 6;
  p.n_particles = 24;
  return p;
}

int count_class(const GridState& s, CellClass c) {
  int n = 0;
  for (CellClass x : s.classes)
    if (x == c) ++n;
  return n;
}

int count_fire(const GridState& s) {
  int n = 0;
  for (auto f : s.fire) n += f;
  return n;
}

}  // namespace

TEST_CASE("scenario generation honors the fire fraction floor") {
  ScenarioConfig cfg;
  cfg.grid_size = 4;
  cfg.seed = 5;
  const Scenario sc = generate_scenario(cfg, 0);
  CHECK(count_fire(sc.initial) == 1);  // floor(0.10 * 16)
  CHECK(sc.initial.valid());
}

TEST_CASE("scenario generation hits the class mix exactly on 10x10") {
  ScenarioConfig cfg;
  cfg.grid_size = 10;
  cfg.seed = 17;
  const Scenario sc = generate_scenario(cfg, 100);
  CHECK(count_class(sc.initial, CellClass::Red) == 20);
  CHECK(count_class(sc.initial, CellClass::Yellow) == 30);
  CHECK(count_class(sc.initial, CellClass::Green) == 50);
}

TEST_CASE("class mix rounding uses the largest remainders") {
  ScenarioConfig cfg;
  cfg.grid_size = 4;  // 16 cells: 3.2 red, 4.8 yellow, 8 green
  cfg.seed = 3;
  const Scenario sc = generate_scenario(cfg, 0);
  CHECK(count_class(sc.initial, CellClass::Red) == 3);
  CHECK(count_class(sc.initial, CellClass::Yellow) == 5);
  CHECK(count_class(sc.initial, CellClass::Green) == 8);
}

TEST_CASE("scenarios are a deterministic function of seed and index") {
  ScenarioConfig cfg;
  cfg.grid_size = 8;
  cfg.seed = 99;
  const Scenario a = generate_scenario(cfg, 321);
  const Scenario b = generate_scenario(cfg, 321);
  CHECK(a.initial == b.initial);
  CHECK(a.spread.wind_direction_deg == b.spread.wind_direction_deg);
  CHECK(a.spread.base_rate == b.spread.base_rate);

  const Scenario c = generate_scenario(cfg, 322);
  CHECK((a.spread.wind_direction_deg != c.spread.wind_direction_deg ||
         a.spread.base_rate != c.spread.base_rate));
}

TEST_CASE("the scenario index decodes into wind and spread-rate grids") {
  ScenarioConfig cfg;
  cfg.grid_size = 4;
  cfg.n_spread_scenarios = 256;  // 16 wind directions x 16 spread rates
  const Scenario first = generate_scenario(cfg, 0);
  CHECK(first.init_state == 0);
  CHECK(first.spread.wind_direction_deg == Approx(0.0));
  CHECK(first.spread.base_rate == Approx(0.05));

  const Scenario second = generate_scenario(cfg, 1);
  CHECK(second.spread.base_rate == Approx(0.05 + 0.75 / 15));

  const Scenario next_wind = generate_scenario(cfg, 16);
  CHECK(next_wind.spread.wind_direction_deg == Approx(22.5));

  const Scenario last = generate_scenario(cfg, 255);
  CHECK(last.spread.wind_direction_deg == Approx(337.5));
  CHECK(last.spread.base_rate == Approx(0.8));

  const Scenario second_init = generate_scenario(cfg, 256);
  CHECK(second_init.init_state == 1);
  CHECK(second_init.spread.wind_direction_deg == Approx(0.0));

  CHECK_THROWS_AS(generate_scenario(cfg, 6 * 256), std::out_of_range);
  CHECK_THROWS_AS(generate_scenario(cfg, -1), std::out_of_range);
}

TEST_CASE("initial states differ across init indices but not spread indices") {
  ScenarioConfig cfg;
  cfg.grid_size = 6;
  cfg.seed = 4;
  const Scenario a = generate_scenario(cfg, 0);
  const Scenario b = generate_scenario(cfg, 10);   // same init, different spread
  const Scenario c = generate_scenario(cfg, 256);  // next init
  CHECK(a.initial == b.initial);
  CHECK_FALSE(a.initial == c.initial);
}

TEST_CASE("invalid scenario configs are rejected") {
  ScenarioConfig cfg;
  cfg.n_spread_scenarios = 60;  // not a perfect square
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.class_mix = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.grid_size = 1;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("an episode with no initial fire ends immediately") {
  ScenarioConfig cfg;
  cfg.grid_size = 4;
  cfg.fire_fraction = 0.0;
  const Scenario sc = generate_scenario(cfg, 0);
  const EpisodeResult r = run_episode(sc, PolicyKind::Baseline, 1.0, cfg, tiny_planner(),
                                      SensingParams{}, UtilityMap{}, 1, 2);
  CHECK(r.neg_utility == 0.0);
  CHECK(r.steps == 0);
}

TEST_CASE("one green fire with certain suppression costs exactly one step") {
  ScenarioConfig cfg;
  cfg.grid_size = 3;
  Scenario sc;
  sc.initial = GridState::filled(3, 3, 5);
  sc.initial.ignite(4);
  sc.spread = SpreadParams{0.0, 0.0, 0.0};  // no spread
  const EpisodeResult r = run_episode(sc, PolicyKind::Baseline, 1.0, cfg, tiny_planner(),
                                      SensingParams{}, UtilityMap{}, 11, 12);
  CHECK(r.neg_utility == Approx(1.0));
  CHECK(r.steps == 1);
}

TEST_CASE("episodes replay identically from the same seeds") {
  ScenarioConfig cfg;
  cfg.grid_size = 5;
  cfg.seed = 8;
  const Scenario sc = generate_scenario(cfg, 3);
  for (PolicyKind policy : {PolicyKind::Baseline, PolicyKind::Uafr}) {
    const EpisodeResult a = run_episode(sc, policy, 0.9, cfg, tiny_planner(), SensingParams{},
                                        UtilityMap{}, 21, 22);
    const EpisodeResult b = run_episode(sc, policy, 0.9, cfg, tiny_planner(), SensingParams{},
                                        UtilityMap{}, 21, 22);
    CHECK(a.neg_utility == b.neg_utility);
    CHECK(a.steps == b.steps);
  }
}

TEST_CASE("every action an episode logs respects the budget") {
  ScenarioConfig cfg;
  cfg.grid_size = 5;
  cfg.seed = 9;
  const Scenario sc = generate_scenario(cfg, 7);
  PlannerConfig pcfg = tiny_planner();
  pcfg.k_max = 2;
  int steps_seen = 0;
  const StepHook hook = [&](const StepRecord& rec) {
    CHECK(rec.action->size() <= 2);
    CHECK(rec.t == steps_seen + 1);
    ++steps_seen;
  };
  const EpisodeResult r = run_episode(sc, PolicyKind::Uafr, 0.8, cfg, pcfg, SensingParams{},
                                      UtilityMap{}, 31, 32, hook);
  CHECK(steps_seen == r.steps);
}

TEST_CASE("the experiment grid enumerates every cell and aggregates exactly") {
  ExperimentConfig cfg;
  cfg.grid_sizes = {4};
  cfg.base.grid_size = 4;
  cfg.base.q_values = {1.0};
  cfg.base.n_initial_states = 6;
  cfg.base.n_spread_scenarios = 4;
  cfg.base.seed = 12;
  cfg.planner = tiny_planner();

  const ExperimentResults results = run_experiment(cfg, 1);
  CHECK(results.episodes.size() == 48);  // 1 grid x 1 q x 2 policies x 24 scenarios
  REQUIRE(results.aggregates.size() == 2);

  for (const AggregateRow& agg : results.aggregates) {
    double sum = 0;
    int n = 0;
    for (const ExperimentRow& row : results.episodes) {
      if (row.grid_size == agg.grid_size && row.q == agg.q && row.policy == agg.policy) {
        sum += row.episode.neg_utility;
        ++n;
      }
    }
    CHECK(n == agg.episodes);
    CHECK(agg.mean_neg_utility == sum / n);  // exact, not approximate
  }
}

TEST_CASE("experiment episode rows are byte-stable apart from wall time") {
  ExperimentConfig cfg;
  cfg.grid_sizes = {4};
  cfg.base.q_values = {0.9};
  cfg.base.n_initial_states = 2;
  cfg.base.n_spread_scenarios = 4;
  cfg.base.seed = 13;
  cfg.planner = tiny_planner();

  auto render = [](const ExperimentResults& r) {
    std::ostringstream out;
    ExperimentResults scrubbed = r;
    for (ExperimentRow& row : scrubbed.episodes) row.episode.wall_ms = 0;
    write_episode_csv(scrubbed, out);
    return out.str();
  };
  const std::string a = render(run_experiment(cfg, 1));
  const std::string b = render(run_experiment(cfg, 1));
  CHECK(a == b);
}

TEST_CASE("worker count does not change experiment results") {
  ExperimentConfig cfg;
  cfg.grid_sizes = {4};
  cfg.base.q_values = {0.8};
  cfg.base.n_initial_states = 2;
  cfg.base.n_spread_scenarios = 4;
  cfg.base.seed = 14;
  cfg.planner = tiny_planner();

  const ExperimentResults one = run_experiment(cfg, 1);
  const ExperimentResults three = run_experiment(cfg, 3);
  REQUIRE(one.episodes.size() == three.episodes.size());
  for (std::size_t i = 0; i < one.episodes.size(); ++i) {
    CHECK(one.episodes[i].episode.neg_utility == three.episodes[i].episode.neg_utility);
    CHECK(one.episodes[i].episode.steps == three.episodes[i].episode.steps);
  }
}

TEST_CASE("an empty grid-size list is rejected before any episode runs") {
  ExperimentConfig cfg;
  cfg.grid_sizes = {};
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("an unwritable output directory fails before any episode runs") {
  ExperimentConfig cfg;
  cfg.grid_sizes = {4};
  cfg.base.q_values = {1.0};
  CHECK_THROWS_AS(run_experiment_to_dir(cfg, "/proc/definitely/not/writable"),
                  std::runtime_error);
}

TEST_CASE("common random numbers give both policies the same environment seed") {
  ExperimentConfig cfg;
  cfg.grid_sizes = {4};
  cfg.base.q_values = {1.0};
  cfg.base.n_initial_states = 1;
  cfg.base.n_spread_scenarios = 4;
  cfg.base.seed = 15;
  cfg.planner = tiny_planner();
  const ExperimentResults crn = run_experiment(cfg, 1);
  std::set<std::uint64_t> baseline_seeds, uafr_seeds;
  for (const ExperimentRow& row : crn.episodes)
    (row.policy == "baseline" ? baseline_seeds : uafr_seeds).insert(row.episode.seed);
  CHECK(baseline_seeds == uafr_seeds);

  cfg.base.common_random_numbers = false;
  const ExperimentResults split = run_experiment(cfg, 1);
  baseline_seeds.clear();
  uafr_seeds.clear();
  for (const ExperimentRow& row : split.episodes)
    (row.policy == "baseline" ? baseline_seeds : uafr_seeds).insert(row.episode.seed);
  for (std::uint64_t s : baseline_seeds) CHECK_FALSE(uafr_seeds.count(s));
}

TEST_CASE("experiment config json parses scenario and planner keys") {
  const auto j = nlohmann::json::parse(R"({
    "grid_size": [4, 8],
    "fire_fraction": 0.1,
    "class_mix": [0.2, 0.3, 0.5],
    "fuel_init": 5,
    "q_values": [1.0, 0.8],
    "n_initial_states": 6,
    "n_spread_scenarios": 64,
    "horizon": 100,
    "frp_threshold": 1.0,
    "seed": 42,
    "common_random_numbers": true,
    "planner": {
      "n_simulations": 256,
      "max_depth": 8,
      "ucb_c": 10.0,
      "gamma_discount": 0.95,
      "k_obs": 4.0,
      "alpha_obs": 0.1,
      "k_act": 8.0,
      "alpha_act": 0.5,
      "k_max": 1,
      "n_particles": 100
    }
  })");
  const ExperimentConfig cfg = parse_experiment_config(j);
  CHECK(cfg.grid_sizes == std::vector<int>{4, 8});
  CHECK(cfg.base.q_values == std::vector<double>{1.0, 0.8});
  CHECK(cfg.base.n_spread_scenarios == 64);
  CHECK(cfg.base.seed == 42);
  CHECK(cfg.planner.n_simulations == 256);
  CHECK(cfg.planner.max_depth == 8);
}

TEST_CASE("experiment config accepts a single grid size") {
  const auto j = nlohmann::json::parse(R"({"grid_size": 6, "q_values": [1.0]})");
  CHECK(parse_experiment_config(j).grid_sizes == std::vector<int>{6});
}

TEST_CASE("experiment config toggles the deterministic spread rule") {
  const auto j = nlohmann::json::parse(R"({"grid_size": 4, "deterministic_spread": true})");
  const ExperimentConfig cfg = parse_experiment_config(j);
  CHECK(cfg.base.deterministic_spread);
  CHECK_FALSE(ExperimentConfig{}.base.deterministic_spread);

  // with q = 1 the whole episode is deterministic: two different agent
  // streams cannot change the baseline trajectory
  ScenarioConfig scfg;
  scfg.grid_size = 4;
  scfg.seed = 3;
  scfg.deterministic_spread = true;
  const Scenario sc = generate_scenario(scfg, 12);
  const EpisodeResult a = run_episode(sc, PolicyKind::Baseline, 1.0, scfg, tiny_planner(),
                                      SensingParams{}, UtilityMap{}, 5, 6);
  const EpisodeResult b = run_episode(sc, PolicyKind::Baseline, 1.0, scfg, tiny_planner(),
                                      SensingParams{}, UtilityMap{}, 99, 100);
  CHECK(a.neg_utility == b.neg_utility);
  CHECK(a.steps == b.steps);
}

TEST_CASE("experiment config rejects unknown keys") {
  CHECK_THROWS_WITH(parse_experiment_config(nlohmann::json::parse(R"({"grid_sizes": [4]})")),
                    Catch::Contains("grid_sizes"));
  CHECK_THROWS_WITH(
      parse_experiment_config(nlohmann::json::parse(R"({"planner": {"sims": 10}})")),
      Catch::Contains("sims"));
}
