#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wildfire/belief.hpp"
#include "wildfire/dynamics.hpp"
#include "wildfire/format.hpp"
#include "wildfire/grid.hpp"
#include "wildfire/planner.hpp"
#include "wildfire/rng.hpp"
#include "wildfire/sensing.hpp"

namespace wildfire {

enum class PolicyKind { Baseline, Uafr };

inline const char* to_string(PolicyKind p) {
  return p == PolicyKind::Baseline ? "baseline" : "uafr";
}

inline PolicyKind parse_policy(const std::string& s) {
  if (s == "baseline") return PolicyKind::Baseline;
  if (s == "uafr") return PolicyKind::Uafr;
  throw std::invalid_argument("unknown policy '" + s + "' (expected baseline or uafr)");
}

// Wind strength used by generated scenarios; the scenario grid varies wind
// direction and rate of spread.
inline constexpr double kScenarioWindStrength = 0.5;

struct ScenarioConfig {
  int grid_size = 8;
  double fire_fraction = 0.10;
  std::array<double, 3> class_mix{0.20, 0.30, 0.50};  // red, yellow, green
  int fuel_init = 5;
  std::vector<double> q_values{1.0, 0.9, 0.8};
  int n_initial_states = 6;
  // wind-direction x rate-of-spread grid; must be a perfect square
  int n_spread_scenarios = 256;
  int horizon = 100;
  // binarization threshold for measured fire intensity; recorded for runs
  // that import real intensity data, unused by the simulator itself
  double frp_threshold = 1.0;
  std::uint64_t seed = 0;
  // when set, both policies draw the same environment randomness per
  // (scenario, step), reducing comparison variance
  bool common_random_numbers = true;
  // run episodes under the deterministic spread rule (ignite iff the
  // ignition probability reaches 0.5) instead of sampling ignitions
  bool deterministic_spread = false;
};

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.grid_size < 2) throw std::invalid_argument("grid_size must be at least 2");
  if (cfg.fire_fraction < 0.0 || cfg.fire_fraction > 1.0)
    throw std::invalid_argument("fire_fraction must be in [0,1]");
  double mix_sum = 0.0;
  for (double m : cfg.class_mix) {
    if (m < 0.0 || m > 1.0) throw std::invalid_argument("class_mix entries must be in [0,1]");
    mix_sum += m;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9) throw std::invalid_argument("class_mix must sum to 1");
  if (cfg.fuel_init < 1 || cfg.fuel_init > 255)
    throw std::invalid_argument("fuel_init must be in [1,255]");
  if (cfg.q_values.empty()) throw std::invalid_argument("q_values must not be empty");
  for (double q : cfg.q_values)
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must be in [0,1]");
  if (cfg.n_initial_states < 1) throw std::invalid_argument("n_initial_states must be >= 1");
  const int w = static_cast<int>(std::lround(std::sqrt(cfg.n_spread_scenarios)));
  if (cfg.n_spread_scenarios < 1 || w * w != cfg.n_spread_scenarios)
    throw std::invalid_argument(
        "n_spread_scenarios must be a perfect square (wind x rate-of-spread grid)");
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

struct Scenario {
  GridState initial;
  SpreadParams spread;
  int index = 0;       // global scenario index
  int init_state = 0;  // index / n_spread_scenarios
  int wind_index = 0;
  int rho_index = 0;
};

inline int scenario_count(const ScenarioConfig& cfg) {
  return cfg.n_initial_states * cfg.n_spread_scenarios;
}

// Deterministic scenario factory. The global index decodes as
//   init_state   = index / n_spread_scenarios
//   spread index = index % n_spread_scenarios = wind_index * n_rho + rho_index
// with wind directions evenly spaced over [0, 360) and rates of spread
// evenly spaced over [0.05, 0.8]. The initial state depends only on
// (seed, init_state): classes matching class_mix exactly by largest
// remainder, floor(fire_fraction * cells) distinct burning cells, fuel
// uniform at fuel_init.
inline Scenario generate_scenario(const ScenarioConfig& cfg, int index) {
  validate(cfg);
  if (index < 0 || index >= scenario_count(cfg))
    throw std::out_of_range("scenario index out of range");

  Scenario sc;
  sc.index = index;
  sc.init_state = index / cfg.n_spread_scenarios;
  const int spread_index = index % cfg.n_spread_scenarios;
  const int n_wind = static_cast<int>(std::lround(std::sqrt(cfg.n_spread_scenarios)));
  const int n_rho = cfg.n_spread_scenarios / n_wind;
  sc.wind_index = spread_index / n_rho;
  sc.rho_index = spread_index % n_rho;

  sc.spread.wind_direction_deg = sc.wind_index * (360.0 / n_wind);
  sc.spread.wind_strength = kScenarioWindStrength;
  constexpr double rho_lo = 0.05, rho_hi = 0.8;
  sc.spread.base_rate =
      n_rho == 1 ? 0.5 * (rho_lo + rho_hi)
                 : rho_lo + sc.rho_index * (rho_hi - rho_lo) / (n_rho - 1);

  const int n = cfg.grid_size * cfg.grid_size;
  sc.initial = GridState::filled(cfg.grid_size, cfg.grid_size, cfg.fuel_init);

  // class counts by largest remainder, then a seeded shuffle
  std::array<int, 3> counts{};
  std::array<double, 3> remainder{};
  int assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = cfg.class_mix[static_cast<std::size_t>(k)] * n;
    counts[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(exact));
    remainder[static_cast<std::size_t>(k)] = exact - counts[static_cast<std::size_t>(k)];
    assigned += counts[static_cast<std::size_t>(k)];
  }
  while (assigned < n) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (remainder[static_cast<std::size_t>(k)] > remainder[static_cast<std::size_t>(best)])
        best = k;
    counts[static_cast<std::size_t>(best)]++;
    remainder[static_cast<std::size_t>(best)] = -1.0;
    ++assigned;
  }

  Rng rng(derive_seed(cfg.seed, {0x5CE11A0ULL, static_cast<std::uint64_t>(sc.init_state)}));
  std::vector<CellClass> classes;
  classes.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < 3; ++k)
    classes.insert(classes.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]),
                   static_cast<CellClass>(k));
  for (int i = n - 1; i > 0; --i)
    std::swap(classes[static_cast<std::size_t>(i)],
              classes[static_cast<std::size_t>(rng.index(i + 1))]);
  sc.initial.classes = std::move(classes);

  const int n_burning = static_cast<int>(std::floor(cfg.fire_fraction * n));
  std::vector<int> cells(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cells[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n_burning; ++i) {
    const int j = i + rng.index(n - i);
    std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
    sc.initial.ignite(cells[static_cast<std::size_t>(i)]);
  }
  return sc;
}

struct EpisodeResult {
  std::string policy;
  std::uint64_t seed = 0;  // environment stream seed
  int scenario_id = 0;
  int init_state = 0;
  int spread_scenario = 0;
  double neg_utility = 0.0;  // cumulative cost, reported positive
  int steps = 0;
  double wall_ms = 0.0;
};

struct StepRecord {
  int t = 0;
  const GridState* state = nullptr;  // state the action was taken in
  const Action* action = nullptr;
  double step_cost = 0.0;
  const GridState* next = nullptr;
  const Observation* obs = nullptr;
};

using StepHook = std::function<void(const StepRecord&)>;

// Plays one episode to termination (no burning cell) or the horizon.
// Each step accrues the cost of the current state, applies the policy's
// action, advances the environment, and emits an observation; the planner
// policy additionally maintains its particle belief. Environment
// randomness is re-derived per step from env_seed so that runs sharing
// env_seed face identical spread draws step by step.
inline EpisodeResult run_episode(const Scenario& scenario, PolicyKind policy, double q,
                                 const ScenarioConfig& cfg, const PlannerConfig& pcfg,
                                 const SensingParams& sp, const UtilityMap& util,
                                 std::uint64_t env_seed, std::uint64_t agent_seed,
                                 const StepHook& hook = {}) {
  const auto start = std::chrono::steady_clock::now();

  DynamicsParams dyn;
  dyn.q = q;
  dyn.spread = scenario.spread;
  dyn.deterministic_spread = cfg.deterministic_spread;

  GridState state = scenario.initial;
  Observation obs = Observation::exact(state);  // the initial fire map is known
  Belief belief;
  if (policy == PolicyKind::Uafr) belief = initial_belief(state, pcfg.n_particles);

  EpisodeResult result;
  result.policy = to_string(policy);
  result.seed = env_seed;
  result.scenario_id = scenario.index;
  result.init_state = scenario.init_state;
  result.spread_scenario = scenario.index % cfg.n_spread_scenarios;

  for (int t = 1; t <= cfg.horizon && state.any_fire(); ++t) {
    Action action;
    if (policy == PolicyKind::Baseline) {
      action = baseline_policy(obs, state.classes, util, pcfg.k_max);
    } else {
      Rng plan_rng(derive_seed(agent_seed, {static_cast<std::uint64_t>(t), 1}));
      action = plan(belief, pcfg, dyn, sp, util, plan_rng);
    }
    if (!action_valid(action, state, pcfg.k_max))
      throw std::logic_error("policy produced an invalid action");

    const double cost = -reward(state, util);
    result.neg_utility += cost;

    Rng env(derive_seed(env_seed, {static_cast<std::uint64_t>(t)}));
    GridState next = step(state, action, dyn, env);
    Observation next_obs = observe(state, next, action, dyn, sp);

    if (policy == PolicyKind::Uafr) {
      Rng belief_rng(derive_seed(agent_seed, {static_cast<std::uint64_t>(t), 2}));
      belief = update_belief(belief, action, next_obs, dyn, sp, belief_rng);
    }

    if (hook) {
      StepRecord rec;
      rec.t = t;
      rec.state = &state;
      rec.action = &action;
      rec.step_cost = cost;
      rec.next = &next;
      rec.obs = &next_obs;
      hook(rec);
    }

    state = std::move(next);
    obs = std::move(next_obs);
    ++result.steps;
  }

  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

struct ExperimentConfig {
  std::vector<int> grid_sizes;
  ScenarioConfig base;
  PlannerConfig planner;
  SensingParams sensing;
  UtilityMap utilities;
};

struct ExperimentRow {
  int grid_size = 0;
  double q = 0.0;
  std::string policy;
  EpisodeResult episode;
};

struct AggregateRow {
  int grid_size = 0;
  double q = 0.0;
  std::string policy;
  double mean_neg_utility = 0.0;
  int episodes = 0;
};

struct ExperimentResults {
  std::vector<ExperimentRow> episodes;
  std::vector<AggregateRow> aggregates;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.grid_sizes.empty()) throw std::invalid_argument("grid_sizes must not be empty");
  for (int g : cfg.grid_sizes)
    if (g < 2) throw std::invalid_argument("grid sizes must be at least 2");
  validate(cfg.base);
  if (!cfg.planner.valid()) throw std::invalid_argument("invalid planner configuration");
  if (!cfg.utilities.valid()) throw std::invalid_argument("invalid utility map");
}

// Runs every (grid_size, q, policy, initial state, spread scenario) cell.
// Episodes are independent: each derives its own random streams from the
// master seed, so results do not depend on the worker count or schedule,
// and rows come back in enumeration order.
inline ExperimentResults run_experiment(const ExperimentConfig& cfg, int n_workers = 1,
                                        std::ostream* progress = nullptr) {
  validate(cfg);
  if (n_workers < 1) n_workers = 1;

  struct Job {
    int grid_size;
    int q_index;
    double q;
    PolicyKind policy;
    int scenario;
  };
  std::vector<Job> jobs;
  for (int g : cfg.grid_sizes) {
    ScenarioConfig scfg = cfg.base;
    scfg.grid_size = g;
    const int n_scen = scenario_count(scfg);
    for (std::size_t qi = 0; qi < cfg.base.q_values.size(); ++qi)
      for (PolicyKind policy : {PolicyKind::Baseline, PolicyKind::Uafr})
        for (int s = 0; s < n_scen; ++s)
          jobs.push_back({g, static_cast<int>(qi), cfg.base.q_values[qi], policy, s});
  }

  std::vector<ExperimentRow> rows(jobs.size());
  std::atomic<std::size_t> next_job{0};
  std::atomic<std::size_t> done{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t j = next_job.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job& job = jobs[j];
      ScenarioConfig scfg = cfg.base;
      scfg.grid_size = job.grid_size;
      const Scenario scenario = generate_scenario(scfg, job.scenario);

      const std::uint64_t policy_tag =
          cfg.base.common_random_numbers ? 0ULL
                                         : static_cast<std::uint64_t>(job.policy) + 1;
      const std::uint64_t env_seed =
          derive_seed(cfg.base.seed, {1, static_cast<std::uint64_t>(job.grid_size),
                                      static_cast<std::uint64_t>(job.q_index),
                                      static_cast<std::uint64_t>(job.scenario), policy_tag});
      const std::uint64_t agent_seed =
          derive_seed(cfg.base.seed, {2, static_cast<std::uint64_t>(job.grid_size),
                                      static_cast<std::uint64_t>(job.q_index),
                                      static_cast<std::uint64_t>(job.scenario),
                                      static_cast<std::uint64_t>(job.policy) + 1});

      ExperimentRow& row = rows[j];
      row.grid_size = job.grid_size;
      row.q = job.q;
      row.policy = to_string(job.policy);
      row.episode = run_episode(scenario, job.policy, job.q, scfg, cfg.planner, cfg.sensing,
                                cfg.utilities, env_seed, agent_seed);
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress && (d % 64 == 0 || d == jobs.size()))
        (*progress) << "\r" << d << "/" << jobs.size() << " episodes" << std::flush;
    }
  };

  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (progress) (*progress) << "\n";

  ExperimentResults results;
  results.episodes = std::move(rows);

  // aggregate means in enumeration order
  for (std::size_t i = 0; i < results.episodes.size();) {
    const ExperimentRow& head = results.episodes[i];
    AggregateRow agg;
    agg.grid_size = head.grid_size;
    agg.q = head.q;
    agg.policy = head.policy;
    double sum = 0.0;
    std::size_t j = i;
    for (; j < results.episodes.size(); ++j) {
      const ExperimentRow& r = results.episodes[j];
      if (r.grid_size != agg.grid_size || r.q != agg.q || r.policy != agg.policy) break;
      sum += r.episode.neg_utility;
      ++agg.episodes;
    }
    agg.mean_neg_utility = sum / agg.episodes;
    results.aggregates.push_back(agg);
    i = j;
  }
  return results;
}

inline void write_episode_csv(const ExperimentResults& results, std::ostream& out) {
  out << "grid_size,q,policy,init_state,scenario,seed,neg_utility,steps,wall_ms\n";
  for (const ExperimentRow& r : results.episodes) {
    out << r.grid_size << ',' << format_double(r.q) << ',' << r.policy << ','
        << r.episode.init_state << ',' << r.episode.spread_scenario << ',' << r.episode.seed
        << ',' << format_double(r.episode.neg_utility) << ',' << r.episode.steps << ','
        << format_double(r.episode.wall_ms) << '\n';
  }
}

inline void write_aggregate_csv(const ExperimentResults& results, std::ostream& out) {
  out << "grid_size,q,policy,mean_neg_utility,episodes\n";
  for (const AggregateRow& a : results.aggregates)
    out << a.grid_size << ',' << format_double(a.q) << ',' << a.policy << ','
        << format_double(a.mean_neg_utility) << ',' << a.episodes << '\n';
}

inline std::string format_aggregate_table(const ExperimentResults& results) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "grid" << std::setw(8) << "q" << std::setw(10) << "policy"
      << std::setw(18) << "mean_neg_utility" << "episodes\n";
  for (const AggregateRow& a : results.aggregates) {
    out << std::left << std::setw(10) << a.grid_size << std::setw(8) << format_double(a.q)
        << std::setw(10) << a.policy << std::setw(18) << format_double(a.mean_neg_utility)
        << a.episodes << "\n";
  }
  return out.str();
}

// Full experiment entry point used by the CLI: validates the output
// location before any episode runs, then writes episodes.csv and
// aggregate.csv under out_dir.
inline ExperimentResults run_experiment_to_dir(const ExperimentConfig& cfg,
                                               const std::string& out_dir, int n_workers = 1,
                                               std::ostream* progress = nullptr) {
  validate(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path episodes_path = fs::path(out_dir) / "episodes.csv";
  const fs::path aggregate_path = fs::path(out_dir) / "aggregate.csv";
  std::ofstream episodes_out(episodes_path, std::ios::binary);
  std::ofstream aggregate_out(aggregate_path, std::ios::binary);
  if (!episodes_out || !aggregate_out)
    throw std::runtime_error("cannot write to output directory: " + out_dir);

  ExperimentResults results = run_experiment(cfg, n_workers, progress);
  write_episode_csv(results, episodes_out);
  write_aggregate_csv(results, aggregate_out);
  if (!episodes_out || !aggregate_out)
    throw std::runtime_error("failed while writing results to " + out_dir);
  return results;
}

}  // namespace wildfire
