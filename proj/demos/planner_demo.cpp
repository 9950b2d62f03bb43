// Runs both policies on the same scenario and prints the cost comparison.
#include <iostream>

#include "wildfire/harness.hpp"

using namespace wildfire;

int main() {
  ScenarioConfig cfg;
  cfg.grid_size = 6;
  cfg.seed = 11;
  cfg.deterministic_spread = true;
  const Scenario scenario = generate_scenario(cfg, 42);

  PlannerConfig pcfg;
  pcfg.n_simulations = 512;
  pcfg.max_depth = 8;
  SensingParams sp;
  sp.eta = 0.1;
  UtilityMap util;

  for (PolicyKind policy : {PolicyKind::Baseline, PolicyKind::Uafr}) {
    const auto env_seed = derive_seed(cfg.seed, {1, 6, 0, 42, 0});
    const auto agent_seed = derive_seed(cfg.seed, {2, 6, 0, 42, static_cast<std::uint64_t>(policy)});
    const EpisodeResult r =
        run_episode(scenario, policy, 0.9, cfg, pcfg, sp, util, env_seed, agent_seed);
    std::cout << r.policy << ": neg_utility=" << r.neg_utility << " steps=" << r.steps << "\n";
  }
  return 0;
}
