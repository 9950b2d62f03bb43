#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wildfire/harness.hpp"

namespace wildfire {

// Experiment configuration file: one JSON object whose keys mirror
// ScenarioConfig, plus a `planner` object mirroring PlannerConfig.
// `grid_size` accepts a single size or an array of sizes to sweep.
// Unknown keys are rejected.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  static const std::set<std::string> scenario_keys = {
      "grid_size",  "fire_fraction", "class_mix",          "fuel_init",
      "q_values",   "n_initial_states", "n_spread_scenarios", "horizon",
      "frp_threshold", "seed",       "common_random_numbers", "deterministic_spread",
      "planner"};
  static const std::set<std::string> planner_keys = {
      "n_simulations", "max_depth", "ucb_c", "gamma_discount", "k_obs",
      "alpha_obs",     "k_act",     "alpha_act", "k_max",      "n_particles"};

  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!scenario_keys.count(key)) throw std::invalid_argument("unknown config key: " + key);

  ExperimentConfig cfg;

  if (j.contains("grid_size")) {
    const auto& g = j.at("grid_size");
    if (g.is_array())
      cfg.grid_sizes = g.get<std::vector<int>>();
    else
      cfg.grid_sizes = {g.get<int>()};
  } else {
    cfg.grid_sizes = {cfg.base.grid_size};
  }
  if (!cfg.grid_sizes.empty()) cfg.base.grid_size = cfg.grid_sizes.front();

  if (j.contains("fire_fraction")) cfg.base.fire_fraction = j.at("fire_fraction").get<double>();
  if (j.contains("class_mix")) {
    const auto mix = j.at("class_mix").get<std::vector<double>>();
    if (mix.size() != 3)
      throw std::invalid_argument("class_mix must have 3 entries (red, yellow, green)");
    cfg.base.class_mix = {mix[0], mix[1], mix[2]};
  }
  if (j.contains("fuel_init")) cfg.base.fuel_init = j.at("fuel_init").get<int>();
  if (j.contains("q_values")) cfg.base.q_values = j.at("q_values").get<std::vector<double>>();
  if (j.contains("n_initial_states"))
    cfg.base.n_initial_states = j.at("n_initial_states").get<int>();
  if (j.contains("n_spread_scenarios"))
    cfg.base.n_spread_scenarios = j.at("n_spread_scenarios").get<int>();
  if (j.contains("horizon")) cfg.base.horizon = j.at("horizon").get<int>();
  if (j.contains("frp_threshold")) cfg.base.frp_threshold = j.at("frp_threshold").get<double>();
  if (j.contains("seed")) cfg.base.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("common_random_numbers"))
    cfg.base.common_random_numbers = j.at("common_random_numbers").get<bool>();
  if (j.contains("deterministic_spread"))
    cfg.base.deterministic_spread = j.at("deterministic_spread").get<bool>();

  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    if (!p.is_object()) throw std::invalid_argument("planner must be a JSON object");
    for (const auto& [key, value] : p.items())
      if (!planner_keys.count(key)) throw std::invalid_argument("unknown planner key: " + key);
    if (p.contains("n_simulations")) cfg.planner.n_simulations = p.at("n_simulations").get<int>();
    if (p.contains("max_depth")) cfg.planner.max_depth = p.at("max_depth").get<int>();
    if (p.contains("ucb_c")) cfg.planner.ucb_c = p.at("ucb_c").get<double>();
    if (p.contains("gamma_discount"))
      cfg.planner.gamma_discount = p.at("gamma_discount").get<double>();
    if (p.contains("k_obs")) cfg.planner.k_obs = p.at("k_obs").get<double>();
    if (p.contains("alpha_obs")) cfg.planner.alpha_obs = p.at("alpha_obs").get<double>();
    if (p.contains("k_act")) cfg.planner.k_act = p.at("k_act").get<double>();
    if (p.contains("alpha_act")) cfg.planner.alpha_act = p.at("alpha_act").get<double>();
    if (p.contains("k_max")) cfg.planner.k_max = p.at("k_max").get<int>();
    if (p.contains("n_particles")) cfg.planner.n_particles = p.at("n_particles").get<int>();
  }

  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

}  // namespace wildfire
