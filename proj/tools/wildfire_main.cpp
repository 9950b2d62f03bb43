#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wildfire/config.hpp"
#include "wildfire/harness.hpp"
#include "wildfire/zonal.hpp"
#include "wildfire/zonal_io.hpp"

namespace {

using nlohmann::json;

int run_zonal(const std::string& raster_path, const std::string& polygon_path,
              const std::string& out_path, const std::string& stats_arg,
              const std::string& neighbors_path) {
  const auto raster = wildfire::zonal::load_ascii_raster(raster_path);
  const auto polys = wildfire::zonal::load_polygons_csv(polygon_path);

  std::vector<std::string> stats;
  if (stats_arg.empty()) {
    stats = wildfire::zonal::all_stat_names();
  } else {
    std::stringstream ss(stats_arg);
    std::string item;
    while (std::getline(ss, item, ',')) stats.push_back(item);
  }

  std::vector<std::string> warnings;
  const auto ix = wildfire::zonal::build_intersections(polys, raster.meta, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  const auto result = wildfire::zonal::zonal_stats(ix, raster);
  const std::string layer = std::filesystem::path(raster_path).stem().string();
  const std::size_t rows = wildfire::zonal::export_covariates({{layer, result}}, out_path, stats);
  std::cout << "wrote " << rows << " rows to " << out_path << "\n";

  if (!neighbors_path.empty()) {
    const auto pairs = wildfire::zonal::neighbor_join(polys);
    std::ofstream out(neighbors_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + neighbors_path);
    out << "id_a,id_b\n";
    for (const auto& [a, b] : pairs) out << a << ',' << b << '\n';
    std::cout << "wrote " << pairs.size() << " neighbor pairs to " << neighbors_path << "\n";
  }
  return 0;
}

json grid_json(const std::vector<std::uint8_t>& v) {
  json arr = json::array();
  for (std::uint8_t x : v) arr.push_back(static_cast<int>(x));
  return arr;
}

int run_simulate(int grid, const std::string& policy_name, double q, std::uint64_t seed,
                 const std::string& trace_path) {
  wildfire::ScenarioConfig cfg;
  cfg.grid_size = grid;
  cfg.seed = seed;
  cfg.n_spread_scenarios = 256;
  const wildfire::Scenario scenario = wildfire::generate_scenario(cfg, 0);
  const wildfire::PolicyKind policy = wildfire::parse_policy(policy_name);

  wildfire::PlannerConfig pcfg;
  wildfire::SensingParams sp;
  wildfire::UtilityMap util;

  std::ofstream trace;
  wildfire::StepHook hook;
  if (!trace_path.empty()) {
    trace.open(trace_path, std::ios::binary);
    if (!trace) throw std::runtime_error("cannot write trace file: " + trace_path);
    hook = [&trace](const wildfire::StepRecord& rec) {
      json line;
      line["t"] = rec.t;
      line["fire"] = grid_json(rec.state->fire);
      line["fuel"] = grid_json(rec.state->fuel);
      line["action"] = rec.action->targets;
      line["step_cost"] = rec.step_cost;
      line["next_fire"] = grid_json(rec.next->fire);
      line["observation"] = grid_json(rec.obs->seen);
      trace << line.dump() << "\n";
    };
  }

  const std::uint64_t env_seed = wildfire::derive_seed(seed, {1, static_cast<std::uint64_t>(grid), 0, 0, 0});
  const std::uint64_t agent_seed =
      wildfire::derive_seed(seed, {2, static_cast<std::uint64_t>(grid), 0, 0,
                                   static_cast<std::uint64_t>(policy) + 1});
  const wildfire::EpisodeResult result =
      wildfire::run_episode(scenario, policy, q, cfg, pcfg, sp, util, env_seed, agent_seed, hook);

  std::cout << "policy=" << result.policy << " grid=" << grid << " q=" << q
            << " neg_utility=" << wildfire::format_double(result.neg_utility)
            << " steps=" << result.steps << " wall_ms=" << wildfire::format_double(result.wall_ms)
            << "\n";
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir, int workers) {
  const wildfire::ExperimentConfig cfg = wildfire::load_experiment_config(config_path);
  const wildfire::ExperimentResults results =
      wildfire::run_experiment_to_dir(cfg, out_dir, workers, &std::cerr);
  std::cout << wildfire::format_aggregate_table(results);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildfire suppression planning and zonal statistics toolkit"};
  app.require_subcommand(1);

  auto* zonal = app.add_subcommand("zonal", "Zonal statistics of a raster over polygons");
  std::string raster_path, polygon_path, out_path, stats_arg, neighbors_path;
  zonal->add_option("--raster", raster_path, "ASCII grid raster file")->required();
  zonal->add_option("--polygons", polygon_path, "CSV of id,wkt polygons")->required();
  zonal->add_option("--out", out_path, "output covariate CSV")->required();
  zonal->add_option("--stats", stats_arg, "comma-separated subset of min,max,median,sum,mode,count");
  zonal->add_option("--neighbors", neighbors_path, "also write the polygon neighbor pairs here");

  auto* simulate = app.add_subcommand("simulate", "Run one suppression episode");
  int grid = 8;
  std::string policy_name = "baseline";
  double q = 1.0;
  std::uint64_t seed = 0;
  std::string trace_path;
  simulate->add_option("--grid", grid, "square grid size")->required();
  simulate->add_option("--policy", policy_name, "baseline or uafr")->required();
  simulate->add_option("--q", q, "suppression effectiveness")->required();
  simulate->add_option("--seed", seed, "master seed")->required();
  simulate->add_option("--trace", trace_path, "write per-step JSON lines here");

  auto* experiment = app.add_subcommand("experiment", "Run the policy-comparison experiment");
  std::string config_path, out_dir;
  int workers = 1;
  experiment->add_option("--config", config_path, "JSON experiment configuration")->required();
  experiment->add_option("--out", out_dir, "output directory")->required();
  experiment->add_option("--workers", workers, "parallel episode workers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (zonal->parsed()) return run_zonal(raster_path, polygon_path, out_path, stats_arg, neighbors_path);
    if (simulate->parsed()) return run_simulate(grid, policy_name, q, seed, trace_path);
    if (experiment->parsed()) return run_experiment_cmd(config_path, out_dir, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
