#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "wildfire/belief.hpp"
#include "wildfire/dynamics.hpp"
#include "wildfire/grid.hpp"
#include "wildfire/rng.hpp"
#include "wildfire/sensing.hpp"

namespace wildfire {

struct PlannerConfig {
  int n_simulations = 1000;
  int max_depth = 10;
  double ucb_c = 10.0;          // exploration constant; default |U(red)|
  double gamma_discount = 0.95;
  double k_obs = 4.0;           // observation-widening pair: children <= ceil(k*N^alpha)
  double alpha_obs = 0.1;
  double k_act = 8.0;           // action-widening pair
  double alpha_act = 0.5;
  int k_max = 1;                // suppression budget per step
  int n_particles = 100;

  bool valid() const {
    return n_simulations >= 1 && max_depth >= 1 && ucb_c >= 0.0 &&
           gamma_discount >= 0.0 && gamma_discount <= 1.0 && k_obs > 0.0 &&
           alpha_obs >= 0.0 && alpha_obs < 1.0 && k_act > 0.0 && alpha_act >= 0.0 &&
           alpha_act < 1.0 && k_max >= 0 && n_particles >= 1;
  }
};

// Greedy reference policy: suppress the observed-burning cells with the
// largest cost magnitude, up to the budget; lowest cell index wins ties.
// No evidence of fire means no-op.
inline Action baseline_policy(const Observation& o, const std::vector<CellClass>& classes,
                              const UtilityMap& util, int k_max) {
  if (o.seen.size() != classes.size())
    throw std::invalid_argument("baseline_policy: dimension mismatch");
  std::vector<int> seen_cells;
  for (std::size_t i = 0; i < o.seen.size(); ++i)
    if (o.seen[i]) seen_cells.push_back(static_cast<int>(i));
  if (seen_cells.empty() || k_max <= 0) return Action::noop();

  std::stable_sort(seen_cells.begin(), seen_cells.end(), [&](int a, int b) {
    return util.of(classes[static_cast<std::size_t>(a)]) <
           util.of(classes[static_cast<std::size_t>(b)]);
  });
  if (static_cast<int>(seen_cells.size()) > k_max) seen_cells.resize(static_cast<std::size_t>(k_max));
  std::sort(seen_cells.begin(), seen_cells.end());
  return Action{std::move(seen_cells)};
}

// Default policy for leaf evaluation: play the baseline against the fully
// observed simulated state, accumulating discounted rewards until the fire
// is out or the depth budget is spent.
inline double rollout(GridState state, int depth, const DynamicsParams& dyn,
                      const UtilityMap& util, int k_max, double gamma, Rng& rng) {
  if (depth < 0) throw std::invalid_argument("rollout: negative depth");
  double total = 0.0;
  double disc = 1.0;
  for (int d = 0; d < depth && state.any_fire(); ++d) {
    total += disc * reward(state, util);
    const Action a = baseline_policy(Observation::exact(state), state.classes, util, k_max);
    state = step(state, a, dyn, rng);
    disc *= gamma;
  }
  return total;
}

// Per-search statistics, exposed for tests and diagnostics.
struct PlanDiagnostics {
  struct BeliefNodeStat {
    int visits = 0;
    int action_children = 0;
  };
  struct ActionNodeStat {
    int visits = 0;
    int obs_children = 0;
    double q = 0.0;
  };
  std::vector<BeliefNodeStat> belief_nodes;
  std::vector<ActionNodeStat> action_nodes;
  std::vector<Action> root_actions;
  std::vector<int> root_visits;
  std::vector<double> root_q;
};

namespace detail {

struct ObsKey {
  std::vector<std::uint64_t> words;
  bool operator==(const ObsKey&) const = default;
};

struct ObsKeyHash {
  std::size_t operator()(const ObsKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t w : k.words) {
      h ^= w;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

inline ObsKey pack_observation(const Observation& o) {
  ObsKey key;
  key.words.assign((o.seen.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < o.seen.size(); ++i)
    if (o.seen[i]) key.words[i / 64] |= (1ULL << (i % 64));
  return key;
}

// Monte Carlo tree search over belief nodes with progressive widening on
// both actions and observations. Observation nodes keep every simulated
// state that reaches them (no rejection) together with its observation
// likelihood; continuing a simulation through a node draws from that
// collection proportionally to the weights, falling back to a uniform draw
// when all of them are zero.
class Search {
 public:
  Search(const PlannerConfig& cfg, const DynamicsParams& dyn, const SensingParams& sp,
         const UtilityMap& util, Rng& rng)
      : cfg_(cfg), dyn_(dyn), sp_(sp), util_(util), rng_(rng) {}

  Action run(const Belief& belief) {
    root_ = new_belief_node();
    auto& root = bnodes_[static_cast<std::size_t>(root_)];
    for (const Particle& p : belief.particles) {
      root.particles.push_back(p);
      root.weights.push_back(1.0);
      root.cum_weights.push_back(root.cum_weights.empty() ? 1.0 : root.cum_weights.back() + 1.0);
    }
    const int n = belief.size();
    for (int sim = 0; sim < cfg_.n_simulations; ++sim) {
      const Particle& s = bnodes_[static_cast<std::size_t>(root_)]
                              .particles[static_cast<std::size_t>(rng_.index(n))];
      simulate(root_, s, cfg_.max_depth);
    }
    return best_root_action();
  }

  void fill_diagnostics(PlanDiagnostics& diag) const {
    for (const BeliefNode& b : bnodes_)
      diag.belief_nodes.push_back({b.visits, static_cast<int>(b.action_children.size())});
    for (const ActionNode& a : anodes_)
      diag.action_nodes.push_back({a.visits, static_cast<int>(a.child_nodes.size()), a.q});
    const BeliefNode& root = bnodes_[static_cast<std::size_t>(root_)];
    for (int a_id : root.action_children) {
      const ActionNode& an = anodes_[static_cast<std::size_t>(a_id)];
      diag.root_actions.push_back(an.action);
      diag.root_visits.push_back(an.visits);
      diag.root_q.push_back(an.q);
    }
  }

 private:
  struct BeliefNode {
    int visits = 0;
    Observation obs;  // the observation labeling the incoming branch
    std::vector<Particle> particles;
    std::vector<double> weights;
    std::vector<double> cum_weights;
    std::vector<int> action_children;
    std::vector<Action> candidates;
    std::size_t next_candidate = 0;
    bool candidates_ready = false;
  };

  struct ActionNode {
    Action action;
    int visits = 0;
    double q = 0.0;
    std::unordered_map<ObsKey, std::size_t, ObsKeyHash> child_index;
    std::vector<int> child_nodes;
    std::vector<int> child_visits;
  };

  int new_belief_node() {
    bnodes_.emplace_back();
    return static_cast<int>(bnodes_.size()) - 1;
  }

  int new_action_node(Action a) {
    anodes_.emplace_back();
    anodes_.back().action = std::move(a);
    return static_cast<int>(anodes_.size()) - 1;
  }

  static int widening_bound(double k, double alpha, int visits) {
    return static_cast<int>(std::ceil(k * std::pow(static_cast<double>(visits), alpha)));
  }

  // Candidate actions for a node, ranked by expected savings: cells with a
  // positive burn marginal in the node's particle collection plus their
  // neighbors, scored by |utility| * marginal. For budgets above one, the
  // top-scored prefixes are offered as joint actions first. The no-op is
  // always a legal candidate.
  void generate_candidates(BeliefNode& node) {
    node.candidates_ready = true;
    node.candidates.clear();
    node.next_candidate = 0;
    if (node.particles.empty() || cfg_.k_max < 1) {
      node.candidates.push_back(Action::noop());
      return;
    }
    const GridState& sample = node.particles.front().cur;
    const int n = sample.cell_count();
    std::vector<int> burn_count(static_cast<std::size_t>(n), 0);
    for (const Particle& p : node.particles)
      for (int i = 0; i < n; ++i)
        if (p.cur.burning(i)) ++burn_count[static_cast<std::size_t>(i)];

    std::vector<char> in_pool(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      if (burn_count[static_cast<std::size_t>(i)] == 0) continue;
      in_pool[static_cast<std::size_t>(i)] = 1;
      for (int nb : neighbors(sample, i)) in_pool[static_cast<std::size_t>(nb)] = 1;
    }

    struct Scored {
      int cell;
      double score;
      double cost;
    };
    std::vector<Scored> pool;
    const double denom = static_cast<double>(node.particles.size());
    for (int i = 0; i < n; ++i) {
      if (!in_pool[static_cast<std::size_t>(i)]) continue;
      const double marginal = burn_count[static_cast<std::size_t>(i)] / denom;
      const double cost = -util_.of(sample.classes[static_cast<std::size_t>(i)]);
      pool.push_back({i, cost * marginal, cost});
    }
    std::sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.cost != b.cost) return a.cost > b.cost;
      return a.cell < b.cell;
    });
    // keep the search focused on the best-scored cells
    constexpr std::size_t kPoolLimit = 10;
    if (pool.size() > kPoolLimit) pool.resize(kPoolLimit);

    // largest joint actions first, then singletons, then the no-op
    for (int k = std::min<int>(cfg_.k_max, static_cast<int>(pool.size())); k >= 2; --k) {
      std::vector<int> cells;
      for (int j = 0; j < k; ++j) cells.push_back(pool[static_cast<std::size_t>(j)].cell);
      std::sort(cells.begin(), cells.end());
      node.candidates.push_back(Action{std::move(cells)});
    }
    for (const Scored& s : pool) node.candidates.push_back(Action::single(s.cell));
    node.candidates.push_back(Action::noop());
  }

  int select_action(int v_id) {
    BeliefNode& v = bnodes_[static_cast<std::size_t>(v_id)];
    if (!v.candidates_ready) generate_candidates(v);

    const int bound = widening_bound(cfg_.k_act, cfg_.alpha_act, std::max(1, v.visits));
    if (static_cast<int>(v.action_children.size()) < bound &&
        v.next_candidate < v.candidates.size()) {
      const int a_id = new_action_node(v.candidates[v.next_candidate++]);
      bnodes_[static_cast<std::size_t>(v_id)].action_children.push_back(a_id);
    }

    BeliefNode& node = bnodes_[static_cast<std::size_t>(v_id)];
    const double log_n = std::log(static_cast<double>(std::max(1, node.visits)));
    int best = -1;
    double best_ucb = -std::numeric_limits<double>::infinity();
    for (int a_id : node.action_children) {
      const ActionNode& an = anodes_[static_cast<std::size_t>(a_id)];
      double ucb;
      if (an.visits == 0) {
        ucb = std::numeric_limits<double>::infinity();
      } else {
        ucb = an.q + cfg_.ucb_c * std::sqrt(log_n / static_cast<double>(an.visits));
      }
      if (best < 0 || ucb > best_ucb ||
          (ucb == best_ucb &&
           an.action < anodes_[static_cast<std::size_t>(best)].action)) {
        best = a_id;
        best_ucb = ucb;
      }
    }
    return best;
  }

  Particle draw_particle(BeliefNode& node) {
    const double total = node.cum_weights.back();
    std::size_t k;
    if (total <= 0.0) {
      k = static_cast<std::size_t>(rng_.index(static_cast<int>(node.particles.size())));
    } else {
      const double u = rng_.uniform() * total;
      const auto it = std::upper_bound(node.cum_weights.begin(), node.cum_weights.end(), u);
      k = std::min<std::size_t>(static_cast<std::size_t>(it - node.cum_weights.begin()),
                                node.particles.size() - 1);
    }
    return node.particles[k];
  }

  double simulate(int v_id, Particle s, int depth) {
    bnodes_[static_cast<std::size_t>(v_id)].visits++;
    if (depth == 0) return 0.0;
    if (!s.cur.any_fire()) return 0.0;
    const double r = reward(s.cur, util_);

    const int a_id = select_action(v_id);
    ActionNode& an = anodes_[static_cast<std::size_t>(a_id)];
    an.visits++;

    GridState next = step(s.cur, an.action, dyn_, rng_);
    Observation o = observe(s.cur, next, an.action, dyn_, sp_);
    ObsKey key = pack_observation(o);

    bool created = false;
    std::size_t pos;
    const auto it = an.child_index.find(key);
    if (it != an.child_index.end()) {
      pos = it->second;
    } else if (static_cast<int>(an.child_nodes.size()) <
               widening_bound(cfg_.k_obs, cfg_.alpha_obs, an.visits)) {
      const int b_id = new_belief_node();
      ActionNode& an2 = anodes_[static_cast<std::size_t>(a_id)];  // re-fetch, pool grew
      bnodes_[static_cast<std::size_t>(b_id)].obs = o;
      pos = an2.child_nodes.size();
      an2.child_index.emplace(std::move(key), pos);
      an2.child_nodes.push_back(b_id);
      an2.child_visits.push_back(0);
      created = true;
    } else {
      // widening bound hit: continue through an existing branch, chosen
      // proportionally to how often each has been followed
      pos = weighted_child(an);
    }

    ActionNode& owner = anodes_[static_cast<std::size_t>(a_id)];
    owner.child_visits[pos]++;
    const int b_id = owner.child_nodes[pos];
    BeliefNode& child = bnodes_[static_cast<std::size_t>(b_id)];

    const double w = observation_likelihood(child.obs, s.cur, next, owner.action, dyn_, sp_);
    child.particles.push_back(Particle{s.cur, next});
    child.weights.push_back(w);
    child.cum_weights.push_back(child.cum_weights.empty() ? w : child.cum_weights.back() + w);

    double total;
    if (created) {
      total = r + cfg_.gamma_discount * rollout(std::move(next), depth - 1, dyn_, util_,
                                                cfg_.k_max, cfg_.gamma_discount, rng_);
    } else {
      const Particle cont = draw_particle(child);
      total = r + cfg_.gamma_discount * simulate(b_id, cont, depth - 1);
    }

    ActionNode& upd = anodes_[static_cast<std::size_t>(a_id)];
    upd.q += (total - upd.q) / static_cast<double>(upd.visits);
    return total;
  }

  std::size_t weighted_child(const ActionNode& an) {
    int total = 0;
    for (int v : an.child_visits) total += v;
    if (total <= 0)
      return static_cast<std::size_t>(rng_.index(static_cast<int>(an.child_nodes.size())));
    int pick = rng_.index(total);
    for (std::size_t i = 0; i < an.child_visits.size(); ++i) {
      pick -= an.child_visits[i];
      if (pick < 0) return i;
    }
    return an.child_visits.size() - 1;
  }

  Action best_root_action() const {
    const BeliefNode& root = bnodes_[static_cast<std::size_t>(root_)];
    if (root.action_children.empty()) return Action::noop();
    const ActionNode* best = nullptr;
    for (int a_id : root.action_children) {
      const ActionNode& an = anodes_[static_cast<std::size_t>(a_id)];
      if (!best || an.visits > best->visits ||
          (an.visits == best->visits && an.action < best->action)) {
        best = &an;
      }
    }
    return best->action;
  }

  PlannerConfig cfg_;
  DynamicsParams dyn_;
  SensingParams sp_;
  UtilityMap util_;
  Rng& rng_;
  std::deque<BeliefNode> bnodes_;
  std::deque<ActionNode> anodes_;
  int root_ = -1;
};

}  // namespace detail

// Online action selection: POMCPOW-style tree search where each observation
// node's particle collection is maintained without rejection. Returns the
// most visited root action; ties break toward the lexicographically
// smallest action, so the no-op wins when nothing separates the options.
inline Action plan(const Belief& belief, const PlannerConfig& cfg, const DynamicsParams& dyn,
                   const SensingParams& sp, const UtilityMap& util, Rng& rng,
                   PlanDiagnostics* diag = nullptr) {
  if (belief.empty()) throw std::invalid_argument("plan: empty belief");
  if (cfg.n_simulations <= 0) throw std::invalid_argument("plan: zero simulations");
  detail::Search search(cfg, dyn, sp, util, rng);
  const Action a = search.run(belief);
  if (diag) search.fill_diagnostics(*diag);
  return a;
}

}  // namespace wildfire
