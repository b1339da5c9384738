#include "cabandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cabandit {

namespace {

int least_pulled(const EmpiricalState& state) {
  int arm = 0;
  for (int a = 1; a < state.num_arms(); ++a)
    if (state.counts[a] < state.counts[arm]) arm = a;
  return arm;
}

// Shared tracking step; unit_costs switches the deficit between the spend
// form J * w_a - c_hat_a * N_a and the pull form t * w_a - N_a.
int tracking_select(const EmpiricalState& state, const PolicyConfig& cfg,
                    const OptimalProportions& props, bool unit_costs) {
  if (props.w.size() != state.num_arms())
    throw std::invalid_argument("tracking: proportions sized for a different instance");
  const double floor = cfg.exploration_multiplier * std::sqrt(static_cast<double>(state.t));
  for (int a = 0; a < state.num_arms(); ++a)
    if (static_cast<double>(state.counts[a]) < floor) return least_pulled(state);
  int arm = 0;
  double best_deficit = -std::numeric_limits<double>::infinity();
  const double total = unit_costs ? static_cast<double>(state.t) : state.total_cost;
  for (int a = 0; a < state.num_arms(); ++a) {
    const double charge = unit_costs ? 1.0 : state.mean_cost[a];
    const double deficit = total * props.w[a] - charge * static_cast<double>(state.counts[a]);
    if (deficit > best_deficit) {
      best_deficit = deficit;
      arm = a;
    }
  }
  return arm;
}

}  // namespace

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ctas: return "ctas";
    case PolicyKind::tas: return "tas";
    case PolicyKind::co: return "co";
    case PolicyKind::uniform: return "uniform";
  }
  throw std::invalid_argument("unknown policy kind");
}

PolicyKind policy_from_name(const std::string& name) {
  if (name == "ctas") return PolicyKind::ctas;
  if (name == "tas") return PolicyKind::tas;
  if (name == "co") return PolicyKind::co;
  if (name == "uniform") return PolicyKind::uniform;
  throw std::invalid_argument("unknown policy name: " + name);
}

void PolicyConfig::validate(int num_arms) const {
  if (!(alpha >= 1.0)) throw std::invalid_argument("policy: alpha must be at least 1");
  if (B && !(*B > 0.0)) throw std::invalid_argument("policy: B must be positive");
  if (!B) default_B(alpha, num_arms);  // throws when no default exists
  if (!(exploration_multiplier > 0.0))
    throw std::invalid_argument("policy: exploration multiplier must be positive");
  if (!(oracle_tol > 0.0)) throw std::invalid_argument("policy: oracle_tol must be positive");
  if (recompute_period < 1) throw std::invalid_argument("policy: recompute_period must be >= 1");
}

double PolicyConfig::resolve_B(int num_arms) const {
  return B ? *B : default_B(alpha, num_arms);
}

CoState CoState::full(int num_arms) {
  CoState co;
  co.active.resize(num_arms);
  std::iota(co.active.begin(), co.active.end(), 0);
  return co;
}

bool CoState::contains(int arm) const {
  return std::find(active.begin(), active.end(), arm) != active.end();
}

int ctas_select_arm(const EmpiricalState& state, const PolicyConfig& cfg,
                    const OptimalProportions& props) {
  return tracking_select(state, cfg, props, /*unit_costs=*/false);
}

int tas_select_arm(const EmpiricalState& state, const PolicyConfig& cfg,
                   const OptimalProportions& props) {
  return tracking_select(state, cfg, props, /*unit_costs=*/true);
}

bool ctas_should_stop(const EmpiricalState& state, const RewardFamily& fam,
                      const PolicyConfig& cfg, double delta) {
  return chernoff_stat(state, fam) >
         threshold(state.t, delta, cfg.alpha, cfg.resolve_B(state.num_arms()));
}

int co_select_arm(const EmpiricalState& state, const CoState& co) {
  if (co.active.empty()) throw std::invalid_argument("co_select_arm: empty active set");
  int arm = co.active.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (int a : co.active) {
    const double score =
        std::sqrt(state.mean_cost[a]) * static_cast<double>(state.counts[a]);
    if (score < best_score) {
      best_score = score;
      arm = a;
    }
  }
  return arm;
}

void co_eliminate(const EmpiricalState& state, CoState& co, const RewardFamily& fam,
                  const PolicyConfig& cfg, double delta) {
  if (co.active.empty()) throw std::invalid_argument("co_eliminate: empty active set");
  const int best = empirical_best(state);
  const double thr = threshold(state.t, delta, cfg.alpha, cfg.resolve_B(state.num_arms()));
  std::vector<int> kept;
  kept.reserve(co.active.size());
  for (int a : co.active) {
    if (a == best || state.mean_reward[a] >= state.mean_reward[best] ||
        pairwise_glr(state, best, a, fam) <= thr)
      kept.push_back(a);
  }
  if (kept.empty()) {
    // Only reachable when the global empirical best was eliminated earlier;
    // keep the best remaining arm so a survivor always exists.
    int keep = co.active.front();
    for (int a : co.active)
      if (state.mean_reward[a] > state.mean_reward[keep]) keep = a;
    kept.push_back(keep);
  }
  co.active = std::move(kept);
}

int uniform_select_arm(const EmpiricalState& state) {
  return static_cast<int>(state.t % state.num_arms());
}

int decide(const EmpiricalState& state) {
  if (state.t < state.num_arms())
    throw std::invalid_argument("decide: not every arm has been observed");
  return empirical_best(state);
}

}  // namespace cabandit
