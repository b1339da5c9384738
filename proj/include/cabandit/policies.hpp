#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cabandit/glr.hpp"
#include "cabandit/oracle.hpp"

namespace cabandit {

enum class PolicyKind { ctas, tas, co, uniform };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::ctas;
  double alpha = 1.0;                  // stopping boundary exponent, >= 1
  std::optional<double> B;             // boundary scale; empty = default_B(alpha, K)
  double exploration_multiplier = 1.0; // kappa: forced exploration fires below kappa*sqrt(t)
  double oracle_tol = 1e-10;
  int recompute_period = 1;            // steps between plug-in oracle refreshes

  void validate(int num_arms) const;   // throws invalid_argument on bad fields
  double resolve_B(int num_arms) const;
};

// Arms still in contention for the elimination policy, ascending order.
struct CoState {
  std::vector<int> active;

  static CoState full(int num_arms);
  bool contains(int arm) const;
  int size() const { return static_cast<int>(active.size()); }
};

// Tracking selection. Forced exploration: any arm with fewer than
// kappa * sqrt(t) pulls triggers a pull of the globally least-pulled arm.
// Otherwise the arm with the largest spend deficit J(t) * w_a - c_hat_a * N_a
// is pulled. Ties break to the lowest index. props must come from the
// plug-in solver on the current empirical means and costs.
int ctas_select_arm(const EmpiricalState& state, const PolicyConfig& cfg,
                    const OptimalProportions& props);

// Cost-blind variant: same tracking rule with every cost treated as 1, so the
// deficit is t * w_a - N_a. props must come from the plug-in solver with unit
// costs. The environment still charges real costs to the spend total.
int tas_select_arm(const EmpiricalState& state, const PolicyConfig& cfg,
                   const OptimalProportions& props);

// Chernoff stopping test: the statistic exceeds the boundary at pull count t.
bool ctas_should_stop(const EmpiricalState& state, const RewardFamily& fam,
                      const PolicyConfig& cfg, double delta);

// Elimination policy selection: the active arm minimizing
// sqrt(c_hat_a) * N_a, ties to the lowest index.
int co_select_arm(const EmpiricalState& state, const CoState& co);

// Removes from the active set every arm whose pairwise GLR against the
// current empirical best (over all arms) exceeds the boundary and whose mean
// is below the best's. The best arm itself is never removed; if removals
// would empty the set, the highest-mean active arm is kept.
void co_eliminate(const EmpiricalState& state, CoState& co, const RewardFamily& fam,
                  const PolicyConfig& cfg, double delta);

// Round-robin baseline: arm (t mod K).
int uniform_select_arm(const EmpiricalState& state);

// Final recommendation once a stopping rule fired: the empirical best arm.
int decide(const EmpiricalState& state);

}  // namespace cabandit
