#pragma once

#include <cstdint>

#include "cabandit/exp_family.hpp"

namespace cabandit {

// Per-arm sufficient statistics of one trajectory: pull counts, running
// reward/cost means, and the running total spend. By construction
// sum(counts) == t and total_cost == sum(mean_cost * counts) up to float
// accumulation error.
struct EmpiricalState {
  std::int64_t t = 0;
  ArrayXl counts;
  ArrayXd mean_reward;
  ArrayXd mean_cost;
  double total_cost = 0.0;

  explicit EmpiricalState(int num_arms)
      : counts(ArrayXl::Zero(num_arms)),
        mean_reward(ArrayXd::Zero(num_arms)),
        mean_cost(ArrayXd::Zero(num_arms)) {}

  int num_arms() const { return static_cast<int>(counts.size()); }

  void record_pull(int arm, double reward, double cost) {
    ++counts[arm];
    ++t;
    mean_reward[arm] += (reward - mean_reward[arm]) / static_cast<double>(counts[arm]);
    mean_cost[arm] += (cost - mean_cost[arm]) / static_cast<double>(counts[arm]);
    total_cost += cost;
  }
};

// Arm with the highest running mean reward, lowest index on ties.
int empirical_best(const EmpiricalState& state);

// Count-weighted average of the two arms' running means.
double mixture_mean(const EmpiricalState& state, int a, int b);

// Generalized likelihood ratio separating arms a and b:
//   Z = N_a d(mu_a, m) + N_b d(mu_b, m)
// with m the count-weighted mixture of the (domain-clamped) means. Symmetric
// in (a, b) and zero iff the means coincide.
double pairwise_glr(const EmpiricalState& state, int a, int b, const RewardFamily& fam);

// Chernoff stopping statistic: min over rivals b of pairwise_glr(best, b),
// which equals the max-min form by the argmax property. Requires every arm
// pulled at least once.
double chernoff_stat(const EmpiricalState& state, const RewardFamily& fam);

// Stopping boundary log(B * t^alpha / delta).
double threshold(std::int64_t t, double delta, double alpha, double B);

// Default boundary scale: 2K is valid for alpha = 1; larger alpha needs an
// explicit choice from the caller, so this refuses to guess.
double default_B(double alpha, int num_arms);

}  // namespace cabandit
