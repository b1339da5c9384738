#include "cabandit/glr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cabandit {

namespace {

void check_arm(const EmpiricalState& state, int a) {
  if (a < 0 || a >= state.num_arms()) throw std::invalid_argument("glr: arm index out of range");
  if (state.counts[a] < 1) throw std::invalid_argument("glr: arm has no observations");
}

}  // namespace

int empirical_best(const EmpiricalState& state) {
  int best = 0;
  for (int a = 1; a < state.num_arms(); ++a)
    if (state.mean_reward[a] > state.mean_reward[best]) best = a;
  return best;
}

double mixture_mean(const EmpiricalState& state, int a, int b) {
  check_arm(state, a);
  check_arm(state, b);
  const double na = static_cast<double>(state.counts[a]);
  const double nb = static_cast<double>(state.counts[b]);
  return (na * state.mean_reward[a] + nb * state.mean_reward[b]) / (na + nb);
}

double pairwise_glr(const EmpiricalState& state, int a, int b, const RewardFamily& fam) {
  if (a == b) throw std::invalid_argument("pairwise_glr: arms must differ");
  check_arm(state, a);
  check_arm(state, b);
  const double mu_a = clamp_mean(fam, state.mean_reward[a]);
  const double mu_b = clamp_mean(fam, state.mean_reward[b]);
  const double na = static_cast<double>(state.counts[a]);
  const double nb = static_cast<double>(state.counts[b]);
  const double m = (na * mu_a + nb * mu_b) / (na + nb);
  return na * kl_div(fam, mu_a, m) + nb * kl_div(fam, mu_b, m);
}

double chernoff_stat(const EmpiricalState& state, const RewardFamily& fam) {
  for (int a = 0; a < state.num_arms(); ++a) check_arm(state, a);
  const int best = empirical_best(state);
  double z = std::numeric_limits<double>::infinity();
  for (int b = 0; b < state.num_arms(); ++b)
    if (b != best) z = std::min(z, pairwise_glr(state, best, b, fam));
  return z;
}

double threshold(std::int64_t t, double delta, double alpha, double B) {
  if (t < 1) throw std::invalid_argument("threshold: t must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("threshold: delta in (0, 1)");
  if (!(alpha >= 1.0)) throw std::invalid_argument("threshold: alpha must be at least 1");
  if (!(B > 0.0)) throw std::invalid_argument("threshold: B must be positive");
  return std::log(B) + alpha * std::log(static_cast<double>(t)) - std::log(delta);
}

double default_B(double alpha, int num_arms) {
  if (num_arms < 2) throw std::invalid_argument("default_B: need at least two arms");
  if (alpha == 1.0) return 2.0 * static_cast<double>(num_arms);
  throw std::invalid_argument("default_B: no default is valid for alpha != 1, supply B");
}

}  // namespace cabandit
