#include "cabandit/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cabandit {

namespace {

constexpr double kDegenerateGap = 1e-8;
constexpr double kBracketEps = 1e-12;
constexpr int kMaxIter = 200;

double mixture(double mu1, double mu_a, double x) { return (mu1 + x * mu_a) / (1.0 + x); }

double g_eval(const RewardFamily& fam, double mu1, double mu_a, double x) {
  const double m = mixture(mu1, mu_a, x);
  // (1 + x) * I_{1/(1+x)} expands to d(mu1, m) + x * d(mu_a, m).
  return kl_div(fam, mu1, m) + x * kl_div(fam, mu_a, m);
}

double g_inverse_impl(const RewardFamily& fam, double mu1, double mu_a, double d_full,
                      double y, double tol) {
  if (y == 0.0) return 0.0;
  // Effective tolerance scales with the (possibly tiny) range of g but never
  // exceeds the requested absolute one.
  const double eps = tol * std::min(1.0, d_full);
  double lo = 0.0, hi = 1.0;
  int expand = 0;
  while (g_eval(fam, mu1, mu_a, hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 128) throw ConvergenceError("g_inverse: upper bracket expansion failed");
  }
  for (int it = 0; it < kMaxIter; ++it) {
    const double mid = 0.5 * (lo + hi);
    // No double remains strictly between the endpoints: mid is the root to
    // full representable precision even when rounding noise in g keeps the
    // residual above eps (tiny gaps push eps below the evaluation noise).
    if (mid == lo || mid == hi) return mid;
    const double r = g_eval(fam, mu1, mu_a, mid) - y;
    if (std::abs(r) <= eps) return mid;
    (r < 0.0 ? lo : hi) = mid;
  }
  throw ConvergenceError("g_inverse: no convergence within iteration budget");
}

}  // namespace

double i_alpha(double alpha, double mu1, double mu2, const RewardFamily& fam) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("i_alpha: alpha must lie in [0, 1]");
  if (alpha == 0.0 || alpha == 1.0) return 0.0;
  const double m = alpha * mu1 + (1.0 - alpha) * mu2;
  return alpha * kl_div(fam, mu1, m) + (1.0 - alpha) * kl_div(fam, mu2, m);
}

double g_fn(double x, double mu1, double mu_a, const RewardFamily& fam) {
  if (!(x >= 0.0)) throw std::invalid_argument("g_fn: x must be nonnegative");
  if (!(mu1 > mu_a)) throw std::invalid_argument("g_fn: requires mu1 > mu_a");
  return g_eval(fam, mu1, mu_a, x);
}

double g_inverse(double y, double mu1, double mu_a, const RewardFamily& fam, double tol) {
  if (!(mu1 > mu_a)) throw std::invalid_argument("g_inverse: requires mu1 > mu_a");
  if (!(tol > 0.0)) throw std::invalid_argument("g_inverse: tol must be positive");
  const double d_full = kl_div(fam, mu1, mu_a);
  if (!(y >= 0.0 && y < d_full))
    throw std::invalid_argument("g_inverse: y must lie in [0, d(mu1, mu_a))");
  return g_inverse_impl(fam, mu1, mu_a, d_full, y, tol);
}

namespace {

double big_f_impl(const RewardFamily& fam, const ArrayXd& means, const ArrayXd& costs,
                  int best, double y, double gtol) {
  const double mu1 = means[best];
  const double c1 = costs[best];
  double sum = 0.0;
  for (int a = 0; a < means.size(); ++a) {
    if (a == best) continue;
    const double d_full = kl_div(fam, mu1, means[a]);
    const double x = g_inverse_impl(fam, mu1, means[a], d_full, y, gtol);
    const double m = mixture(mu1, means[a], x);
    sum += (costs[a] * kl_div(fam, mu1, m)) / (c1 * kl_div(fam, means[a], m));
  }
  return sum;
}

int checked_best_arm(const RewardFamily& fam, const ArrayXd& means, const ArrayXd& costs) {
  if (means.size() < 2) throw std::invalid_argument("proportions: need at least two arms");
  if (costs.size() != means.size())
    throw std::invalid_argument("proportions: one cost per arm");
  for (int a = 0; a < means.size(); ++a) {
    if (!valid_mean(fam, means[a]))
      throw std::invalid_argument("proportions: mean outside family domain");
    if (!(costs[a] > 0.0) || !std::isfinite(costs[a]))
      throw std::invalid_argument("proportions: costs must be positive");
  }
  int best = 0;
  for (int a = 1; a < means.size(); ++a)
    if (means[a] > means[best]) best = a;
  for (int a = 0; a < means.size(); ++a)
    if (a != best && means[best] - means[a] < kDegenerateGap)
      throw DegenerateInstanceError("proportions: top gap below 1e-8, weights undefined");
  return best;
}

}  // namespace

double big_f(double y, const BanditInstance& instance) {
  const ArrayXd costs = instance.cost_means();
  const int best = checked_best_arm(instance.family, instance.reward_means, costs);
  double d_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < instance.num_arms(); ++a)
    if (a != best)
      d_min = std::min(d_min, kl_div(instance.family, instance.reward_means[best],
                                     instance.reward_means[a]));
  if (!(y >= 0.0 && y < d_min))
    throw std::invalid_argument("big_f: y must lie in [0, min_a d(mu1, mu_a))");
  return big_f_impl(instance.family, instance.reward_means, costs, best, y, 1e-12);
}

OptimalProportions compute_proportions(const RewardFamily& fam, const ArrayXd& means,
                                       const ArrayXd& costs, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("proportions: tol must be positive");
  const int best = checked_best_arm(fam, means, costs);
  const int k = static_cast<int>(means.size());

  double d_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a)
    if (a != best) d_min = std::min(d_min, kl_div(fam, means[best], means[a]));

  // F is strictly increasing with F(0) = 0 and a pole at d_min, so the root
  // is bracketed by (eps, (1 - eps) * d_min).
  const double gtol = std::min(1e-12, 1e-2 * tol);
  double lo = kBracketEps * d_min;
  double hi = (1.0 - kBracketEps) * d_min;
  if (big_f_impl(fam, means, costs, best, lo, gtol) >= 1.0 ||
      big_f_impl(fam, means, costs, best, hi, gtol) <= 1.0)
    throw ConvergenceError("proportions: balance root not bracketed");
  const double width_goal = tol * std::min(1.0, d_min);
  int it = 0;
  while (hi - lo > width_goal) {
    if (++it > kMaxIter) throw ConvergenceError("proportions: bisection iteration cap hit");
    const double mid = 0.5 * (lo + hi);
    (big_f_impl(fam, means, costs, best, mid, gtol) < 1.0 ? lo : hi) = mid;
  }
  const double y_star = 0.5 * (lo + hi);

  ArrayXd x(k);
  x[best] = 1.0;
  for (int a = 0; a < k; ++a) {
    if (a == best) continue;
    const double d_full = kl_div(fam, means[best], means[a]);
    x[a] = g_inverse_impl(fam, means[best], means[a], d_full, y_star, gtol);
  }

  OptimalProportions out;
  out.best_arm = best;
  out.y_star = y_star;
  out.w = (costs * x) / (costs * x).sum();
  out.pull_fractions = x / x.sum();

  // T* is the reciprocal of the attained max-min objective at w.
  double objective = std::numeric_limits<double>::infinity();
  const double wb_cb = out.w[best] / costs[best];
  for (int a = 0; a < k; ++a) {
    if (a == best) continue;
    const double wa_ca = out.w[a] / costs[a];
    const double s = wb_cb + wa_ca;
    objective = std::min(objective, s * i_alpha(wb_cb / s, means[best], means[a], fam));
  }
  out.t_star = 1.0 / objective;
  return out;
}

OptimalProportions compute_proportions(const BanditInstance& instance, double tol) {
  return compute_proportions(instance.family, instance.reward_means, instance.cost_means(), tol);
}

double t_star_closed_two_arm(double mu1, double mu2, double c1, double c2, double sigma) {
  if (!(c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("closed form: costs must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("closed form: sigma must be positive");
  const double gap = mu1 - mu2;
  if (gap == 0.0) throw std::invalid_argument("closed form: means must differ");
  const double s = std::sqrt(c1) + std::sqrt(c2);
  return 2.0 * sigma * sigma * s * s / (gap * gap);
}

double t_star_closed_symmetric(double mu1, double mu_a, double c1, double c_a, int num_arms) {
  if (num_arms < 2) throw std::invalid_argument("closed form: need at least two arms");
  if (!(c1 > 0.0 && c_a > 0.0)) throw std::invalid_argument("closed form: costs must be positive");
  const double gap = mu1 - mu_a;
  if (!(gap > 0.0)) throw std::invalid_argument("closed form: requires mu1 > mu_a");
  const double k = static_cast<double>(num_arms);
  const double s = std::sqrt(c1) + std::sqrt((k - 1.0) * c_a);
  return 2.0 * s * s / (gap * gap);
}

LowerBound lower_bound_cost(const BanditInstance& instance, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("lower_bound_cost: delta must lie in (0, 1)");
  const double t_star = compute_proportions(instance).t_star;
  const RewardFamily bern{FamilyKind::bernoulli, 1.0};
  return LowerBound{t_star * kl_div(bern, delta, 1.0 - delta), t_star * std::log(1.0 / delta)};
}

}  // namespace cabandit
