#pragma once

#include <stdexcept>

#include "cabandit/exp_family.hpp"

namespace cabandit {

// Thrown for any failure inside the proportion solver.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Instance has no usable gap at the top (tie, or gap below 1e-8): the optimal
// weights are unbounded or undefined, so the solver refuses instead of
// returning huge unstable values.
struct DegenerateInstanceError : OracleError {
  using OracleError::OracleError;
};
// Root finder exhausted its iteration budget or lost its bracket.
struct ConvergenceError : OracleError {
  using OracleError::OracleError;
};

// Solution of the cost-weighted allocation problem. w are optimal fractions
// of total spend per arm (positive, summing to one); pull_fractions are the
// matching fractions of pulls, proportional to w_a / c_a. t_star is the
// instance's cost-complexity constant: no delta-correct strategy can spend
// less than t_star * log(1/delta) asymptotically, and spending w at the
// optimum attains it. Arm indices refer to the caller's original order.
struct OptimalProportions {
  ArrayXd w;
  ArrayXd pull_fractions;
  double y_star = 0.0;  // balanced value of the per-arm transport functions
  double t_star = 0.0;
  int best_arm = 0;
};

// Jensen-Shannon style interpolation of the family divergence:
//   I_alpha(mu1, mu2) = alpha * d(mu1, m) + (1 - alpha) * d(mu2, m),
//   m = alpha * mu1 + (1 - alpha) * mu2,  alpha in [0, 1].
double i_alpha(double alpha, double mu1, double mu2, const RewardFamily& fam);

// Transport function g(x) = (1 + x) * I_{1/(1+x)}(mu1, mu_a): strictly
// increasing from 0 toward d(mu1, mu_a) as x goes from 0 to infinity.
// Requires mu1 > mu_a.
double g_fn(double x, double mu1, double mu_a, const RewardFamily& fam);

// Inverse of g_fn by bracketed bisection with geometric upper expansion.
// Requires 0 <= y < d(mu1, mu_a); the result x satisfies
// |g_fn(x) - y| <= tol.
double g_inverse(double y, double mu1, double mu_a, const RewardFamily& fam,
                 double tol = 1e-12);

// Balance function whose unique root pins the optimal allocation: with the
// best arm playing the role of arm 1,
//   F(y) = sum over suboptimal a of
//          [c_a * d(mu1, m_a(x_a(y)))] / [c1 * d(mu_a, m_a(x_a(y)))],
// where x_a(y) = g_inverse(y) and m_a(x) = (mu1 + x * mu_a) / (1 + x).
// Strictly increasing, F(0) = 0, diverges as y approaches the smallest
// divergence d(mu1, mu_a).
double big_f(double y, const BanditInstance& instance);

// Solves F(y*) = 1 and recovers the optimal spend fractions
//   w_a = c_a x_a(y*) / sum_b c_b x_b(y*)   (x of the best arm is 1).
// tol is absolute on the bisection argument. Throws DegenerateInstanceError
// when the top gap is tied or below 1e-8, ConvergenceError when bisection
// cannot finish within 200 iterations.
OptimalProportions compute_proportions(const RewardFamily& fam, const ArrayXd& means,
                                       const ArrayXd& costs, double tol = 1e-10);
OptimalProportions compute_proportions(const BanditInstance& instance, double tol = 1e-10);

// Closed forms for gaussian instances, used as an independent cross-check of
// the numeric solver. Two arms, known sigma:
//   T* = 2 sigma^2 (sqrt(c1) + sqrt(c2))^2 / (mu1 - mu2)^2.
double t_star_closed_two_arm(double mu1, double mu2, double c1, double c2, double sigma);

// K-arm unit-variance symmetric case (mu1 best, all suboptimal means mu_a and
// costs c_a equal). The optimal budget split is w1 = sqrt(c1) / (sqrt(c1) +
// sqrt((K-1) c_a)), shared equally by the rivals, which gives
//   T* = 2 (sqrt(c1) + sqrt((K-1) c_a))^2 / (mu1 - mu_a)^2.
double t_star_closed_symmetric(double mu1, double mu_a, double c1, double c_a, int num_arms);

// Smallest expected spend any delta-correct strategy can achieve on the
// instance: kl_form = T* * d(delta, 1 - delta) (binary relative entropy),
// asymptotic = T* * log(1 / delta).
struct LowerBound {
  double kl_form = 0.0;
  double asymptotic = 0.0;
};
LowerBound lower_bound_cost(const BanditInstance& instance, double delta);

}  // namespace cabandit
