#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "cabandit/rng.hpp"

namespace cabandit {

using ArrayXd = Eigen::ArrayXd;
using ArrayXl = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>;

// One-parameter exponential families in their mean parametrization. Gaussian
// rewards have a known, shared standard deviation; Bernoulli means live in
// (0,1); Poisson means are positive.
enum class FamilyKind { gaussian, bernoulli, poisson };

struct RewardFamily {
  FamilyKind kind = FamilyKind::gaussian;
  double sigma = 1.0;  // used by gaussian only, must be > 0
};

const char* family_name(FamilyKind kind);

// True iff mu is a valid mean parameter for the family.
bool valid_mean(const RewardFamily& fam, double mu);

// KL divergence d(mu, lambda) between family members with means mu, lambda.
// Nonnegative, zero iff mu == lambda, strictly convex in lambda.
double kl_div(const RewardFamily& fam, double mu, double lambda);

// Pushes an empirical mean into the family's open domain so kl_div stays
// finite: bernoulli into [1e-6, 1-1e-6], poisson into [1e-6, inf). Gaussian
// means pass through.
double clamp_mean(const RewardFamily& fam, double mu);

double sample_reward(const RewardFamily& fam, double mu, RngStream& rng);

// Per-arm sampling cost. Support must sit inside [ell, 1] with ell > 0 so
// empirical cost means are bounded away from zero.
enum class CostKind { deterministic, uniform_interval };

struct CostModel {
  CostKind kind = CostKind::deterministic;
  double mean = 1.0;
  double half_width = 0.0;  // uniform_interval draws from [mean-hw, mean+hw]

  double support_lo() const;
  double support_hi() const;
};

double sample_cost(const CostModel& model, RngStream& rng);

// A fully specified problem: K >= 2 arms, one reward family shared across
// arms, per-arm cost models, cost floor ell. The constructor validates means
// against the family domain, cost supports against [ell, 1], and rejects a
// tied maximum mean (a unique best arm must exist).
struct BanditInstance {
  RewardFamily family;
  ArrayXd reward_means;
  std::vector<CostModel> cost_models;
  double ell = 0.0;
  std::string id;

  BanditInstance(RewardFamily fam, ArrayXd means, std::vector<CostModel> costs,
                 double cost_floor, std::string label = "");

  int num_arms() const { return static_cast<int>(reward_means.size()); }
  int best_arm() const;        // index of the unique argmax mean
  ArrayXd cost_means() const;  // per-arm expected cost
};

}  // namespace cabandit
