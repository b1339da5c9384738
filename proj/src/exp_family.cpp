#include "cabandit/exp_family.hpp"

#include <cmath>
#include <stdexcept>

namespace cabandit {

namespace {

constexpr double kMeanClamp = 1e-6;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

const char* family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::bernoulli: return "bernoulli";
    case FamilyKind::poisson: return "poisson";
  }
  fail("unknown family kind");
}

bool valid_mean(const RewardFamily& fam, double mu) {
  if (!std::isfinite(mu)) return false;
  switch (fam.kind) {
    case FamilyKind::gaussian: return true;
    case FamilyKind::bernoulli: return mu > 0.0 && mu < 1.0;
    case FamilyKind::poisson: return mu > 0.0;
  }
  return false;
}

double kl_div(const RewardFamily& fam, double mu, double lambda) {
  if (!valid_mean(fam, mu) || !valid_mean(fam, lambda))
    fail("kl_div: mean outside family domain for " + std::string(family_name(fam.kind)));
  switch (fam.kind) {
    case FamilyKind::gaussian: {
      if (fam.sigma <= 0.0) fail("kl_div: gaussian sigma must be positive");
      const double d = mu - lambda;
      return d * d / (2.0 * fam.sigma * fam.sigma);
    }
    // log1p of the increment keeps the divergence accurate when the two means
    // are close, where log-of-ratio terms of size O(h) would cancel to O(h^2).
    case FamilyKind::bernoulli: {
      const double h = mu - lambda;
      return mu * std::log1p(h / lambda) + (1.0 - mu) * std::log1p(-h / (1.0 - lambda));
    }
    case FamilyKind::poisson: {
      const double h = mu - lambda;
      return mu * std::log1p(h / lambda) - h;
    }
  }
  fail("unknown family kind");
}

double clamp_mean(const RewardFamily& fam, double mu) {
  switch (fam.kind) {
    case FamilyKind::gaussian: return mu;
    case FamilyKind::bernoulli: return std::min(std::max(mu, kMeanClamp), 1.0 - kMeanClamp);
    case FamilyKind::poisson: return std::max(mu, kMeanClamp);
  }
  fail("unknown family kind");
}

double sample_reward(const RewardFamily& fam, double mu, RngStream& rng) {
  if (!valid_mean(fam, mu)) fail("sample_reward: mean outside family domain");
  switch (fam.kind) {
    case FamilyKind::gaussian:
      if (fam.sigma <= 0.0) fail("sample_reward: gaussian sigma must be positive");
      return rng.normal(mu, fam.sigma);
    case FamilyKind::bernoulli: return rng.bernoulli(mu);
    case FamilyKind::poisson: return rng.poisson(mu);
  }
  fail("unknown family kind");
}

double CostModel::support_lo() const {
  return kind == CostKind::deterministic ? mean : mean - half_width;
}

double CostModel::support_hi() const {
  return kind == CostKind::deterministic ? mean : mean + half_width;
}

double sample_cost(const CostModel& model, RngStream& rng) {
  switch (model.kind) {
    case CostKind::deterministic: return model.mean;
    case CostKind::uniform_interval:
      return rng.uniform(model.mean - model.half_width, model.mean + model.half_width);
  }
  fail("unknown cost kind");
}

BanditInstance::BanditInstance(RewardFamily fam, ArrayXd means, std::vector<CostModel> costs,
                               double cost_floor, std::string label)
    : family(fam),
      reward_means(std::move(means)),
      cost_models(std::move(costs)),
      ell(cost_floor),
      id(std::move(label)) {
  const int k = num_arms();
  if (k < 2) fail("instance: need at least two arms");
  if (static_cast<int>(cost_models.size()) != k) fail("instance: one cost model per arm");
  if (family.kind == FamilyKind::gaussian && family.sigma <= 0.0)
    fail("instance: gaussian sigma must be positive");
  if (!(ell > 0.0)) fail("instance: cost floor ell must be positive");
  for (int a = 0; a < k; ++a) {
    if (!valid_mean(family, reward_means[a]))
      fail("instance: arm " + std::to_string(a + 1) + " mean outside " +
           family_name(family.kind) + " domain");
    const CostModel& m = cost_models[a];
    if (m.kind == CostKind::uniform_interval && m.half_width < 0.0)
      fail("instance: cost half_width must be nonnegative");
    if (m.support_lo() < ell || m.support_hi() > 1.0)
      fail("instance: arm " + std::to_string(a + 1) + " cost support outside [ell, 1]");
  }
  Eigen::Index best;
  const double top = reward_means.maxCoeff(&best);
  for (int a = 0; a < k; ++a)
    if (a != best && reward_means[a] == top)
      fail("instance: tied maximum mean, best arm must be unique");
  if (id.empty())
    id = std::string(family_name(family.kind)) + "-k" + std::to_string(k);
}

int BanditInstance::best_arm() const {
  Eigen::Index best;
  reward_means.maxCoeff(&best);
  return static_cast<int>(best);
}

ArrayXd BanditInstance::cost_means() const {
  ArrayXd c(num_arms());
  for (int a = 0; a < num_arms(); ++a) c[a] = cost_models[a].mean;
  return c;
}

}  // namespace cabandit
