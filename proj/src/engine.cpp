#include "cabandit/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cabandit/rng.hpp"

namespace cabandit {

namespace {

constexpr std::uint64_t kRewardStream = 0x72657761;
constexpr std::uint64_t kCostStream = 0x636f7374;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Plug-in proportions cache for the tracking policies. The oracle runs on the
// clamped empirical means; TAS feeds it unit costs.
struct PluginOracle {
  OptimalProportions props;
  std::int64_t computed_at = -1;
  bool valid = false;

  explicit PluginOracle(int num_arms) {
    props.w = ArrayXd::Zero(num_arms);
    props.pull_fractions = ArrayXd::Zero(num_arms);
  }

  // False when the solver rejected the plug-in instance (degenerate top gap)
  // or failed to converge on it; the caller falls back to forced exploration
  // and the next refresh retries. Estimates are transient, so no oracle
  // failure on them should kill the trajectory.
  bool refresh(const EmpiricalState& state, const RewardFamily& fam, bool unit_costs,
               double tol) {
    ArrayXd means(state.num_arms());
    for (int a = 0; a < state.num_arms(); ++a)
      means[a] = clamp_mean(fam, state.mean_reward[a]);
    try {
      if (unit_costs)
        props = compute_proportions(fam, means, ArrayXd::Ones(state.num_arms()), tol);
      else
        props = compute_proportions(fam, means, state.mean_cost, tol);
    } catch (const OracleError&) {
      valid = false;
      return false;
    }
    computed_at = state.t;
    valid = true;
    return true;
  }
};

int least_pulled_arm(const EmpiricalState& state) {
  int arm = 0;
  for (int a = 1; a < state.num_arms(); ++a)
    if (state.counts[a] < state.counts[arm]) arm = a;
  return arm;
}

bool under_explored(const EmpiricalState& state, const PolicyConfig& cfg) {
  const double floor = cfg.exploration_multiplier * std::sqrt(static_cast<double>(state.t));
  for (int a = 0; a < state.num_arms(); ++a)
    if (static_cast<double>(state.counts[a]) < floor) return true;
  return false;
}

}  // namespace

std::vector<std::int64_t> geometric_checkpoints(std::int64_t limit) {
  std::vector<std::int64_t> out;
  for (std::int64_t t = 128; t <= limit; t *= 2) out.push_back(t);
  return out;
}

TrajectoryRecord run_trajectory(const BanditInstance& instance, const PolicyConfig& cfg,
                                double delta, std::uint64_t seed, const RunOptions& opts) {
  const int k = instance.num_arms();
  cfg.validate(k);
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("run_trajectory: delta must lie in (0, 1)");
  if (opts.tau_max < k) throw std::invalid_argument("run_trajectory: tau_max below num_arms");

  TrajectoryRecord rec;
  rec.instance_id = instance.id;
  rec.policy = policy_name(cfg.kind);
  rec.delta = delta;
  rec.seed = seed;
  rec.arm_costs = ArrayXd::Zero(k);

  RngStream rewards(derive_seed(seed, kRewardStream));
  RngStream costs(derive_seed(seed, kCostStream));
  EmpiricalState state(k);
  CoState co = CoState::full(k);
  PluginOracle oracle(k);

  std::size_t next_checkpoint = 0;
  const auto pull = [&](int arm) {
    const double r = sample_reward(instance.family, instance.reward_means[arm], rewards);
    const double c = sample_cost(instance.cost_models[arm], costs);
    state.record_pull(arm, r, c);
    rec.arm_costs[arm] += c;
    if (opts.capture_log) rec.log.push_back(StepLog{state.t, arm, r, c});
    if (next_checkpoint < opts.checkpoints.size() &&
        state.t == opts.checkpoints[next_checkpoint]) {
      ++next_checkpoint;
      Snapshot snap;
      snap.t = state.t;
      snap.pull_fractions =
          state.counts.cast<double>() / static_cast<double>(state.t);
      snap.cost_fractions = (state.mean_cost * state.counts.cast<double>()) / state.total_cost;
      rec.snapshots.push_back(std::move(snap));
    }
  };

  // Policy decisions are timed; sampling and bookkeeping are not.
  double decision_seconds = 0.0;

  const auto should_stop = [&]() {
    const auto start = Clock::now();
    bool stop;
    if (cfg.kind == PolicyKind::co) {
      const std::size_t before = co.active.size();
      co_eliminate(state, co, instance.family, cfg, delta);
      if (opts.capture_log && co.active.size() != before) {
        // Record which arms just left the active set.
        for (int a = 0; a < k; ++a)
          if (!co.contains(a) &&
              std::none_of(rec.eliminations.begin(), rec.eliminations.end(),
                           [a](const auto& e) { return e.second == a; }))
            rec.eliminations.emplace_back(state.t, a);
      }
      stop = co.size() <= 1;
    } else {
      stop = ctas_should_stop(state, instance.family, cfg, delta);
    }
    decision_seconds += seconds_since(start);
    return stop;
  };

  const auto select = [&]() {
    const auto start = Clock::now();
    int arm;
    switch (cfg.kind) {
      case PolicyKind::uniform:
        arm = uniform_select_arm(state);
        break;
      case PolicyKind::co:
        arm = co_select_arm(state, co);
        break;
      case PolicyKind::ctas:
      case PolicyKind::tas: {
        bool degenerate = false;
        if (!under_explored(state, cfg)) {
          const bool stale = !oracle.valid || state.t - oracle.computed_at >= cfg.recompute_period;
          if (stale)
            degenerate = !oracle.refresh(state, instance.family,
                                         cfg.kind == PolicyKind::tas, cfg.oracle_tol);
        }
        if (degenerate)
          arm = least_pulled_arm(state);  // no usable plug-in gap yet, keep exploring
        else
          arm = cfg.kind == PolicyKind::ctas ? ctas_select_arm(state, cfg, oracle.props)
                                             : tas_select_arm(state, cfg, oracle.props);
        break;
      }
      default:
        throw std::invalid_argument("run_trajectory: unknown policy kind");
    }
    decision_seconds += seconds_since(start);
    return arm;
  };

  try {
    for (int a = 0; a < k; ++a) pull(a);
    bool stopped = false;
    while (true) {
      if (!opts.disable_stopping && should_stop()) {
        stopped = true;
        break;
      }
      if (state.t >= opts.tau_max) break;
      pull(select());
    }
    rec.tau = state.t;
    rec.total_cost = state.total_cost;
    rec.censored = !stopped;
    rec.pulls = state.counts;
    if (cfg.kind == PolicyKind::co) {
      int best = co.active.front();
      for (int a : co.active)
        if (state.mean_reward[a] > state.mean_reward[best]) best = a;
      rec.decision = best;
    } else {
      rec.decision = decide(state);
    }
    rec.correct = rec.decision == instance.best_arm();
  } catch (const OracleError& e) {
    throw ConvergenceError(std::string(e.what()) + " [policy=" + rec.policy +
                           " delta=" + std::to_string(delta) + " seed=" + std::to_string(seed) +
                           " t=" + std::to_string(state.t) + "]");
  }
  rec.decision_seconds = decision_seconds;
  return rec;
}

std::vector<TrajectoryRecord> run_batch(const BanditInstance& instance,
                                        const std::vector<PolicyConfig>& policies,
                                        const std::vector<double>& deltas, int n_runs,
                                        std::uint64_t base_seed, int workers,
                                        const RunOptions& opts) {
  if (policies.empty()) throw std::invalid_argument("run_batch: no policies");
  if (deltas.empty()) throw std::invalid_argument("run_batch: no deltas");
  if (n_runs < 1) throw std::invalid_argument("run_batch: n_runs must be positive");
  if (workers < 1) throw std::invalid_argument("run_batch: workers must be positive");
  for (const auto& cfg : policies) cfg.validate(instance.num_arms());
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("run_batch: delta in (0, 1)");

  const std::size_t cells = policies.size() * deltas.size();
  const std::size_t total = cells * static_cast<std::size_t>(n_runs);
  std::vector<TrajectoryRecord> records(total);

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t cell = i / n_runs;
      const int run = static_cast<int>(i % n_runs);
      const PolicyConfig& cfg = policies[cell / deltas.size()];
      const double delta = deltas[cell % deltas.size()];
      const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(run));
      try {
        records[i] = run_trajectory(instance, cfg, delta, seed, opts);
      } catch (const std::exception& e) {
        TrajectoryRecord rec;
        rec.instance_id = instance.id;
        rec.policy = policy_name(cfg.kind);
        rec.delta = delta;
        rec.seed = seed;
        rec.error = e.what();
        records[i] = std::move(rec);
      }
    }
  };

  const int n_threads = static_cast<int>(std::min<std::size_t>(workers, total));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

BatchSummary summarize(std::span<const TrajectoryRecord> records,
                       const BanditInstance& instance) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  BatchSummary s;
  s.instance_id = records.front().instance_id;
  s.policy = records.front().policy;
  s.delta = records.front().delta;
  s.n_runs = static_cast<int>(records.size());
  s.mean_pull_fractions = ArrayXd::Zero(instance.num_arms());

  std::vector<double> costs;
  costs.reserve(records.size());
  std::vector<double> taus;
  int wrong = 0;
  for (const auto& r : records) {
    if (r.instance_id != s.instance_id || r.policy != s.policy || r.delta != s.delta)
      throw std::invalid_argument("summarize: records mix instances, policies, or deltas");
    s.decision_seconds += r.decision_seconds;
    if (!r.error.empty()) {
      ++s.n_errors;
      continue;
    }
    if (r.censored) {
      ++s.n_censored;
      continue;
    }
    if (!r.correct) ++wrong;
    costs.push_back(r.total_cost);
    taus.push_back(static_cast<double>(r.tau));
    s.mean_pull_fractions += r.pulls.cast<double>() / static_cast<double>(r.tau);
  }

  const auto quantile = [](std::vector<double>& v, double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };

  if (!costs.empty()) {
    const double n = static_cast<double>(costs.size());
    s.error_rate = static_cast<double>(wrong) / n;
    for (double c : costs) s.mean_cost += c;
    s.mean_cost /= n;
    for (double t : taus) s.mean_tau += t;
    s.mean_tau /= n;
    s.mean_pull_fractions /= n;
    std::sort(costs.begin(), costs.end());
    s.median_cost = quantile(costs, 0.5);
    s.cost_q05 = quantile(costs, 0.05);
    s.cost_q95 = quantile(costs, 0.95);
  }

  s.t_star = compute_proportions(instance).t_star;
  s.lower_bound_kl =
      s.t_star * kl_div(RewardFamily{FamilyKind::bernoulli, 1.0}, s.delta, 1.0 - s.delta);
  s.cost_ratio = s.mean_cost / (s.t_star * std::log(1.0 / s.delta));
  return s;
}

}  // namespace cabandit
