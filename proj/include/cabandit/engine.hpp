#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cabandit/policies.hpp"

namespace cabandit {

// One (t, arm, reward, cost) observation; captured only when asked, for
// replay-style checks.
struct StepLog {
  std::int64_t t = 0;  // pull count after this observation
  int arm = 0;
  double reward = 0.0;
  double cost = 0.0;
};

// Pull and spend shares per arm at a checkpoint time.
struct Snapshot {
  std::int64_t t = 0;
  ArrayXd pull_fractions;
  ArrayXd cost_fractions;
};

struct TrajectoryRecord {
  std::string instance_id;
  std::string policy;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::int64_t tau = 0;      // pulls until stopping (or the cap)
  double total_cost = 0.0;   // cumulative spend J at stopping
  int decision = -1;         // recommended arm, 0-based
  bool correct = false;
  bool censored = false;     // hit tau_max before the stopping rule fired
  ArrayXl pulls;
  ArrayXd arm_costs;         // per-arm spend totals
  std::vector<Snapshot> snapshots;
  double decision_seconds = 0.0;  // wall clock inside select/stop logic only
  std::string error;              // nonempty: trajectory aborted, fields partial
  std::vector<StepLog> log;                          // capture_log only
  std::vector<std::pair<std::int64_t, int>> eliminations;  // CO, capture_log only
};

struct RunOptions {
  std::int64_t tau_max = 1'000'000;
  std::vector<std::int64_t> checkpoints;  // snapshot times; ascending
  bool capture_log = false;
  bool disable_stopping = false;  // run to tau_max regardless of the rule
};

// Checkpoint grid 2^7, 2^8, ... capped at limit.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t limit);

// Plays one trajectory: every arm once, then select / sample / update /
// stop-check until the policy's rule fires or tau_max is reached. Reward and
// cost draws come from separate sub-streams of `seed`, so the reward sequence
// is unchanged by the cost model. Steps where the solver rejects the plug-in
// estimates fall back to pulling the least-pulled arm; unexpected failures
// are reported through the error field.
TrajectoryRecord run_trajectory(const BanditInstance& instance, const PolicyConfig& cfg,
                                double delta, std::uint64_t seed,
                                const RunOptions& opts = {});

// Cross product of policies x deltas x n_runs trajectories. Run i of every
// cell uses the stream derived from (base_seed, i), so runs pair across cells
// and the result does not depend on `workers`. Records arrive in
// deterministic (policy, delta, run) order.
std::vector<TrajectoryRecord> run_batch(const BanditInstance& instance,
                                        const std::vector<PolicyConfig>& policies,
                                        const std::vector<double>& deltas, int n_runs,
                                        std::uint64_t base_seed, int workers,
                                        const RunOptions& opts = {});

struct BatchSummary {
  std::string instance_id;
  std::string policy;
  double delta = 0.0;
  int n_runs = 0;
  int n_censored = 0;
  int n_errors = 0;
  double error_rate = 0.0;   // over completed (non-censored) runs
  double mean_cost = 0.0;    // censored runs excluded from cost/tau stats
  double median_cost = 0.0;
  double cost_q05 = 0.0;
  double cost_q95 = 0.0;
  double mean_tau = 0.0;
  ArrayXd mean_pull_fractions;
  double t_star = 0.0;
  double lower_bound_kl = 0.0;     // T* * d(delta, 1 - delta)
  double cost_ratio = 0.0;         // mean_cost / (T* * log(1/delta))
  double decision_seconds = 0.0;   // summed over runs
};

// Aggregates one homogeneous (same instance, policy, delta) slice of records.
BatchSummary summarize(std::span<const TrajectoryRecord> records,
                       const BanditInstance& instance);

}  // namespace cabandit
