#pragma once

#include <string>
#include <vector>

#include "cabandit/engine.hpp"

namespace cabandit {

inline constexpr const char* kToolName = "cabandit";
inline constexpr const char* kToolVersion = "0.1.0";

// Parsed experiment description. The JSON schema is documented in the README;
// unknown keys are rejected so typos fail loudly instead of silently running
// a different experiment.
struct ExperimentConfig {
  std::string name;
  RewardFamily family;
  std::vector<double> means;
  std::vector<CostModel> costs;
  double ell = 0.0;  // 0: defaults to the smallest cost support bound
  std::vector<PolicyConfig> policies;
  std::vector<double> deltas;
  int n_runs = 0;
  std::uint64_t base_seed = 0;
  std::int64_t tau_max = 1'000'000;
  bool geometric_snapshots = true;
  std::vector<std::int64_t> checkpoints;  // explicit snapshot times, if given
  std::string output_dir;

  BanditInstance instance() const;
  RunOptions run_options() const;
};

// Parses and fully validates a config; throws std::invalid_argument with the
// offending key path on any problem.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Canonical JSON echo of a parsed config (defaults filled in); reruns from
// this echo reproduce the experiment exactly.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace cabandit
