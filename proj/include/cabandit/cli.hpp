#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cabandit/config.hpp"

namespace cabandit::cli {

enum class OutputFormat { table, csv, json };
OutputFormat format_from_name(const std::string& name);

// Prints the optimal spend/pull proportions and T* for the config's instance.
int cmd_oracle(const std::string& config_path, OutputFormat fmt, double tol,
               std::ostream& out);

// Runs the config's full policy x delta x n_runs grid and writes records,
// snapshots, and a manifest into out_dir. Nothing is created until the config
// has validated. Rerunning the same config and seed rewrites the records
// byte-identically.
int cmd_run(const std::string& config_path, const std::string& out_dir_flag, int workers,
            std::optional<std::uint64_t> seed_override, std::ostream& out);

// Reads a results directory produced by cmd_run, prints per-cell summary
// tables plus a per-policy compute-time comparison, and writes plot-ready
// CSVs (fraction trajectories, cost box data) back into the directory.
int cmd_summarize(const std::string& results_dir, OutputFormat fmt, std::ostream& out);

// Prints the spend lower bound for the config's instance at each delta.
int cmd_lower_bound(const std::string& config_path, const std::vector<double>& deltas,
                    OutputFormat fmt, std::ostream& out);

// Argument parsing + dispatch for the cabandit binary.
int run_cli(int argc, char** argv);

}  // namespace cabandit::cli
