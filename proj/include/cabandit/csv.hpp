#pragma once

#include <iosfwd>
#include <string>

#include "cabandit/engine.hpp"

namespace cabandit {

// Shortest decimal string that round-trips a double (17 significant digits).
std::string fmt_double(double v);

// Records table: one row per completed trajectory, schema
//   instance_id,policy,delta,seed,tau,cost,decision,correct,censored,
//   N_1..N_K,cost_1..cost_K
// with 1-based arm columns and 0/1 flags. Rows with an error marker are
// skipped (they carry no valid statistics).
void write_records_csv(std::ostream& out, std::span<const TrajectoryRecord> records,
                       int num_arms);
std::vector<TrajectoryRecord> read_records_csv(std::istream& in);

// Snapshot table: long format, schema seed,t,arm,pull_fraction,cost_fraction.
void write_snapshots_csv(std::ostream& out, std::span<const TrajectoryRecord> records);

struct SnapshotRow {
  std::uint64_t seed = 0;
  std::int64_t t = 0;
  int arm = 0;  // 0-based in memory, 1-based on disk
  double pull_fraction = 0.0;
  double cost_fraction = 0.0;
};
std::vector<SnapshotRow> read_snapshots_csv(std::istream& in);

}  // namespace cabandit
