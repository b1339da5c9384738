#include "cabandit/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cabandit {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad_csv(const std::string& what) {
  throw std::runtime_error("csv: " + what);
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_records_csv(std::ostream& out, std::span<const TrajectoryRecord> records,
                       int num_arms) {
  out << "instance_id,policy,delta,seed,tau,cost,decision,correct,censored";
  for (int a = 1; a <= num_arms; ++a) out << ",N_" << a;
  for (int a = 1; a <= num_arms; ++a) out << ",cost_" << a;
  out << "\n";
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    if (r.pulls.size() != num_arms) bad_csv("record arm count does not match header");
    out << r.instance_id << ',' << r.policy << ',' << fmt_double(r.delta) << ',' << r.seed
        << ',' << r.tau << ',' << fmt_double(r.total_cost) << ',' << r.decision + 1 << ','
        << (r.correct ? 1 : 0) << ',' << (r.censored ? 1 : 0);
    for (int a = 0; a < num_arms; ++a) out << ',' << r.pulls[a];
    for (int a = 0; a < num_arms; ++a) out << ',' << fmt_double(r.arm_costs[a]);
    out << "\n";
  }
}

std::vector<TrajectoryRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_csv("missing header");
  const auto header = split_row(line);
  if (header.size() < 11 || header[0] != "instance_id") bad_csv("unrecognized header");
  const int num_arms = static_cast<int>((header.size() - 9) / 2);
  if (header.size() != 9 + 2 * static_cast<std::size_t>(num_arms))
    bad_csv("malformed arm columns");

  std::vector<TrajectoryRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_row(line);
    if (f.size() != header.size()) bad_csv("row width does not match header");
    TrajectoryRecord r;
    r.instance_id = f[0];
    r.policy = f[1];
    r.delta = std::stod(f[2]);
    r.seed = std::stoull(f[3]);
    r.tau = std::stoll(f[4]);
    r.total_cost = std::stod(f[5]);
    r.decision = std::stoi(f[6]) - 1;
    r.correct = f[7] == "1";
    r.censored = f[8] == "1";
    r.pulls = ArrayXl::Zero(num_arms);
    r.arm_costs = ArrayXd::Zero(num_arms);
    for (int a = 0; a < num_arms; ++a) {
      r.pulls[a] = std::stoll(f[9 + a]);
      r.arm_costs[a] = std::stod(f[9 + num_arms + a]);
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_snapshots_csv(std::ostream& out, std::span<const TrajectoryRecord> records) {
  out << "seed,t,arm,pull_fraction,cost_fraction\n";
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    for (const auto& snap : r.snapshots)
      for (int a = 0; a < snap.pull_fractions.size(); ++a)
        out << r.seed << ',' << snap.t << ',' << a + 1 << ','
            << fmt_double(snap.pull_fractions[a]) << ',' << fmt_double(snap.cost_fractions[a])
            << "\n";
  }
}

std::vector<SnapshotRow> read_snapshots_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_csv("missing header");
  if (line != "seed,t,arm,pull_fraction,cost_fraction") bad_csv("unrecognized snapshot header");
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_row(line);
    if (f.size() != 5) bad_csv("snapshot row width");
    rows.push_back(SnapshotRow{std::stoull(f[0]), std::stoll(f[1]), std::stoi(f[2]) - 1,
                               std::stod(f[3]), std::stod(f[4])});
  }
  return rows;
}

}  // namespace cabandit
