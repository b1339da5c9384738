#include "cabandit/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cabandit/csv.hpp"

namespace cabandit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string delta_tag(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", delta);
  return buf;
}

std::string cell_stem(std::size_t policy_index, const PolicyConfig& p, double delta) {
  return std::to_string(policy_index) + "_" + policy_name(p.kind) + "_delta" + delta_tag(delta);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json summary_to_json(const BatchSummary& s) {
  json j;
  j["instance_id"] = s.instance_id;
  j["policy"] = s.policy;
  j["delta"] = s.delta;
  j["n_runs"] = s.n_runs;
  j["n_censored"] = s.n_censored;
  j["n_errors"] = s.n_errors;
  j["error_rate"] = s.error_rate;
  j["mean_cost"] = s.mean_cost;
  j["median_cost"] = s.median_cost;
  j["cost_q05"] = s.cost_q05;
  j["cost_q95"] = s.cost_q95;
  j["mean_tau"] = s.mean_tau;
  j["t_star"] = s.t_star;
  j["lower_bound_kl"] = s.lower_bound_kl;
  j["cost_ratio"] = s.cost_ratio;
  j["decision_seconds"] = s.decision_seconds;
  std::vector<double> fr(s.mean_pull_fractions.data(),
                         s.mean_pull_fractions.data() + s.mean_pull_fractions.size());
  j["mean_pull_fractions"] = fr;
  return j;
}

}  // namespace

OutputFormat format_from_name(const std::string& name) {
  if (name == "table") return OutputFormat::table;
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format: " + name + " (expected table, csv, or json)");
}

int cmd_oracle(const std::string& config_path, OutputFormat fmt, double tol,
               std::ostream& out) {
  const ExperimentConfig cfg = load_config_file(config_path);
  const BanditInstance instance = cfg.instance();
  const OptimalProportions props = compute_proportions(instance, tol);
  const ArrayXd costs = instance.cost_means();

  switch (fmt) {
    case OutputFormat::table: {
      out << "instance " << instance.id << " (" << family_name(instance.family.kind)
          << ", K=" << instance.num_arms() << ")\n";
      out << "arm   mean        cost        w_star      pull_fraction\n";
      for (int a = 0; a < instance.num_arms(); ++a) {
        char row[128];
        std::snprintf(row, sizeof row, "%-5d %-11.6g %-11.6g %-11.6g %-11.6g\n", a + 1,
                      instance.reward_means[a], costs[a], props.w[a], props.pull_fractions[a]);
        out << row;
      }
      out << "best_arm " << props.best_arm + 1 << "\n";
      out << "y_star   " << short_num(props.y_star) << "\n";
      out << "t_star   " << short_num(props.t_star) << "\n";
      break;
    }
    case OutputFormat::csv: {
      out << "arm,mean,cost,w_star,pull_fraction\n";
      for (int a = 0; a < instance.num_arms(); ++a)
        out << a + 1 << ',' << fmt_double(instance.reward_means[a]) << ','
            << fmt_double(costs[a]) << ',' << fmt_double(props.w[a]) << ','
            << fmt_double(props.pull_fractions[a]) << "\n";
      out << "# t_star," << fmt_double(props.t_star) << ",y_star," << fmt_double(props.y_star)
          << ",best_arm," << props.best_arm + 1 << "\n";
      break;
    }
    case OutputFormat::json: {
      json j;
      j["instance_id"] = instance.id;
      j["best_arm"] = props.best_arm + 1;
      j["y_star"] = props.y_star;
      j["t_star"] = props.t_star;
      std::vector<double> w(props.w.data(), props.w.data() + props.w.size());
      std::vector<double> pf(props.pull_fractions.data(),
                             props.pull_fractions.data() + props.pull_fractions.size());
      j["w_star"] = w;
      j["pull_fractions"] = pf;
      out << j.dump(2) << "\n";
      break;
    }
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir_flag, int workers,
            std::optional<std::uint64_t> seed_override, std::ostream& out) {
  ExperimentConfig cfg = load_config_file(config_path);
  if (seed_override) cfg.base_seed = *seed_override;
  const std::string out_dir = !out_dir_flag.empty() ? out_dir_flag : cfg.output_dir;
  if (out_dir.empty())
    throw std::invalid_argument("no output directory: pass --out or set output_dir");
  if (workers < 1) throw std::invalid_argument("workers must be positive");

  const BanditInstance instance = cfg.instance();
  const RunOptions opts = cfg.run_options();
  fs::create_directories(out_dir);

  json cells = json::array();
  for (std::size_t ip = 0; ip < cfg.policies.size(); ++ip) {
    for (double delta : cfg.deltas) {
      const auto start = std::chrono::steady_clock::now();
      const auto records = run_batch(instance, {cfg.policies[ip]}, {delta}, cfg.n_runs,
                                     cfg.base_seed, workers, opts);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count();
      const std::string stem = cell_stem(ip, cfg.policies[ip], delta);

      std::ostringstream rec_text, snap_text;
      write_records_csv(rec_text, records, instance.num_arms());
      write_snapshots_csv(snap_text, records);
      write_file(fs::path(out_dir) / ("records_" + stem + ".csv"), rec_text.str());
      write_file(fs::path(out_dir) / ("snapshots_" + stem + ".csv"), snap_text.str());

      int n_errors = 0;
      double decision_seconds = 0.0;
      for (const auto& r : records) {
        if (!r.error.empty()) {
          ++n_errors;
          out << "warning: run failed: " << r.error << "\n";
        }
        decision_seconds += r.decision_seconds;
      }
      json cell;
      cell["policy_index"] = ip;
      cell["policy"] = policy_name(cfg.policies[ip].kind);
      cell["delta"] = delta;
      cell["records_file"] = "records_" + stem + ".csv";
      cell["snapshots_file"] = "snapshots_" + stem + ".csv";
      cell["n_runs"] = cfg.n_runs;
      cell["n_errors"] = n_errors;
      cell["decision_seconds"] = decision_seconds;
      cell["wall_seconds"] = wall;
      cells.push_back(cell);
      out << "ran " << policy_name(cfg.policies[ip].kind) << " delta=" << delta_tag(delta)
          << " runs=" << cfg.n_runs << " wall=" << short_num(wall) << "s\n";
    }
  }

  json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["workers"] = workers;
  manifest["config"] = json::parse(config_to_json(cfg));
  manifest["cells"] = cells;
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (fs::path(out_dir) / "manifest.json").string() << "\n";
  return 0;
}

int cmd_summarize(const std::string& results_dir, OutputFormat fmt, std::ostream& out) {
  const fs::path dir(results_dir);
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw std::invalid_argument("no manifest.json in " + results_dir);
  json manifest = json::parse(mf);
  const ExperimentConfig cfg = parse_config(manifest.at("config").dump());
  const BanditInstance instance = cfg.instance();

  std::vector<BatchSummary> summaries;
  std::map<std::string, std::pair<double, double>> policy_time;  // decision, wall
  for (const auto& cell : manifest.at("cells")) {
    std::ifstream rec_in(dir / cell.at("records_file").get<std::string>());
    if (!rec_in)
      throw std::runtime_error("missing " + cell.at("records_file").get<std::string>());
    const auto records = read_records_csv(rec_in);
    if (records.empty()) continue;
    BatchSummary s = summarize(records, instance);
    s.n_errors = cell.at("n_errors").get<int>();
    summaries.push_back(s);
    auto& t = policy_time[s.policy];
    t.first += cell.at("decision_seconds").get<double>();
    t.second += cell.at("wall_seconds").get<double>();

    // Plot-ready fraction trajectories: mean share per (t, arm) over the
    // trajectories still running at t.
    std::ifstream snap_in(dir / cell.at("snapshots_file").get<std::string>());
    if (snap_in) {
      const auto rows = read_snapshots_csv(snap_in);
      std::map<std::pair<std::int64_t, int>, std::pair<int, std::pair<double, double>>> agg;
      for (const auto& r : rows) {
        auto& slot = agg[{r.t, r.arm}];
        ++slot.first;
        slot.second.first += r.pull_fraction;
        slot.second.second += r.cost_fraction;
      }
      std::ostringstream plot;
      plot << "t,arm,mean_pull_fraction,mean_cost_fraction,n_alive\n";
      for (const auto& [key, slot] : agg)
        plot << key.first << ',' << key.second + 1 << ','
             << fmt_double(slot.second.first / slot.first) << ','
             << fmt_double(slot.second.second / slot.first) << ',' << slot.first << "\n";
      const std::string stem = cell.at("records_file").get<std::string>();
      write_file(dir / ("plot_fractions_" + stem.substr(8)), plot.str());
    }
  }

  std::ostringstream box;
  box << "policy,delta,cost_q05,median_cost,cost_q95,mean_cost\n";
  for (const auto& s : summaries)
    box << s.policy << ',' << delta_tag(s.delta) << ',' << fmt_double(s.cost_q05) << ','
        << fmt_double(s.median_cost) << ',' << fmt_double(s.cost_q95) << ','
        << fmt_double(s.mean_cost) << "\n";
  write_file(dir / "plot_cost_box.csv", box.str());

  switch (fmt) {
    case OutputFormat::table: {
      out << "instance " << instance.id << "\n";
      out << "policy   delta      n     cens err  error_rate  mean_cost   median_cost "
             "cost_ratio  t_star\n";
      for (const auto& s : summaries) {
        char row[256];
        std::snprintf(row, sizeof row,
                      "%-8s %-10s %-5d %-4d %-3d %-11.4g %-11.6g %-11.6g %-11.4g %-11.6g\n",
                      s.policy.c_str(), delta_tag(s.delta).c_str(), s.n_runs, s.n_censored,
                      s.n_errors, s.error_rate, s.mean_cost, s.median_cost, s.cost_ratio,
                      s.t_star);
        out << row;
      }
      out << "\nmean pull fractions at stopping\n";
      for (const auto& s : summaries) {
        out << s.policy << " delta=" << delta_tag(s.delta) << ":";
        for (int a = 0; a < s.mean_pull_fractions.size(); ++a)
          out << ' ' << short_num(s.mean_pull_fractions[a]);
        out << "\n";
      }
      out << "\nper-policy compute time (s)\n";
      out << "policy   decision_total  wall_total\n";
      for (const auto& [policy, t] : policy_time) {
        char row[128];
        std::snprintf(row, sizeof row, "%-8s %-15.6g %-11.6g\n", policy.c_str(), t.first,
                      t.second);
        out << row;
      }
      break;
    }
    case OutputFormat::csv: {
      out << "policy,delta,n_runs,n_censored,n_errors,error_rate,mean_cost,median_cost,"
             "cost_q05,cost_q95,mean_tau,cost_ratio,t_star,lower_bound_kl,decision_seconds";
      for (int a = 1; a <= instance.num_arms(); ++a) out << ",pull_fraction_" << a;
      out << "\n";
      for (const auto& s : summaries) {
        out << s.policy << ',' << fmt_double(s.delta) << ',' << s.n_runs << ',' << s.n_censored
            << ',' << s.n_errors << ',' << fmt_double(s.error_rate) << ','
            << fmt_double(s.mean_cost) << ',' << fmt_double(s.median_cost) << ','
            << fmt_double(s.cost_q05) << ',' << fmt_double(s.cost_q95) << ','
            << fmt_double(s.mean_tau) << ',' << fmt_double(s.cost_ratio) << ','
            << fmt_double(s.t_star) << ',' << fmt_double(s.lower_bound_kl) << ','
            << fmt_double(s.decision_seconds);
        for (int a = 0; a < s.mean_pull_fractions.size(); ++a)
          out << ',' << fmt_double(s.mean_pull_fractions[a]);
        out << "\n";
      }
      break;
    }
    case OutputFormat::json: {
      json j = json::array();
      for (const auto& s : summaries) j.push_back(summary_to_json(s));
      out << j.dump(2) << "\n";
      break;
    }
  }
  return 0;
}

int cmd_lower_bound(const std::string& config_path, const std::vector<double>& deltas,
                    OutputFormat fmt, std::ostream& out) {
  const ExperimentConfig cfg = load_config_file(config_path);
  const BanditInstance instance = cfg.instance();
  const std::vector<double>& ds = deltas.empty() ? cfg.deltas : deltas;
  const double t_star = compute_proportions(instance).t_star;

  if (fmt == OutputFormat::json) {
    json j;
    j["instance_id"] = instance.id;
    j["t_star"] = t_star;
    json rows = json::array();
    for (double d : ds) {
      const LowerBound lb = lower_bound_cost(instance, d);
      rows.push_back({{"delta", d}, {"kl_form", lb.kl_form}, {"asymptotic", lb.asymptotic}});
    }
    j["bounds"] = rows;
    out << j.dump(2) << "\n";
    return 0;
  }
  if (fmt == OutputFormat::csv) {
    out << "delta,t_star,kl_form,asymptotic\n";
    for (double d : ds) {
      const LowerBound lb = lower_bound_cost(instance, d);
      out << fmt_double(d) << ',' << fmt_double(t_star) << ',' << fmt_double(lb.kl_form) << ','
          << fmt_double(lb.asymptotic) << "\n";
    }
    return 0;
  }
  out << "instance " << instance.id << "  t_star " << short_num(t_star) << "\n";
  out << "delta      kl_form     asymptotic\n";
  for (double d : ds) {
    const LowerBound lb = lower_bound_cost(instance, d);
    char row[128];
    std::snprintf(row, sizeof row, "%-10s %-11.6g %-11.6g\n", delta_tag(d).c_str(), lb.kl_form,
                  lb.asymptotic);
    out << row;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"best-arm identification with per-arm sampling costs"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, results_dir, format = "table";
  double tol = 1e-10;
  int workers = 0;
  if (const char* env = std::getenv("CABANDIT_WORKERS")) workers = std::atoi(env);
  if (workers < 1) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw ? static_cast<int>(hw) : 1;
  }
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_value = 0;
  std::vector<double> deltas;

  auto* oracle = app.add_subcommand("oracle", "print optimal proportions and T*");
  oracle->add_option("--config", config_path, "experiment config (JSON)")->required();
  oracle->add_option("--format", format, "table, csv, or json");
  oracle->add_option("--tol", tol, "bisection tolerance");

  auto* run = app.add_subcommand("run", "run the experiment grid and write records");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (overrides config output_dir)");
  run->add_option("--workers", workers, "worker threads (env CABANDIT_WORKERS)");
  auto* seed_opt = run->add_option("--seed", seed_value, "override base_seed");

  auto* summ = app.add_subcommand("summarize", "summarize a results directory");
  summ->add_option("--dir", results_dir, "results directory from `run`")->required();
  summ->add_option("--format", format, "table, csv, or json");

  auto* lb = app.add_subcommand("lower-bound", "print the spend lower bound");
  lb->add_option("--config", config_path, "experiment config (JSON)")->required();
  lb->add_option("--delta", deltas, "delta values (default: config deltas)");
  lb->add_option("--format", format, "table, csv, or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*oracle) return cmd_oracle(config_path, format_from_name(format), tol, std::cout);
    if (*run) {
      if (*seed_opt) seed = seed_value;
      return cmd_run(config_path, out_dir, workers, seed, std::cout);
    }
    if (*summ) return cmd_summarize(results_dir, format_from_name(format), std::cout);
    if (*lb) return cmd_lower_bound(config_path, deltas, format_from_name(format), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cabandit::cli
