#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "cabandit/cli.hpp"
#include "cabandit/csv.hpp"
#include "test_support.hpp"

using namespace cabandit;
namespace fs = std::filesystem;

namespace {

fs::path test_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / "cabandit_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = test_root() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Two easily separated gaussian arms; cheap enough for repeated CLI runs.
const char* kRunConfig = R"({
  "name": "demo",
  "instance": {
    "family": {"kind": "gaussian", "sigma": 1.0},
    "means": [2.0, 0.0],
    "costs": [1.0, {"kind": "uniform-interval", "mean": 0.5, "half_width": 0.1}],
    "ell": 0.4
  },
  "policies": [{"kind": "ctas"}, {"kind": "uniform"}],
  "deltas": [0.1],
  "n_runs": 5,
  "base_seed": 7,
  "tau_max": 5000,
  "snapshots": "none"
})";

// Instance with hand-solved proportions: w = (2/3, 1/3), T* = 4.5.
const char* kOracleConfig = R"({
  "name": "two-arm",
  "instance": {
    "family": {"kind": "gaussian"},
    "means": [1.0, 0.0],
    "costs": [1.0, 0.25]
  },
  "policies": [{"kind": "ctas"}],
  "deltas": [0.1],
  "n_runs": 1,
  "base_seed": 1
})";

TrajectoryRecord sample_record(std::uint64_t seed, double cost) {
  TrajectoryRecord r;
  r.instance_id = "demo";
  r.policy = "ctas";
  r.delta = 0.1;
  r.seed = seed;
  r.tau = 17;
  r.total_cost = cost;
  r.decision = 1;
  r.correct = false;
  r.censored = false;
  r.pulls = ArrayXl(2);
  r.pulls << 8, 9;
  r.arm_costs = ArrayXd(2);
  r.arm_costs << 1.0 / 3.0, 2.0 / 7.0;
  return r;
}

}  // namespace

TEST_CASE("fmt_double survives a text round trip") {
  for (double v : {1.0 / 3.0, 0.1, 1e-17, 12345.6789, 4.5, 2.0 / 7.0})
    CHECK(std::stod(fmt_double(v)) == v);
}

TEST_CASE("records csv: frozen header, 1-based decision, exact round trip") {
  std::vector<TrajectoryRecord> records = {sample_record(11, 12.345678901234567),
                                           sample_record(12, 0.25)};
  TrajectoryRecord failed;
  failed.instance_id = "demo";
  failed.policy = "ctas";
  failed.delta = 0.1;
  failed.error = "synthetic failure";
  records.push_back(failed);

  std::ostringstream out;
  write_records_csv(out, records, 2);
  std::istringstream text(out.str());
  std::string header;
  std::getline(text, header);
  CHECK(header ==
        "instance_id,policy,delta,seed,tau,cost,decision,correct,censored,N_1,N_2,cost_1,cost_2");
  std::string row;
  std::getline(text, row);
  CHECK(row.find(",2,0,0,") != std::string::npos);  // decision arm 2 on disk, flags 0

  std::istringstream in(out.str());
  const auto back = read_records_csv(in);
  REQUIRE(back.size() == 2);  // the error record is not serialized
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].instance_id == records[i].instance_id);
    CHECK(back[i].policy == records[i].policy);
    CHECK(back[i].delta == records[i].delta);
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].tau == records[i].tau);
    CHECK(back[i].total_cost == records[i].total_cost);
    CHECK(back[i].decision == records[i].decision);
    CHECK(back[i].correct == records[i].correct);
    CHECK(back[i].censored == records[i].censored);
    CHECK((back[i].pulls == records[i].pulls).all());
    CHECK((back[i].arm_costs == records[i].arm_costs).all());
  }

  std::istringstream junk("not,a,header\n");
  CHECK_THROWS_AS(read_records_csv(junk), std::runtime_error);
}

TEST_CASE("snapshots csv round trip") {
  TrajectoryRecord r = sample_record(5, 1.0);
  Snapshot snap;
  snap.t = 128;
  snap.pull_fractions = ArrayXd(2);
  snap.pull_fractions << 0.25, 0.75;
  snap.cost_fractions = ArrayXd(2);
  snap.cost_fractions << 1.0 / 3.0, 2.0 / 3.0;
  r.snapshots.push_back(snap);
  std::ostringstream out;
  write_snapshots_csv(out, std::vector<TrajectoryRecord>{r});
  std::istringstream in(out.str());
  const auto rows = read_snapshots_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].seed == 5);
  CHECK(rows[0].t == 128);
  CHECK(rows[0].arm == 0);
  CHECK(rows[0].pull_fraction == 0.25);
  CHECK(rows[1].arm == 1);
  CHECK(rows[1].cost_fraction == 2.0 / 3.0);
}

TEST_CASE("format names") {
  CHECK(cli::format_from_name("table") == cli::OutputFormat::table);
  CHECK(cli::format_from_name("csv") == cli::OutputFormat::csv);
  CHECK(cli::format_from_name("json") == cli::OutputFormat::json);
  CHECK_THROWS_AS(cli::format_from_name("xml"), std::invalid_argument);
}

TEST_CASE("parse_config reads every field") {
  const ExperimentConfig cfg = parse_config(kRunConfig);
  CHECK(cfg.name == "demo");
  CHECK(cfg.family.kind == FamilyKind::gaussian);
  CHECK(cfg.means == std::vector<double>{2.0, 0.0});
  REQUIRE(cfg.costs.size() == 2);
  CHECK(cfg.costs[0].kind == CostKind::deterministic);
  CHECK(cfg.costs[0].mean == 1.0);
  CHECK(cfg.costs[1].kind == CostKind::uniform_interval);
  CHECK(cfg.costs[1].half_width == 0.1);
  CHECK(cfg.ell == 0.4);
  REQUIRE(cfg.policies.size() == 2);
  CHECK(cfg.policies[0].kind == PolicyKind::ctas);
  CHECK(cfg.policies[1].kind == PolicyKind::uniform);
  CHECK(cfg.deltas == std::vector<double>{0.1});
  CHECK(cfg.n_runs == 5);
  CHECK(cfg.base_seed == 7);
  CHECK(cfg.tau_max == 5000);
  CHECK_FALSE(cfg.geometric_snapshots);
  CHECK(cfg.checkpoints.empty());
  const BanditInstance inst = cfg.instance();
  CHECK(inst.id == "demo");
  CHECK(inst.ell == 0.4);
}

TEST_CASE("ell defaults to the smallest cost support bound") {
  const ExperimentConfig cfg = parse_config(kOracleConfig);
  CHECK(cfg.ell == 0.0);
  CHECK(cfg.instance().ell == 0.25);
  CHECK(cfg.geometric_snapshots);  // default when the key is absent
}

TEST_CASE("config_to_json echo is canonical and reparses to itself") {
  const ExperimentConfig cfg = parse_config(kRunConfig);
  const std::string echo = config_to_json(cfg);
  const ExperimentConfig again = parse_config(echo);
  CHECK(config_to_json(again) == echo);
  CHECK(again.base_seed == cfg.base_seed);
  CHECK(again.costs[1].half_width == cfg.costs[1].half_width);
  // defaults are spelled out: the echo pins alpha and the boundary scale
  CHECK(echo.find("\"alpha\": 1.0") != std::string::npos);
  CHECK(echo.find("\"B\": \"auto\"") != std::string::npos);
}

TEST_CASE("parse_config rejects malformed input with the offending path") {
  const auto reject = [](const std::string& text, const char* needle) {
    try {
      parse_config(text);
      FAIL_CHECK("expected rejection containing '" << needle << "'");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  reject("{", "not valid JSON");
  reject(R"({"typo": 1})", "unknown key 'typo'");

  nlohmann::json base = nlohmann::json::parse(kRunConfig);
  auto with = [&](const std::function<void(nlohmann::json&)>& mutate) {
    nlohmann::json j = base;
    mutate(j);
    return j.dump();
  };
  reject(with([](auto& j) { j["instance"]["family"]["kind"] = "cauchy"; }),
         "family.kind");
  reject(with([](auto& j) { j["instance"]["family"] = {{"kind", "bernoulli"}, {"sigma", 2.0}}; }),
         "only gaussian takes a sigma");
  reject(with([](auto& j) { j["instance"]["means"] = {1.0}; }), "at least two");
  reject(with([](auto& j) { j["instance"]["costs"] = {1.0}; }), "one entry per arm");
  reject(with([](auto& j) { j["instance"]["costs"][0] = {{"kind", "deterministic"},
                                                         {"mean", 1.0},
                                                         {"half_width", 0.2}}; }),
         "no width");
  reject(with([](auto& j) { j["instance"]["ell"] = 0.0; }), "ell");
  reject(with([](auto& j) { j["deltas"] = {1.0}; }), "deltas");
  reject(with([](auto& j) { j["deltas"] = nlohmann::json::array(); }), "deltas");
  reject(with([](auto& j) { j["n_runs"] = 0; }), "n_runs");
  reject(with([](auto& j) { j.erase("base_seed"); }), "base_seed");
  reject(with([](auto& j) { j["base_seed"] = -5; }), "base_seed");
  reject(with([](auto& j) { j["tau_max"] = 1; }), "tau_max");
  reject(with([](auto& j) { j["snapshots"] = "sometimes"; }), "snapshots");
  reject(with([](auto& j) { j["snapshots"] = {64, 32}; }), "snapshots");
  reject(with([](auto& j) { j["policies"][0]["kind"] = "greedy"; }), "policies[0]");
  reject(with([](auto& j) { j["policies"][0]["B"] = true; }), "policies[0].B");
  reject(with([](auto& j) { j["policies"][0]["alpha"] = 2.0; }), "alpha");  // no default B
  reject(with([](auto& j) { j["name"] = "a,b"; }), "name");
  // instance-level validation also runs before any output exists
  reject(with([](auto& j) { j["instance"]["means"] = {1.0, 1.0}; }), "");
}

TEST_CASE("cmd_oracle prints the solved proportions") {
  const fs::path cfg = write_text("oracle.json", kOracleConfig);
  std::ostringstream out;
  CHECK(cli::cmd_oracle(cfg.string(), cli::OutputFormat::json, 1e-10, out) == 0);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["instance_id"] == "two-arm");
  CHECK(j["best_arm"] == 1);  // 1-based in every surface format
  CHECK(j["t_star"].get<double>() == doctest::Approx(4.5).epsilon(1e-8));
  CHECK(j["w_star"][0].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(j["w_star"][1].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(j["pull_fractions"][1].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-8));

  std::ostringstream table;
  CHECK(cli::cmd_oracle(cfg.string(), cli::OutputFormat::table, 1e-10, table) == 0);
  CHECK(table.str().find("t_star") != std::string::npos);
  std::ostringstream csv;
  CHECK(cli::cmd_oracle(cfg.string(), cli::OutputFormat::csv, 1e-10, csv) == 0);
  CHECK(csv.str().rfind("arm,mean,cost,w_star,pull_fraction\n", 0) == 0);
}

TEST_CASE("cmd_run writes records, snapshots, and a manifest") {
  const fs::path cfg = write_text("run.json", kRunConfig);
  const fs::path dir = test_root() / "out_a";
  std::ostringstream out;
  CHECK(cli::cmd_run(cfg.string(), dir.string(), 1, std::nullopt, out) == 0);
  CHECK(out.str().find("ran ctas delta=0.1 runs=5") != std::string::npos);

  CHECK(fs::exists(dir / "records_0_ctas_delta0.1.csv"));
  CHECK(fs::exists(dir / "snapshots_0_ctas_delta0.1.csv"));
  CHECK(fs::exists(dir / "records_1_uniform_delta0.1.csv"));
  CHECK(fs::exists(dir / "manifest.json"));

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["tool"] == "cabandit");
  CHECK(manifest["version"] == kToolVersion);
  CHECK(manifest["workers"] == 1);
  CHECK(manifest["config"]["base_seed"] == 7);
  REQUIRE(manifest["cells"].size() == 2);
  CHECK(manifest["cells"][0]["policy"] == "ctas");
  CHECK(manifest["cells"][0]["n_runs"] == 5);
  CHECK(manifest["cells"][0]["n_errors"] == 0);
  CHECK(manifest["cells"][1]["records_file"] == "records_1_uniform_delta0.1.csv");

  std::ifstream rec_in(dir / "records_0_ctas_delta0.1.csv");
  const auto records = read_records_csv(rec_in);
  REQUIRE(records.size() == 5);
  for (const auto& r : records) {
    CHECK(r.policy == "ctas");
    CHECK(r.instance_id == "demo");
    CHECK_FALSE(r.censored);
    CHECK(r.tau == r.pulls.sum());
  }
}

TEST_CASE("cmd_run reruns byte-identically; --seed changes the draw") {
  const fs::path cfg = write_text("rerun.json", kRunConfig);
  const fs::path a = test_root() / "out_b1";
  const fs::path b = test_root() / "out_b2";
  const fs::path c = test_root() / "out_b3";
  std::ostringstream sink;
  REQUIRE(cli::cmd_run(cfg.string(), a.string(), 1, std::nullopt, sink) == 0);
  REQUIRE(cli::cmd_run(cfg.string(), b.string(), 2, std::nullopt, sink) == 0);
  for (const char* name : {"records_0_ctas_delta0.1.csv", "records_1_uniform_delta0.1.csv",
                           "snapshots_0_ctas_delta0.1.csv"})
    CHECK(slurp(a / name) == slurp(b / name));

  REQUIRE(cli::cmd_run(cfg.string(), c.string(), 1, 123, sink) == 0);
  CHECK(slurp(a / "records_0_ctas_delta0.1.csv") != slurp(c / "records_0_ctas_delta0.1.csv"));
  const auto manifest = nlohmann::json::parse(slurp(c / "manifest.json"));
  CHECK(manifest["config"]["base_seed"] == 123);
}

TEST_CASE("cmd_run refuses to start without an output directory") {
  const fs::path cfg = write_text("noout.json", kRunConfig);
  std::ostringstream out;
  CHECK_THROWS_AS(cli::cmd_run(cfg.string(), "", 1, std::nullopt, out),
                  std::invalid_argument);
}

TEST_CASE("invalid configs leave no output behind") {
  nlohmann::json j = nlohmann::json::parse(kRunConfig);
  j["instance"]["means"] = {1.0, 1.0};  // tied best arm
  const fs::path cfg = write_text("bad.json", j.dump());
  const fs::path dir = test_root() / "out_never";
  std::ostringstream out;
  CHECK_THROWS(cli::cmd_run(cfg.string(), dir.string(), 1, std::nullopt, out));
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("cmd_summarize reports cells and writes plot files") {
  const fs::path cfg = write_text("summ.json", kRunConfig);
  const fs::path dir = test_root() / "out_s";
  std::ostringstream sink;
  REQUIRE(cli::cmd_run(cfg.string(), dir.string(), 1, std::nullopt, sink) == 0);

  std::ostringstream csv;
  CHECK(cli::cmd_summarize(dir.string(), cli::OutputFormat::csv, csv) == 0);
  CHECK(csv.str().rfind("policy,delta,n_runs,n_censored,n_errors,error_rate,mean_cost,"
                        "median_cost,cost_q05,cost_q95,mean_tau,cost_ratio,t_star,"
                        "lower_bound_kl,decision_seconds,pull_fraction_1,pull_fraction_2\n",
                        0) == 0);

  std::ostringstream jtext;
  CHECK(cli::cmd_summarize(dir.string(), cli::OutputFormat::json, jtext) == 0);
  const auto j = nlohmann::json::parse(jtext.str());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["policy"] == "ctas");
  CHECK(j[1]["policy"] == "uniform");
  CHECK(j[0]["n_runs"] == 5);
  CHECK(j[0]["n_censored"] == 0);
  const auto fr = j[0]["mean_pull_fractions"].get<std::vector<double>>();
  REQUIRE(fr.size() == 2);
  CHECK(fr[0] + fr[1] == doctest::Approx(1.0).epsilon(1e-9));
  // uniform spends more to reach the same confidence on this instance
  CHECK(j[1]["mean_cost"].get<double>() > 0.0);

  CHECK(fs::exists(dir / "plot_cost_box.csv"));
  CHECK(fs::exists(dir / "plot_fractions_0_ctas_delta0.1.csv"));
  std::istringstream box(slurp(dir / "plot_cost_box.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(box, line)) ++lines;
  CHECK(lines == 3);  // header + one row per cell

  std::ostringstream table;
  CHECK(cli::cmd_summarize(dir.string(), cli::OutputFormat::table, table) == 0);
  CHECK(table.str().find("per-policy compute time") != std::string::npos);

  CHECK_THROWS(cli::cmd_summarize((test_root() / "nowhere").string(),
                                  cli::OutputFormat::table, table));
}

TEST_CASE("cmd_lower_bound prints T* and both bound forms") {
  const fs::path cfg = write_text("lb.json", kOracleConfig);
  std::ostringstream out;
  CHECK(cli::cmd_lower_bound(cfg.string(), {0.1}, cli::OutputFormat::csv, out) == 0);
  std::istringstream text(out.str());
  std::string header, row;
  std::getline(text, header);
  CHECK(header == "delta,t_star,kl_form,asymptotic");
  std::getline(text, row);
  std::stringstream fields(row);
  std::string f;
  std::vector<double> v;
  while (std::getline(fields, f, ',')) v.push_back(std::stod(f));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 0.1);
  CHECK(v[1] == doctest::Approx(4.5).epsilon(1e-8));
  CHECK(v[2] == doctest::Approx(4.5 * testref::kl(FamilyKind::bernoulli, 1.0, 0.1, 0.9))
                    .epsilon(1e-8));
  CHECK(v[3] == doctest::Approx(4.5 * std::log(10.0)).epsilon(1e-8));

  // default deltas come from the config, which also lists exactly {0.1}
  std::ostringstream dflt;
  CHECK(cli::cmd_lower_bound(cfg.string(), {}, cli::OutputFormat::csv, dflt) == 0);
  CHECK(dflt.str() == out.str());
}

TEST_CASE("run_cli surfaces usage and runtime errors as nonzero exits") {
  const auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"cabandit", "oracle", "--config",
              (test_root() / "missing.json").string()}) == 1);
  CHECK(call({"cabandit", "bogus-subcommand"}) != 0);
  CHECK(call({"cabandit"}) != 0);
  const fs::path cfg = write_text("cli.json", kOracleConfig);
  CHECK(call({"cabandit", "oracle", "--config", cfg.string(), "--format", "xml"}) == 1);
}
