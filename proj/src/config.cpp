#include "cabandit/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cabandit {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void reject_unknown_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      bad(where, "unknown key '" + key + "'");
  }
}

RewardFamily parse_family(const json& j) {
  if (!j.is_object()) bad("instance.family", "expected an object");
  reject_unknown_keys(j, "instance.family", {"kind", "sigma"});
  RewardFamily fam;
  const std::string kind = j.value("kind", "");
  if (kind == "gaussian") fam.kind = FamilyKind::gaussian;
  else if (kind == "bernoulli") fam.kind = FamilyKind::bernoulli;
  else if (kind == "poisson") fam.kind = FamilyKind::poisson;
  else bad("instance.family.kind", "expected gaussian, bernoulli, or poisson");
  fam.sigma = j.value("sigma", 1.0);
  if (fam.kind != FamilyKind::gaussian && j.contains("sigma"))
    bad("instance.family.sigma", "only gaussian takes a sigma");
  if (fam.kind == FamilyKind::gaussian && !(fam.sigma > 0.0))
    bad("instance.family.sigma", "must be positive");
  return fam;
}

CostModel parse_cost(const json& j, const std::string& where) {
  CostModel m;
  if (j.is_number()) {
    m.mean = j.get<double>();
    return m;
  }
  if (!j.is_object()) bad(where, "expected a number or an object");
  reject_unknown_keys(j, where, {"kind", "mean", "half_width"});
  const std::string kind = j.value("kind", "deterministic");
  if (kind == "deterministic") m.kind = CostKind::deterministic;
  else if (kind == "uniform-interval") m.kind = CostKind::uniform_interval;
  else bad(where + ".kind", "expected deterministic or uniform-interval");
  if (!j.contains("mean") || !j["mean"].is_number()) bad(where + ".mean", "required number");
  m.mean = j["mean"].get<double>();
  m.half_width = j.value("half_width", 0.0);
  if (m.kind == CostKind::deterministic && j.contains("half_width") && m.half_width != 0.0)
    bad(where + ".half_width", "deterministic costs have no width");
  if (m.half_width < 0.0) bad(where + ".half_width", "must be nonnegative");
  return m;
}

PolicyConfig parse_policy(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  reject_unknown_keys(j, where,
                      {"kind", "alpha", "B", "exploration_multiplier", "oracle_tol",
                       "recompute_period"});
  PolicyConfig cfg;
  if (!j.contains("kind") || !j["kind"].is_string()) bad(where + ".kind", "required string");
  try {
    cfg.kind = policy_from_name(j["kind"].get<std::string>());
  } catch (const std::exception& e) {
    bad(where + ".kind", e.what());
  }
  cfg.alpha = j.value("alpha", 1.0);
  if (j.contains("B")) {
    const json& b = j["B"];
    if (b.is_string() && b.get<std::string>() == "auto") {
      // leave empty: resolved per instance
    } else if (b.is_number()) {
      cfg.B = b.get<double>();
    } else {
      bad(where + ".B", "expected a number or \"auto\"");
    }
  }
  cfg.exploration_multiplier = j.value("exploration_multiplier", 1.0);
  cfg.oracle_tol = j.value("oracle_tol", 1e-10);
  cfg.recompute_period = j.value("recompute_period", 1);
  return cfg;
}

}  // namespace

BanditInstance ExperimentConfig::instance() const {
  ArrayXd mu(static_cast<Eigen::Index>(means.size()));
  for (std::size_t i = 0; i < means.size(); ++i) mu[static_cast<Eigen::Index>(i)] = means[i];
  double floor = ell;
  if (floor == 0.0) {
    floor = std::numeric_limits<double>::infinity();
    for (const auto& m : costs) floor = std::min(floor, m.support_lo());
  }
  return BanditInstance(family, std::move(mu), costs, floor, name);
}

RunOptions ExperimentConfig::run_options() const {
  RunOptions opts;
  opts.tau_max = tau_max;
  opts.checkpoints = geometric_snapshots ? geometric_checkpoints(tau_max) : checkpoints;
  return opts;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    bad("<root>", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("<root>", "expected an object");
  reject_unknown_keys(j, "<root>",
                      {"name", "instance", "policies", "deltas", "n_runs", "base_seed",
                       "tau_max", "snapshots", "output_dir"});

  ExperimentConfig cfg;
  cfg.name = j.value("name", "");

  if (!j.contains("instance") || !j["instance"].is_object())
    bad("instance", "required object");
  const json& inst = j["instance"];
  reject_unknown_keys(inst, "instance", {"family", "means", "costs", "ell"});
  if (!inst.contains("family")) bad("instance.family", "required");
  cfg.family = parse_family(inst["family"]);
  if (!inst.contains("means") || !inst["means"].is_array() || inst["means"].size() < 2)
    bad("instance.means", "required array with at least two entries");
  for (const auto& m : inst["means"]) {
    if (!m.is_number()) bad("instance.means", "entries must be numbers");
    cfg.means.push_back(m.get<double>());
  }
  if (!inst.contains("costs") || !inst["costs"].is_array() ||
      inst["costs"].size() != cfg.means.size())
    bad("instance.costs", "required array with one entry per arm");
  for (std::size_t a = 0; a < inst["costs"].size(); ++a)
    cfg.costs.push_back(parse_cost(inst["costs"][a],
                                   "instance.costs[" + std::to_string(a) + "]"));
  cfg.ell = inst.value("ell", 0.0);
  if (inst.contains("ell") && !(cfg.ell > 0.0)) bad("instance.ell", "must be positive");

  if (!j.contains("policies") || !j["policies"].is_array() || j["policies"].empty())
    bad("policies", "required nonempty array");
  for (std::size_t i = 0; i < j["policies"].size(); ++i)
    cfg.policies.push_back(parse_policy(j["policies"][i],
                                        "policies[" + std::to_string(i) + "]"));

  if (!j.contains("deltas") || !j["deltas"].is_array() || j["deltas"].empty())
    bad("deltas", "required nonempty array");
  for (const auto& d : j["deltas"]) {
    if (!d.is_number() || !(d.get<double>() > 0.0 && d.get<double>() < 1.0))
      bad("deltas", "entries must be numbers in (0, 1)");
    cfg.deltas.push_back(d.get<double>());
  }

  if (!j.contains("n_runs") || !j["n_runs"].is_number_integer() || j["n_runs"].get<int>() < 1)
    bad("n_runs", "required positive integer");
  cfg.n_runs = j["n_runs"].get<int>();
  if (!j.contains("base_seed") || !j["base_seed"].is_number_unsigned())
    bad("base_seed", "required nonnegative integer");
  cfg.base_seed = j["base_seed"].get<std::uint64_t>();
  cfg.tau_max = j.value("tau_max", std::int64_t{1'000'000});
  if (cfg.tau_max < 2) bad("tau_max", "too small");

  if (j.contains("snapshots")) {
    const json& snaps = j["snapshots"];
    if (snaps.is_string()) {
      const std::string s = snaps.get<std::string>();
      if (s == "geometric") cfg.geometric_snapshots = true;
      else if (s == "none") cfg.geometric_snapshots = false;
      else bad("snapshots", "expected \"geometric\", \"none\", or an array of times");
    } else if (snaps.is_array()) {
      cfg.geometric_snapshots = false;
      std::int64_t prev = 0;
      for (const auto& t : snaps) {
        if (!t.is_number_integer() || t.get<std::int64_t>() <= prev)
          bad("snapshots", "expected strictly increasing positive integers");
        prev = t.get<std::int64_t>();
        cfg.checkpoints.push_back(prev);
      }
    } else {
      bad("snapshots", "expected \"geometric\", \"none\", or an array of times");
    }
  }
  cfg.output_dir = j.value("output_dir", "");

  if (cfg.name.find(',') != std::string::npos || cfg.name.find('\n') != std::string::npos)
    bad("name", "must not contain commas or newlines");

  // Surface instance/policy problems now, before any output is created.
  const BanditInstance built = cfg.instance();
  for (const auto& p : cfg.policies) p.validate(built.num_arms());
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  json fam;
  fam["kind"] = family_name(cfg.family.kind);
  if (cfg.family.kind == FamilyKind::gaussian) fam["sigma"] = cfg.family.sigma;
  j["instance"]["family"] = fam;
  j["instance"]["means"] = cfg.means;
  json costs = json::array();
  for (const auto& m : cfg.costs) {
    json c;
    c["kind"] = m.kind == CostKind::deterministic ? "deterministic" : "uniform-interval";
    c["mean"] = m.mean;
    if (m.kind == CostKind::uniform_interval) c["half_width"] = m.half_width;
    costs.push_back(c);
  }
  j["instance"]["costs"] = costs;
  j["instance"]["ell"] = cfg.instance().ell;
  json policies = json::array();
  for (const auto& p : cfg.policies) {
    json pj;
    pj["kind"] = policy_name(p.kind);
    pj["alpha"] = p.alpha;
    if (p.B) pj["B"] = *p.B;
    else pj["B"] = "auto";
    pj["exploration_multiplier"] = p.exploration_multiplier;
    pj["oracle_tol"] = p.oracle_tol;
    pj["recompute_period"] = p.recompute_period;
    policies.push_back(pj);
  }
  j["policies"] = policies;
  j["deltas"] = cfg.deltas;
  j["n_runs"] = cfg.n_runs;
  j["base_seed"] = cfg.base_seed;
  j["tau_max"] = cfg.tau_max;
  if (cfg.geometric_snapshots) j["snapshots"] = "geometric";
  else if (cfg.checkpoints.empty()) j["snapshots"] = "none";
  else j["snapshots"] = cfg.checkpoints;
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

}  // namespace cabandit
