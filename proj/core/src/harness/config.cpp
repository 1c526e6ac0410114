#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "secrelay/harness.hpp"

namespace secrelay {

namespace {

using nlohmann::json;

constexpr const char* kExperimentNames[] = {"convergence",  "sweep_source_power", "sweep_relay_antennas",
                                            "eh_region",    "eh_an_ratio",        "validate_signal_model"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "'");
  }
}

// `base`, `base_db` or `base_dbm`; at most one may be present. Returns true if found.
bool read_level(const json& obj, const std::string& base, double& out) {
  int found = 0;
  if (obj.contains(base)) {
    out = get<double>(obj.at(base), base);
    ++found;
  }
  for (const char* suffix : {"_db", "_dbm"}) {
    const std::string key = base + suffix;
    if (obj.contains(key)) {
      out = from_db(get<double>(obj.at(key), key));
      ++found;
    }
  }
  if (found > 1) throw ConfigError("'" + base + "' given in more than one unit");
  return found == 1;
}

std::set<std::string> level_keys(std::initializer_list<const char*> bases) {
  std::set<std::string> keys;
  for (const char* b : bases) {
    keys.insert(b);
    keys.insert(std::string(b) + "_db");
    keys.insert(std::string(b) + "_dbm");
  }
  return keys;
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError("'" + key + "' must be a number or a list");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get<double>(x, key));
  return out;
}

Duplex parse_duplex(const std::string& s) {
  if (s == "FD" || s == "fd") return Duplex::kFull;
  if (s == "HD" || s == "hd") return Duplex::kHalf;
  throw ConfigError("duplex must be FD or HD, got '" + s + "'");
}

SolverVariant parse_variant(const std::string& name, const SolverOptions& base) {
  if (name == "exact") return {name, InnerBudget::exact(base.inner.tol, base.inner.max_inner)};
  if (name == "variable") return {name, InnerBudget::uniform(5)};
  try {
    if (name.rfind("variable", 0) == 0) return {name, InnerBudget::uniform(std::stoi(name.substr(8)))};
    if (name.rfind('L', 0) == 0) return {name, InnerBudget::fixed(std::stoi(name.substr(1)))};
  } catch (const std::exception&) {
  }
  throw ConfigError("unknown solver variant '" + name + "'");
}

void read_link_variances(const json& obj, LinkVariances& v, bool in_db, const std::string& where) {
  reject_unknown(obj, {"default", "source_relay", "self_relay", "relay_node", "relay_eve", "source_eve", "self_node"},
                 where);
  auto conv = [&](const char* key) { return in_db ? from_db(get<double>(obj.at(key), key)) : get<double>(obj.at(key), key); };
  if (obj.contains("default")) {
    const double d = conv("default");
    v = {d, d, d, d, d, d};
  }
  if (obj.contains("source_relay")) v.source_relay = conv("source_relay");
  if (obj.contains("self_relay")) v.self_relay = conv("self_relay");
  if (obj.contains("relay_node")) v.relay_node = conv("relay_node");
  if (obj.contains("relay_eve")) v.relay_eve = conv("relay_eve");
  if (obj.contains("source_eve")) v.source_eve = conv("source_eve");
  if (obj.contains("self_node")) v.self_node = conv("self_node");
}

void read_network(const json& obj, ExperimentSpec& s) {
  std::set<std::string> allowed = level_keys({"source_power", "relay_power", "noise"});
  allowed.insert({"relay_tx", "relay_rx", "kappa", "variances", "variances_db"});
  reject_unknown(obj, allowed, "network");
  NetworkSettings& n = s.network;
  if (obj.contains("relay_tx")) n.relay_tx = get<int>(obj.at("relay_tx"), "relay_tx");
  if (obj.contains("relay_rx")) n.relay_rx = get<int>(obj.at("relay_rx"), "relay_rx");
  double p;
  if (read_level(obj, "source_power", p)) n.p_A = n.p_B = p;
  read_level(obj, "relay_power", s.relay_power);
  double noise;
  if (read_level(obj, "noise", noise)) n.sigma2_A = n.sigma2_B = n.sigma2_E = n.sigma2_R = noise;
  if (obj.contains("kappa")) s.kappas = number_list(obj.at("kappa"), "kappa");
  if (obj.contains("variances") && obj.contains("variances_db"))
    throw ConfigError("'variances' given in more than one unit");
  if (obj.contains("variances")) read_link_variances(obj.at("variances"), n.variances, false, "variances");
  if (obj.contains("variances_db")) read_link_variances(obj.at("variances_db"), n.variances, true, "variances_db");
}

void read_solver(const json& obj, SolverOptions& o) {
  reject_unknown(obj,
                 {"mode", "L", "L_max", "schedule", "inner_tol", "max_inner", "step_rule", "sigma", "beta",
                  "initial_step", "scale_initial_step", "max_backtracks", "grid_size", "outer_tol",
                  "stationarity_tol", "max_outer"},
                 "solver");
  if (obj.contains("inner_tol")) o.inner.tol = get<double>(obj.at("inner_tol"), "inner_tol");
  if (obj.contains("max_inner")) o.inner.max_inner = get<int>(obj.at("max_inner"), "max_inner");
  if (obj.contains("L")) o.inner.L = get<int>(obj.at("L"), "L");
  if (obj.contains("L_max")) o.inner.L_max = get<int>(obj.at("L_max"), "L_max");
  std::string schedule;
  if (obj.contains("mode")) {
    const auto mode = get<std::string>(obj.at("mode"), "mode");
    if (mode == "exact")
      schedule = "exact";
    else if (mode != "inexact")
      throw ConfigError("solver mode must be exact or inexact");
  }
  if (obj.contains("schedule")) schedule = get<std::string>(obj.at("schedule"), "schedule");
  if (schedule == "fixed")
    o.inner.schedule = InnerBudget::Schedule::kFixed;
  else if (schedule == "uniform")
    o.inner.schedule = InnerBudget::Schedule::kUniform;
  else if (schedule == "exact")
    o.inner.schedule = InnerBudget::Schedule::kUntilConverged;
  else if (!schedule.empty())
    throw ConfigError("schedule must be fixed, uniform or exact");
  if (obj.contains("step_rule")) {
    const auto r = get<std::string>(obj.at("step_rule"), "step_rule");
    if (r == "armijo")
      o.step_rule = StepRule::kArmijo;
    else if (r == "limited_minimization")
      o.step_rule = StepRule::kLimitedMinimization;
    else
      throw ConfigError("step_rule must be armijo or limited_minimization");
  }
  if (obj.contains("sigma")) o.armijo.sigma = get<double>(obj.at("sigma"), "sigma");
  if (obj.contains("beta")) o.armijo.beta = get<double>(obj.at("beta"), "beta");
  if (obj.contains("initial_step")) o.armijo.initial_step = get<double>(obj.at("initial_step"), "initial_step");
  if (obj.contains("scale_initial_step"))
    o.armijo.scale_by_gradient = get<bool>(obj.at("scale_initial_step"), "scale_initial_step");
  if (obj.contains("max_backtracks")) o.armijo.max_backtracks = get<int>(obj.at("max_backtracks"), "max_backtracks");
  if (obj.contains("grid_size")) o.grid_size = get<int>(obj.at("grid_size"), "grid_size");
  if (obj.contains("outer_tol")) o.outer_tol = get<double>(obj.at("outer_tol"), "outer_tol");
  if (obj.contains("stationarity_tol"))
    o.stationarity_tol = get<double>(obj.at("stationarity_tol"), "stationarity_tol");
  if (obj.contains("max_outer")) o.max_outer = get<int>(obj.at("max_outer"), "max_outer");
}

void read_sweep(const json& obj, ExperimentSpec& s) {
  if (!obj.is_object() || obj.size() != 1) throw ConfigError("'sweep' must hold exactly one axis");
  const std::string key = obj.begin().key();
  const std::vector<double> raw = number_list(obj.begin().value(), key);
  static const std::set<std::string> axes = {"source_power", "source_power_db", "source_power_dbm", "relay_tx",
                                             "epsilon",      "epsilon_db",      "epsilon_dbm"};
  if (!axes.count(key)) throw ConfigError("unknown sweep axis '" + key + "'");
  s.sweep_name = key;
  s.sweep_labels = raw;
  s.sweep_values = raw;
  if (key.size() > 3 && (key.ends_with("_db") || key.ends_with("_dbm")))
    for (double& x : s.sweep_values) x = from_db(x);
}

}  // namespace

double from_db(double x) { return std::pow(10.0, x / 10.0); }

const char* to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment parse_experiment(std::string_view name) {
  for (int i = 0; i < 6; ++i)
    if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentSpec default_spec(Experiment e) {
  ExperimentSpec s;
  s.experiment = e;
  s.network.p_A = s.network.p_B = from_db(10.0);
  s.relay_power = from_db(10.0);
  if (e != Experiment::kConvergence) {
    // Run to certification: the relative-improvement rule alone stops short of stationarity.
    s.solver.outer_tol = 1e-12;
    s.solver.stationarity_tol = 1e-6;
    s.solver.max_outer = 20000;
    s.solver.armijo.scale_by_gradient = false;
  }
  switch (e) {
    case Experiment::kConvergence:
      for (const char* v : {"exact", "L1", "L3", "L5", "variable"}) s.variants.push_back(parse_variant(v, s.solver));
      break;
    case Experiment::kSweepSourcePower:
      s.trials = 200;
      s.duplex = {Duplex::kFull, Duplex::kHalf};
      s.sweep_name = "source_power_db";
      s.sweep_labels = {-5, 0, 5, 10, 15, 20, 25};
      break;
    case Experiment::kSweepRelayAntennas:
      s.trials = 100;
      s.duplex = {Duplex::kFull, Duplex::kHalf};
      s.sweep_name = "relay_tx";
      s.sweep_labels = {2, 3, 4, 5, 6, 7, 8};
      break;
    case Experiment::kEhRegion:
    case Experiment::kEhAnRatio: {
      s.trials = 20;
      s.duplex = {Duplex::kFull, Duplex::kHalf};
      const double noise = from_db(-50.0);
      s.network.sigma2_A = s.network.sigma2_B = s.network.sigma2_E = s.network.sigma2_R = noise;
      const double far = from_db(-20.0);
      const double eve = from_db(-10.0);
      s.network.variances = {far, far, far, eve, eve, far};
      s.sweep_name = "epsilon_dbm";
      s.sweep_labels = {-20, -18, -16, -14, -12, -10, -8};
      break;
    }
    case Experiment::kValidateSignalModel:
      s.trials = 10;
      break;
  }
  s.sweep_values = s.sweep_labels;
  if (s.sweep_name.ends_with("_db") || s.sweep_name.ends_with("_dbm"))
    for (double& x : s.sweep_values) x = from_db(x);
  s.network.kappa_A = s.network.kappa_B = s.kappas.front();
  return s;
}

ExperimentSpec parse_spec(std::string_view json_text, std::string_view experiment_override) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"experiment", "seed", "trials", "threads", "output", "network", "duplex", "an_enabled", "solver",
                  "variants", "sweep", "eh", "signal", "certify_tol", "timing"},
                 "config");

  std::string name(experiment_override);
  if (doc.contains("experiment")) {
    const auto in_file = get<std::string>(doc.at("experiment"), "experiment");
    if (!name.empty() && name != in_file)
      throw ConfigError("config is for '" + in_file + "' but '" + name + "' was requested");
    name = in_file;
  }
  if (name.empty()) throw ConfigError("no experiment named");
  ExperimentSpec s = default_spec(parse_experiment(name));

  if (doc.contains("seed")) s.seed = get<std::uint64_t>(doc.at("seed"), "seed");
  if (doc.contains("trials")) s.trials = get<int>(doc.at("trials"), "trials");
  if (doc.contains("threads")) s.threads = get<int>(doc.at("threads"), "threads");
  if (doc.contains("output")) s.output = get<std::string>(doc.at("output"), "output");
  if (doc.contains("network")) read_network(doc.at("network"), s);
  if (doc.contains("duplex")) {
    const json& d = doc.at("duplex");
    s.duplex.clear();
    if (d.is_string())
      s.duplex.push_back(parse_duplex(d.get<std::string>()));
    else if (d.is_array())
      for (const auto& x : d) s.duplex.push_back(parse_duplex(get<std::string>(x, "duplex")));
    else
      throw ConfigError("'duplex' must be a string or a list");
  }
  if (doc.contains("an_enabled")) s.an_enabled = get<bool>(doc.at("an_enabled"), "an_enabled");
  if (doc.contains("solver")) read_solver(doc.at("solver"), s.solver);
  if (doc.contains("variants")) {
    s.variants.clear();
    for (const auto& v : doc.at("variants")) s.variants.push_back(parse_variant(get<std::string>(v, "variants"), s.solver));
  } else if (s.experiment == Experiment::kConvergence) {
    // Rebuild so that "exact" picks up any solver inner_tol override.
    s.variants.clear();
    for (const char* v : {"exact", "L1", "L3", "L5", "variable"}) s.variants.push_back(parse_variant(v, s.solver));
  }
  if (doc.contains("sweep")) read_sweep(doc.at("sweep"), s);
  if (doc.contains("eh")) {
    const json& eh = doc.at("eh");
    reject_unknown(eh, {"tau", "max_resamples"}, "eh");
    if (eh.contains("tau")) s.tau = get<double>(eh.at("tau"), "tau");
    if (eh.contains("max_resamples")) s.max_resamples = get<int>(eh.at("max_resamples"), "max_resamples");
  }
  if (doc.contains("signal")) {
    const json& sig = doc.at("signal");
    reject_unknown(sig, {"num_blocks", "include_direct_links"}, "signal");
    if (sig.contains("num_blocks")) s.num_blocks = get<int>(sig.at("num_blocks"), "num_blocks");
    if (sig.contains("include_direct_links"))
      s.include_direct_links = get<bool>(sig.at("include_direct_links"), "include_direct_links");
  }
  if (doc.contains("certify_tol")) s.certify_tol = get<double>(doc.at("certify_tol"), "certify_tol");
  if (doc.contains("timing")) s.timing = get<bool>(doc.at("timing"), "timing");
  s.network.kappa_A = s.network.kappa_B = s.kappas.empty() ? 0.0 : s.kappas.front();
  s.validate();
  return s;
}

ExperimentSpec load_spec(const std::string& path, std::string_view experiment_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), experiment_override);
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (network.relay_tx < 1 || network.relay_rx < 1) throw ConfigError("antenna counts must be >= 1");
  if (!(network.p_A >= 0.0) || !(relay_power > 0.0)) throw ConfigError("powers must be positive");
  for (double n : {network.sigma2_A, network.sigma2_B, network.sigma2_E, network.sigma2_R})
    if (!(n > 0.0)) throw ConfigError("noise variances must be positive");
  const LinkVariances& v = network.variances;
  for (double x : {v.source_relay, v.self_relay, v.relay_node, v.relay_eve, v.self_node})
    if (!(x > 0.0)) throw ConfigError("channel variances must be positive");
  if (!(v.source_eve >= 0.0)) throw ConfigError("direct-link variance must be nonnegative");
  if (kappas.empty()) throw ConfigError("kappa list is empty");
  for (double k : kappas)
    if (!(k >= 0.0 && k <= 1.0)) throw ConfigError("kappa must lie in [0, 1]");
  if (duplex.empty()) throw ConfigError("duplex list is empty");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (max_resamples < 0) throw ConfigError("max_resamples must be >= 0");
  if (num_blocks < 1) throw ConfigError("num_blocks must be >= 1");
  if (!(certify_tol > 0.0)) throw ConfigError("certify_tol must be positive");
  SolverOptions o = solver;
  o.P_R = relay_power;
  o.validate();
  switch (experiment) {
    case Experiment::kConvergence:
      if (variants.empty()) throw ConfigError("convergence needs at least one solver variant");
      break;
    case Experiment::kSweepSourcePower:
      if (sweep_name.rfind("source_power", 0) != 0) throw ConfigError("sweep_source_power needs a source_power sweep");
      break;
    case Experiment::kSweepRelayAntennas:
      if (sweep_name != "relay_tx") throw ConfigError("sweep_relay_antennas needs a relay_tx sweep");
      for (double n : sweep_values)
        if (n < 1 || n != std::floor(n)) throw ConfigError("relay_tx values must be positive integers");
      break;
    case Experiment::kEhRegion:
    case Experiment::kEhAnRatio:
      if (sweep_name.rfind("epsilon", 0) != 0) throw ConfigError("EH experiments need an epsilon sweep");
      break;
    case Experiment::kValidateSignalModel:
      break;
  }
  if (experiment != Experiment::kConvergence && experiment != Experiment::kValidateSignalModel &&
      sweep_values.empty())
    throw ConfigError("sweep has no values");
}

}  // namespace secrelay
