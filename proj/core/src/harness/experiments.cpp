#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>

#include "secrelay/harness.hpp"
#include "secrelay/rng.hpp"
#include "secrelay/signal_sim.hpp"

namespace secrelay {

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  Rng rng(seed, static_cast<std::uint64_t>(trial) + 1);
  return rng.next();
}

double an_power_ratio(const RelaySolution& sol, const DerivedConstants& dc) {
  const double total = relay_power(sol, dc);
  if (total <= 0.0) return 0.0;
  return std::real(sol.Q0.trace()) / total;
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(long long v) { return std::to_string(v); }

class Row {
 public:
  Row() : fields_(csv_columns().size()) {}

  Row& set(std::string_view col, std::string value) {
    fields_.at(index(col)) = std::move(value);
    return *this;
  }
  Row& num(std::string_view col, double v) { return set(col, fmt(v)); }
  Row& integer(std::string_view col, long long v) { return set(col, fmt(v)); }

  std::vector<std::string> take() { return std::move(fields_); }

 private:
  static std::size_t index(std::string_view col) {
    static const std::map<std::string, std::size_t, std::less<>> idx = [] {
      std::map<std::string, std::size_t, std::less<>> m;
      const auto& c = csv_columns();
      for (std::size_t i = 0; i < c.size(); ++i) m.emplace(c[i], i);
      return m;
    }();
    const auto it = idx.find(col);
    if (it == idx.end()) throw Error("unknown column '" + std::string(col) + "'");
    return it->second;
  }

  std::vector<std::string> fields_;
};

using Rows = std::vector<std::vector<std::string>>;

// Runs fn(trial) for every trial on `threads` workers and concatenates the
// results in trial order.
template <class Fn>
Rows run_trials(int trials, int threads, Fn fn) {
  std::vector<Rows> out(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        out[static_cast<std::size_t>(t)] = fn(t);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, std::max(trials, 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Rows all;
  for (auto& r : out)
    for (auto& row : r) all.push_back(std::move(row));
  return all;
}

SolverOptions solver_options(const ExperimentSpec& spec, int trial) {
  SolverOptions o = spec.solver;
  o.P_R = spec.relay_power;
  o.an_enabled = spec.an_enabled;
  o.record_wall_time = spec.timing;
  o.seed = trial_seed(spec.seed ^ 0x5eedULL, trial);
  return o;
}

NetworkSettings network_for(const ExperimentSpec& spec, double kappa) {
  NetworkSettings n = spec.network;
  n.kappa_A = n.kappa_B = kappa;
  return n;
}

void with_kappa(ChannelSet& ch, double kappa) { ch.kappa_A = ch.kappa_B = kappa; }

InstanceSolution finish_instance(InstanceSolution out, const ChannelSet& ch, const SolverOptions& opts, double tau,
                                 const EhConfig* ehc) {
  const DerivedConstants& dc = out.dc;
  out.purified = ehc ? purify_eh(out.solve.x, dc, *ehc) : purify(out.solve.x, dc);
  const RelaySolution& sol = out.purified.physical;
  out.secrecy_rate = sum_secrecy_rate(sol, ch, dc);
  out.relay_power = relay_power(sol, dc);
  out.harvested_power = harvested_power(sol, ch, dc, ehc ? ehc->tau : tau);
  out.an_ratio = an_power_ratio(sol, dc);
  out.stationarity_residual =
      ehc ? stationarity_residual_eh(out.purified.W, out.purified.Q, dc, opts.P_R, *ehc, opts.an_enabled)
          : stationarity_residual(out.purified.W, out.purified.Q, dc, opts.P_R, opts.an_enabled);
  return out;
}

InstanceSolution no_nulling(const ChannelSet& ch) {
  InstanceSolution out;
  out.status = "no_nulling_dims";
  out.dc.duplex = Duplex::kFull;
  out.dc.V0 = CMatrix::Zero(ch.relay_tx(), 0);
  return out;
}

}  // namespace

InstanceSolution solve_instance(const ChannelSet& ch, Duplex duplex, const SolverOptions& opts, double tau) {
  if (duplex == Duplex::kHalf) return half_duplex_solve(ch, opts);
  InstanceSolution out;
  try {
    out.dc = derive_constants(ch, Duplex::kFull);
  } catch (const NoNullingDimensions&) {
    return no_nulling(ch);
  }
  out.solve = inexact_mm_solve(default_init(out.dc, opts.P_R, opts.an_enabled), out.dc, opts);
  return finish_instance(std::move(out), ch, opts, tau, nullptr);
}

InstanceSolution half_duplex_solve(const ChannelSet& ch, const SolverOptions& opts) {
  InstanceSolution out;
  out.dc = derive_constants(ch, Duplex::kHalf);
  out.solve = inexact_mm_solve(default_init(out.dc, opts.P_R, opts.an_enabled), out.dc, opts);
  return finish_instance(std::move(out), ch, opts, 0.1, nullptr);
}

InstanceSolution solve_instance_eh(const ChannelSet& ch, Duplex duplex, const SolverOptions& opts, double tau,
                                   double epsilon, const IteratePoint* init) {
  InstanceSolution out;
  try {
    out.dc = derive_constants(ch, duplex);
  } catch (const NoNullingDimensions&) {
    return no_nulling(ch);
  }
  const EhConfig ehc = make_eh_config(tau, epsilon, out.dc);
  if (!eh_feasible(ehc, out.dc, opts.P_R)) {
    out.status = "infeasible_eh";
    return out;
  }
  IteratePoint x0 = init ? project_feasible_eh(init->W, init->Q, opts.P_R, ehc, out.dc, opts.an_enabled)
                         : default_init_eh(out.dc, opts.P_R, ehc, opts.an_enabled);
  out.solve = inexact_mm_solve_eh(x0, out.dc, opts, ehc);
  return finish_instance(std::move(out), ch, opts, tau, &ehc);
}

namespace {

struct Context {
  const ExperimentSpec& spec;
  int trial;
  std::uint64_t channel_seed;
};

Row base_row(const Context& c, std::string_view row_type) {
  Row r;
  r.set("experiment", to_string(c.spec.experiment))
      .set("seed", std::to_string(c.spec.seed))
      .integer("trial", c.trial)
      .set("row_type", std::string(row_type));
  return r;
}

std::string certify(const InstanceSolution& s, const ExperimentSpec& spec, double epsilon) {
  if (s.status != "ok") return s.status;
  const bool power_ok = s.relay_power <= spec.relay_power * (1.0 + 1e-8);
  const bool rank_ok = s.purified.rank_ratio <= 1e-6;
  const bool kkt_ok = s.stationarity_residual <= spec.certify_tol;
  const bool eh_ok = !(epsilon > 0.0) || s.harvested_power >= epsilon * (1.0 - 1e-6);
  return power_ok && rank_ok && kkt_ok && eh_ok ? "ok" : "uncertified";
}

double total_wall_ms(const SolveTrace& t) {
  double ms = 0.0;
  for (const auto& it : t.iterations) ms += it.wall_ms;
  return ms;
}

Row solution_row(const Context& c, Duplex duplex, double kappa, double sweep_label, const InstanceSolution& s,
                 double epsilon = 0.0) {
  Row r = base_row(c, "solution");
  r.set("duplex", to_string(duplex)).num("kappa", duplex == Duplex::kFull ? kappa : 0.0);
  if (!c.spec.sweep_name.empty()) r.set("sweep_name", c.spec.sweep_name).num("sweep_value", sweep_label);
  const std::string status = certify(s, c.spec, epsilon);
  r.set("status", status);
  if (status == "infeasible_eh") return r;
  const double rate = s.secrecy_rate;
  r.num("secrecy_rate_nats", rate)
      .num("secrecy_rate_bits", rate / std::numbers::ln2)
      .num("secrecy_rate_pos_nats", std::max(rate, 0.0))
      .num("relay_power", s.relay_power)
      .num("an_ratio", s.an_ratio);
  if (status == "no_nulling_dims") return r;
  r.integer("k", static_cast<long long>(s.solve.trace.iterations.size()))
      .num("phi", s.purified.phi)
      .num("gm_norm", s.solve.trace.final_gm_norm)
      .num("harvested_power", s.harvested_power)
      .num("stationarity_residual", s.stationarity_residual)
      .num("rank_ratio", s.purified.rank_ratio);
  if (c.spec.timing) r.num("wall_ms", total_wall_ms(s.solve.trace));
  return r;
}

// Mean and standard error of the secrecy rate (and a few companions) per
// (duplex, kappa, sweep value) group of solution rows.
Rows aggregate(const ExperimentSpec& spec, const Rows& rows) {
  ResultTable t{csv_columns(), rows};
  using Key = std::tuple<std::string, std::string, std::string>;
  struct Acc {
    std::vector<double> rate, pos, power, an, harvest;
  };
  std::map<Key, Acc> groups;
  std::vector<Key> order;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (t.at(i, "row_type") != "solution" || t.at(i, "status") == "infeasible_eh") continue;
    Key k{t.at(i, "duplex"), t.at(i, "kappa"), t.at(i, "sweep_value")};
    auto [it, fresh] = groups.try_emplace(k);
    if (fresh) order.push_back(k);
    Acc& a = it->second;
    a.rate.push_back(t.number(i, "secrecy_rate_nats"));
    a.pos.push_back(t.number(i, "secrecy_rate_pos_nats"));
    a.power.push_back(t.number(i, "relay_power"));
    a.an.push_back(t.number(i, "an_ratio"));
    const double h = t.number(i, "harvested_power");
    if (!std::isnan(h)) a.harvest.push_back(h);
  }
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto se = [&](const std::vector<double>& v) {
    if (v.size() < 2) return std::nan("");
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  };
  Rows out;
  for (const Key& k : order) {
    const Acc& a = groups.at(k);
    Row r;
    r.set("experiment", to_string(spec.experiment))
        .set("seed", std::to_string(spec.seed))
        .set("row_type", "aggregate")
        .set("duplex", std::get<0>(k))
        .set("kappa", std::get<1>(k))
        .set("sweep_name", spec.sweep_name)
        .set("sweep_value", std::get<2>(k))
        .num("secrecy_rate_nats", mean(a.rate))
        .num("secrecy_rate_bits", mean(a.rate) / std::numbers::ln2)
        .num("secrecy_rate_pos_nats", mean(a.pos))
        .num("std_error", se(a.rate))
        .num("relay_power", mean(a.power))
        .num("an_ratio", mean(a.an))
        .num("harvested_power", mean(a.harvest))
        .integer("count", static_cast<long long>(a.rate.size()))
        .set("metric", "mean");
    out.push_back(r.take());
  }
  return out;
}

Rows convergence_trial(const ExperimentSpec& spec, int trial) {
  const Context c{spec, trial, trial_seed(spec.seed, trial)};
  Rows rows;
  for (double kappa : spec.kappas) {
    const ChannelSet ch = generate_channels(c.channel_seed, network_for(spec, kappa));
    for (Duplex d : spec.duplex) {
      DerivedConstants dc;
      try {
        dc = derive_constants(ch, d);
      } catch (const NoNullingDimensions&) {
        Row r = base_row(c, "solution");
        r.set("duplex", to_string(d)).num("kappa", kappa).set("status", "no_nulling_dims");
        rows.push_back(r.take());
        continue;
      }
      for (const SolverVariant& v : spec.variants) {
        SolverOptions opts = solver_options(spec, trial);
        opts.inner = v.inner;
        const IteratePoint x0 = default_init(dc, opts.P_R, opts.an_enabled);
        const SolveResult res = inexact_mm_solve(x0, dc, opts);
        auto iter_row = [&](long long k) {
          Row r = base_row(c, "iteration");
          r.set("duplex", to_string(d))
              .num("kappa", d == Duplex::kFull ? kappa : 0.0)
              .set("sweep_name", "variant")
              .set("sweep_value", v.name)
              .integer("k", k);
          return r;
        };
        Row first = iter_row(0);
        first.num("phi", lifted_objective(x0.W, x0.Q, dc));
        rows.push_back(first.take());
        for (const IterationRecord& it : res.trace.iterations) {
          Row r = iter_row(it.k + 1);
          r.num("phi", it.phi_next).num("surrogate", it.surrogate).num("gm_norm", it.gm_norm);
          r.integer("count", it.inner_iterations);
          if (spec.timing) r.num("wall_ms", it.wall_ms);
          rows.push_back(r.take());
        }
        InstanceSolution s;
        s.dc = dc;
        s.solve = res;
        s = finish_instance(std::move(s), ch, opts, spec.tau, nullptr);
        Row r = solution_row(c, d, kappa, 0.0, s);
        r.set("sweep_name", "variant").set("sweep_value", v.name).set("metric", to_string(res.trace.stop));
        rows.push_back(r.take());
      }
    }
  }
  return rows;
}

Rows sweep_trial(const ExperimentSpec& spec, int trial) {
  const Context c{spec, trial, trial_seed(spec.seed, trial)};
  const bool antennas = spec.experiment == Experiment::kSweepRelayAntennas;
  Rows rows;
  for (std::size_t i = 0; i < spec.sweep_values.size(); ++i) {
    const double value = spec.sweep_values[i];
    const double label = spec.sweep_labels.empty() ? value : spec.sweep_labels[i];
    NetworkSettings net = spec.network;
    if (antennas) {
      net.relay_tx = static_cast<int>(std::lround(value));
    } else {
      net.p_A = net.p_B = value;
    }
    ChannelSet ch = generate_channels(c.channel_seed, net);
    for (Duplex d : spec.duplex) {
      const auto kappas = d == Duplex::kFull ? spec.kappas : std::vector<double>{spec.kappas.front()};
      for (double kappa : kappas) {
        with_kappa(ch, kappa);
        const SolverOptions opts = solver_options(spec, trial);
        const InstanceSolution s = solve_instance(ch, d, opts, spec.tau);
        rows.push_back(solution_row(c, d, kappa, label, s).take());
      }
    }
  }
  return rows;
}

bool eh_feasible_all(const ChannelSet& ch, const ExperimentSpec& spec, double epsilon) {
  for (Duplex d : spec.duplex) {
    try {
      const DerivedConstants dc = derive_constants(ch, d);
      if (!eh_feasible(make_eh_config(spec.tau, epsilon, dc), dc, spec.relay_power)) return false;
    } catch (const NoNullingDimensions&) {
    }
  }
  return true;
}

Rows eh_trial(const ExperimentSpec& spec, int trial) {
  const std::uint64_t base = trial_seed(spec.seed, trial);
  const double eps_max = *std::max_element(spec.sweep_values.begin(), spec.sweep_values.end());

  // Resample until the largest threshold is reachable; smaller ones then are too.
  Rng resampler(base, 0x7e5a);
  std::uint64_t seed = base;
  int resamples = 0;
  bool feasible = false;
  ChannelSet ch = generate_channels(seed, network_for(spec, spec.kappas.front()));
  for (;;) {
    if (eh_feasible_all(ch, spec, eps_max)) {
      feasible = true;
      break;
    }
    if (resamples == spec.max_resamples) break;
    ++resamples;
    seed = resampler.next();
    ch = generate_channels(seed, network_for(spec, spec.kappas.front()));
  }
  const Context c{spec, trial, seed};

  std::vector<std::size_t> idx(spec.sweep_values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return spec.sweep_values[a] > spec.sweep_values[b];
  });

  std::vector<Rows> per_value(idx.size());
  for (Duplex d : spec.duplex) {
    const auto kappas = d == Duplex::kFull ? spec.kappas : std::vector<double>{spec.kappas.front()};
    for (double kappa : kappas) {
      with_kappa(ch, kappa);
      const SolverOptions opts = solver_options(spec, trial);
      bool have_warm = false;
      IteratePoint warm;
      for (std::size_t i : idx) {
        const double eps = spec.sweep_values[i];
        const double label = spec.sweep_labels.empty() ? eps : spec.sweep_labels[i];
        InstanceSolution s;
        if (!feasible) {
          s.status = "infeasible_eh";
        } else {
          s = solve_instance_eh(ch, d, opts, spec.tau, eps, have_warm ? &warm : nullptr);
          if (s.status == "ok") {
            warm = s.solve.x;
            have_warm = true;
          }
        }
        Row r = solution_row(c, d, kappa, label, s, eps);
        r.integer("resamples", resamples);
        per_value[i].push_back(r.take());
      }
    }
  }
  Rows rows;
  for (auto& v : per_value)
    for (auto& r : v) rows.push_back(std::move(r));
  return rows;
}

Rows signal_trial(const ExperimentSpec& spec, int trial) {
  const Context c{spec, trial, trial_seed(spec.seed, trial)};
  Rows rows;
  for (double kappa : spec.kappas) {
    ChannelSet ch = generate_channels(c.channel_seed, network_for(spec, kappa));
    if (!spec.include_direct_links) ch.h_AE = ch.h_BE = Complex(0.0, 0.0);
    const SolverOptions opts = solver_options(spec, trial);
    const InstanceSolution s = solve_instance(ch, Duplex::kFull, opts, spec.tau);
    if (s.status == "no_nulling_dims") {
      rows.push_back(solution_row(c, Duplex::kFull, kappa, 0.0, s).take());
      continue;
    }
    const RelaySolution& sol = s.purified.physical;
    FrameConfig fc;
    fc.num_blocks = spec.num_blocks;
    fc.seed = trial_seed(c.channel_seed, 0x51);
    const FrameStreams st = simulate_frames(sol, ch, s.dc, fc);

    const EveModel m = eve_noise_cov(sol, ch, s.dc);
    const EveStats es = empirical_eve_stats(st, sol, ch, s.dc);

    auto metric = [&](std::string name, double analytic, double empirical, double se) {
      Row r = base_row(c, "metric");
      r.set("duplex", "FD")
          .num("kappa", kappa)
          .set("metric", std::move(name))
          .num("analytic", analytic)
          .num("empirical", empirical)
          .num("std_error", se)
          .integer("count", static_cast<long long>(st.size()));
      const double dev = std::abs(empirical - analytic);
      r.set("status", dev <= 3.0 * se || dev <= 1e-12 * std::max(1.0, std::abs(analytic)) ? "ok" : "outside_3se");
      rows.push_back(r.take());
    };
    metric("psi11", m.Psi(0, 0), std::real(es.Psi_hat(0, 0)), es.Psi_se(0, 0));
    metric("psi22", m.Psi(1, 1), std::real(es.Psi_hat(1, 1)), es.Psi_se(1, 1));
    metric("psi12", 0.0, std::abs(es.Psi_hat(0, 1)), es.Psi_se(0, 1));
    const Estimate sa = empirical_sinr(st, Node::kAlice);
    const Estimate sb = empirical_sinr(st, Node::kBob);
    metric("sinr_A", sinr_legitimate(sol, ch, s.dc, Node::kAlice), sa.value, sa.std_error);
    metric("sinr_B", sinr_legitimate(sol, ch, s.dc, Node::kBob), sb.value, sb.std_error);
    const Estimate rp = empirical_relay_power(st);
    metric("relay_power", relay_power(sol, s.dc), rp.value, rp.std_error);
    const Estimate hp = empirical_harvested_power(st, spec.tau);
    metric("harvested_power", harvested_power(sol, ch, s.dc, spec.tau), hp.value, hp.std_error);
  }
  return rows;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ResultTable t;
  t.header = csv_columns();
  switch (spec.experiment) {
    case Experiment::kConvergence:
      t.rows = run_trials(spec.trials, spec.threads, [&](int k) { return convergence_trial(spec, k); });
      break;
    case Experiment::kSweepSourcePower:
    case Experiment::kSweepRelayAntennas:
      t.rows = run_trials(spec.trials, spec.threads, [&](int k) { return sweep_trial(spec, k); });
      break;
    case Experiment::kEhRegion:
    case Experiment::kEhAnRatio:
      t.rows = run_trials(spec.trials, spec.threads, [&](int k) { return eh_trial(spec, k); });
      break;
    case Experiment::kValidateSignalModel:
      t.rows = run_trials(spec.trials, spec.threads, [&](int k) { return signal_trial(spec, k); });
      break;
  }
  if (spec.experiment != Experiment::kValidateSignalModel && spec.experiment != Experiment::kConvergence) {
    Rows agg = aggregate(spec, t.rows);
    for (auto& r : agg) t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace secrelay
