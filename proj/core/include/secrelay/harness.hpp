#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "secrelay/channel.hpp"
#include "secrelay/eh.hpp"
#include "secrelay/purify.hpp"
#include "secrelay/solver.hpp"

namespace secrelay {

enum class Experiment {
  kConvergence,
  kSweepSourcePower,
  kSweepRelayAntennas,
  kEhRegion,
  kEhAnRatio,
  kValidateSignalModel,
};

const char* to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// One solver configuration of the convergence experiment.
struct SolverVariant {
  std::string name;  // "exact", "L1", "L3", "L5", "variable", ...
  InnerBudget inner;
};

/// Everything an experiment run needs. Powers, noise levels and variances
/// are linear here; the JSON reader converts `_db` / `_dbm` fields once.
struct ExperimentSpec {
  Experiment experiment = Experiment::kConvergence;
  std::uint64_t seed = 1;
  int trials = 1;
  int threads = 1;
  std::string output;  // empty: stdout

  NetworkSettings network;  // p_A = p_B = source power
  double relay_power = 10.0;
  std::vector<double> kappas{0.1};
  std::vector<Duplex> duplex{Duplex::kFull};
  bool an_enabled = true;

  SolverOptions solver;
  std::vector<SolverVariant> variants;  // convergence only

  // Sweep axis: source power, relay antennas, or EH threshold. Values are
  // linear; labels keep the numbers as written (e.g. in dB) for the CSV.
  std::string sweep_name;
  std::vector<double> sweep_values;
  std::vector<double> sweep_labels;

  double tau = 0.1;
  int max_resamples = 50;

  int num_blocks = 100000;
  bool include_direct_links = true;

  // Stationarity residual a solution row must meet to be reported "ok".
  double certify_tol = 1e-4;
  bool timing = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Defaults of each experiment family (the paper's simulation settings).
ExperimentSpec default_spec(Experiment e);

/// Reads a JSON document on top of default_spec(experiment). Unknown keys are
/// rejected. Throws ConfigError.
ExperimentSpec parse_spec(std::string_view json_text, std::string_view experiment_override = {});
ExperimentSpec load_spec(const std::string& path, std::string_view experiment_override = {});

/// 10^(x / 10); used for both dB and dBm inputs.
double from_db(double x);

struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 if absent
  const std::string& at(std::size_t row, std::string_view col) const;
  double number(std::size_t row, std::string_view col) const;  // NaN if empty

  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

/// The fixed CSV column set, in order.
const std::vector<std::string>& csv_columns();

ResultTable run_experiment(const ExperimentSpec& spec);

/// Solve -> rank reduction -> rank-two extraction, with the certificates of one run.
struct InstanceSolution {
  std::string status = "ok";
  DerivedConstants dc;
  SolveResult solve;
  Purified purified;
  double secrecy_rate = 0.0;  // unclipped
  double relay_power = 0.0;
  double harvested_power = 0.0;
  double an_ratio = 0.0;
  double stationarity_residual = 0.0;
};

/// FD or HD solve of one instance from the default initializer. FD with
/// N <= M reports status "no_nulling_dims" and the all-zero design.
InstanceSolution solve_instance(const ChannelSet& ch, Duplex duplex, const SolverOptions& opts, double tau = 0.1);

/// Same pipeline under tau (relay power at Eve + theta1) >= epsilon. A null
/// `init` means the projected default initializer. Infeasible thresholds
/// report status "infeasible_eh".
InstanceSolution solve_instance_eh(const ChannelSet& ch, Duplex duplex, const SolverOptions& opts, double tau,
                                   double epsilon, const IteratePoint* init = nullptr);

/// HD baseline: kappa ignored, no nulling (V0 = I), HD Eve rate, rates halved.
InstanceSolution half_duplex_solve(const ChannelSet& ch, const SolverOptions& opts);

/// Tr(Q0) / (zeta Tr(W0 W0^H) + Tr(Q0)); 0 when nothing is transmitted.
double an_power_ratio(const RelaySolution& sol, const DerivedConstants& dc);

/// Deterministic channel seed of trial `trial` under master seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

}  // namespace secrelay
