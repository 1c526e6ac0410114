#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "secrelay/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
};

int run(secrelay::Experiment e, const Overrides& o) {
  using namespace secrelay;
  ExperimentSpec spec = o.config.empty() ? default_spec(e) : load_spec(o.config, to_string(e));
  if (o.seed) spec.seed = *o.seed;
  if (o.trials) spec.trials = *o.trials;
  if (o.threads) spec.threads = *o.threads;
  if (!o.out.empty()) spec.output = o.out;
  spec.validate();

  const ResultTable table = run_experiment(spec);
  if (spec.output.empty() || spec.output == "-") {
    table.write_csv(std::cout);
    return 0;
  }
  std::ofstream f(spec.output, std::ios::binary);
  if (!f) throw Error("cannot open '" + spec.output + "' for writing");
  table.write_csv(f);
  if (!f.flush()) throw Error("write to '" + spec.output + "' failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using secrelay::Experiment;
  CLI::App app{"Secure FD two-way relay beamforming: experiment driver"};
  app.require_subcommand(1);

  Overrides o;
  const Experiment all[] = {Experiment::kConvergence,   Experiment::kSweepSourcePower, Experiment::kSweepRelayAntennas,
                            Experiment::kEhRegion,      Experiment::kEhAnRatio,        Experiment::kValidateSignalModel};
  std::optional<Experiment> chosen;
  for (Experiment e : all) {
    CLI::App* sub = app.add_subcommand(secrelay::to_string(e));
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "CSV output path (default: stdout)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--trials", o.trials, "number of Monte Carlo trials")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&chosen, e] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    return run(*chosen, o);
  } catch (const secrelay::ConfigError& err) {
    std::cerr << "secrelay: configuration error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "secrelay: " << err.what() << '\n';
    return 1;
  }
}
