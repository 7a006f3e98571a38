#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trotterkit/cli.hpp"
#include "trotterkit/parallel.hpp"

namespace tk = trotterkit;

namespace {

struct Flags {
  std::string scenario;
  std::string out = "out";
  std::uint64_t seed = 42;
  std::size_t trials = 50;
  std::size_t maxStates = 4;
  std::string probe;
  std::optional<double> t;
  std::optional<unsigned> dyadic;
  std::optional<std::size_t> linear;
  std::string order;
  std::string metric;
  bool seedGiven = false;
};

tk::ScenarioOverrides overrides_of(const Flags& f) {
  tk::ScenarioOverrides ov;
  ov.t = f.t;
  ov.dyadic = f.dyadic;
  ov.linear = f.linear;
  if (f.order == "12") ov.order = tk::Order::g1_first;
  if (f.order == "21") ov.order = tk::Order::g2_first;
  if (!f.metric.empty()) ov.metric = f.metric;
  if (f.seedGiven) ov.seed = f.seed;
  return ov;
}

void add_scenario_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "scenario JSON file")->required();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--t", f.t, "time horizon override");
  auto* dy = cmd->add_option("--dyadic", f.dyadic, "schedule 2^0..2^K");
  auto* li = cmd->add_option("--linear", f.linear, "schedule 1..N");
  dy->excludes(li);
  cmd->add_option("--order", f.order, "composition order")->check(CLI::IsMember({"12", "21"}));
  cmd->add_option("--metric", f.metric, "metric for the modulus")->check(CLI::IsMember({"base", "envelope"}));
  cmd->add_option("--seed", f.seed, "random seed")->each([&f](const std::string&) { f.seedGiven = true; });
}

}  // namespace

int main(int argc, char** argv) {
  tk::configure_threads_from_env();
  CLI::App app{"Lie-Trotter splitting toolkit for Markov semigroups on measures"};
  app.set_version_flag("--version", std::string(tk::kToolVersion));
  app.require_subcommand(1);

  Flags f;
  auto* study = app.add_subcommand("study", "run a splitting study");
  add_scenario_flags(study, f);

  auto* ids = app.add_subcommand("identities", "verify the telescoping and order-swap identities");
  ids->add_option("--seed", f.seed, "random seed");
  ids->add_option("--trials", f.trials, "number of random instances");
  ids->add_option("--max-states", f.maxStates, "largest state count");
  ids->add_option("--out", f.out, "output .json file or directory");
  std::string replay;
  ids->add_option("--replay", replay, "rerun a serialized instance");

  auto* diag = app.add_subcommand("diagnostics", "emit a diagnostic evidence table");
  add_scenario_flags(diag, f);
  diag->add_option("--probe", f.probe, "probe name")
      ->required()
      ->check(CLI::IsMember({"equicontinuity", "tightness", "feller", "semigroup", "stochastic"}));

  auto* norm = app.add_subcommand("norm", "BL distance between two measure files");
  std::string a, b, normOut;
  norm->add_option("--scenario", f.scenario, "scenario providing the state space")->required();
  norm->add_option("a", a, "first measure JSON")->required();
  norm->add_option("b", b, "second measure JSON")->required();
  norm->add_option("--out", normOut, "optional JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tk::kExitInputError;
  }

  if (*study) return tk::run_study(f.scenario, f.out, overrides_of(f), std::cerr);
  if (*ids) {
    if (!replay.empty()) return tk::replay_identity_instance(replay, f.out, std::cerr);
    return tk::run_identities(f.seed, f.trials, f.maxStates, f.out, std::cerr);
  }
  if (*diag) return tk::run_diagnostics(f.scenario, f.probe, f.out, overrides_of(f), std::cerr);
  if (*norm) return tk::run_norm(f.scenario, a, b, normOut, std::cout);
  return tk::kExitInputError;
}
