#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "paththerm/error.hpp"

namespace paththerm::cli {

namespace {

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "Flat key = value file; flags override it");
  sub.add_option("--model", f.model, "Network description file");
  sub.add_option("--preset", f.preset, "Built-in model name");
  sub.add_option("--param", f.params, "Preset parameter name=value (repeatable)");
  sub.add_option("--xmax", f.xmax, "Box upper bound, one value or a comma list");
  sub.add_option("--x0", f.x0, "Initial state, comma list");
  sub.add_option("--t-final", f.t_final, "Simulated time");
  sub.add_option("--window", f.window, "Window length tau");
  sub.add_option("--n-windows", f.n_windows, "Number of stationary windows");
  sub.add_option("--seed", f.seed, "Master seed (fallback: PATHTHERM_SEED)");
  sub.add_option("--mode", f.mode, "direct or two_stage");
  sub.add_option("--out", f.out, "Output directory");
  sub.add_option("--jobs", f.jobs, "Worker threads for trajectory ensembles");
  sub.add_flag("--check", f.check, "Exit 3 when the command's assertion fails");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path-level stochastic thermodynamics of chemical reaction networks", "paththerm"};
  app.require_subcommand(1);
  Flags f;

  auto* inspect = app.add_subcommand("inspect", "Channel groups and multigraph verdict");
  add_common(*inspect, f);
  inspect->add_flag("--require-simple", f.require_simple, "Exit 3 if two channels share a jump vector");

  auto* stationary = app.add_subcommand("stationary", "CME stationary distribution and detailed balance");
  add_common(*stationary, f);

  auto* simulate = app.add_subcommand("simulate", "Gillespie trajectory and occupation histogram");
  add_common(*simulate, f);
  simulate->add_option("--events", f.events, "Stop after this many jumps");
  simulate->add_option("--burn-in", f.burn_in, "Histogram starts at this time");
  simulate->add_flag("--compare", f.compare, "Total variation against the CME stationary distribution");
  simulate->add_flag("--no-trajectory", f.no_trajectory, "Skip trajectory.jsonl");

  auto* ft = app.add_subcommand("ft", "Fluctuation theorem and symmetry tests on stationary windows");
  add_common(*ft, f);
  ft->add_option("--kind", f.kind, "lumped or channel");
  ft->add_option("--burn-in", f.burn_in, "Burn-in per chain (default 20 relaxation times)");
  ft->add_option("--chains", f.chains, "Independent chains");

  auto* reversibility = app.add_subcommand("reversibility", "Enumerate discretized paths and compare reversals");
  add_common(*reversibility, f);
  reversibility->add_option("--steps", f.steps, "Steps per path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    std::optional<std::string> env_seed;
    if (const char* s = std::getenv("PATHTHERM_SEED")) env_seed = s;
    const auto config = resolve(command, f, env_seed);
    if (command != "inspect" || config.out_given) write_run_json(config);
    if (command == "inspect") return cmd_inspect(config, out);
    if (command == "stationary") return cmd_stationary(config, out);
    if (command == "simulate") return cmd_simulate(config, out);
    if (command == "ft") return cmd_ft(config, out);
    return cmd_reversibility(config, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical;
  } catch (const CheckFailure& e) {
    err << "check failed: " << e.what() << '\n';
    return check_failed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return numerical;
  }
}

}  // namespace paththerm::cli
