#ifndef PATHTHERM_TOOLS_CLI_HPP
#define PATHTHERM_TOOLS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paththerm/network.hpp"
#include "paththerm/path_entropy.hpp"
#include "paththerm/presets.hpp"
#include "paththerm/ssa.hpp"

namespace paththerm::cli {

enum ExitCode : int { ok = 0, usage = 1, numerical = 2, check_failed = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values as given on the command line; unset means "not given".
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> model;
  std::optional<std::string> preset;
  std::vector<std::string> params;
  std::optional<std::string> xmax;
  std::optional<std::string> x0;
  std::optional<double> t_final;
  std::optional<double> window;
  std::optional<std::size_t> n_windows;
  std::optional<double> burn_in;
  std::optional<std::size_t> chains;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  std::optional<std::string> kind;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> events;
  bool compare = false;
  bool check = false;
  bool require_simple = false;
  bool no_trajectory = false;
};

/// Effective configuration after merging flags, config file and defaults.
struct RunConfig {
  std::string command;
  std::string model_file;  // empty when a preset is used
  std::string preset;
  ParameterMap params;
  NetworkPtr network;
  State xmax;
  State x0;
  double t_final = 1000.0;
  bool t_final_given = false;
  double window = 1.0;
  std::size_t n_windows = 10'000;
  std::optional<double> burn_in;  // unset: derived from the relaxation time
  std::size_t chains = 8;
  std::uint64_t seed = 1;
  std::string seed_source = "default";
  SsaMode mode = SsaMode::direct;
  std::string out = ".";
  bool out_given = false;
  std::size_t jobs = 1;
  ZKind kind = ZKind::lumped;
  std::size_t steps = 4;
  std::optional<std::size_t> events;
  bool compare = false;
  bool check = false;
  bool require_simple = false;
  bool no_trajectory = false;
};

/// Flat `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
/// Repeated `param = k=v` lines accumulate.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// Merges flags over the config file over preset defaults and validates.
/// `env_seed` is the value of PATHTHERM_SEED, if set.
RunConfig resolve(const std::string& command, const Flags& flags, const std::optional<std::string>& env_seed);

/// Writes `run.json` with the effective configuration into `config.out`.
void write_run_json(const RunConfig& config);

int cmd_inspect(const RunConfig& config, std::ostream& out);
int cmd_stationary(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_ft(const RunConfig& config, std::ostream& out);
int cmd_reversibility(const RunConfig& config, std::ostream& out);

/// Full command line (without the program name). Returns the exit code;
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace paththerm::cli

#endif  // PATHTHERM_TOOLS_CLI_HPP
