#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "paththerm/error.hpp"

namespace paththerm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
  for (auto& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError("invalid value for " + key + ": '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw UsageError("invalid value for " + key + ": '" + text + "'");
}

State parse_state(const std::string& key, const std::string& text, std::size_t dimension) {
  State values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(parse_number<std::int64_t>(key, trim(item)));
  if (values.size() == 1 && dimension > 1) values.assign(dimension, values.front());
  if (values.size() != dimension) {
    throw UsageError(key + " needs " + std::to_string(dimension) + " component(s), got " + std::to_string(values.size()));
  }
  for (const auto v : values) {
    if (v < 0) throw UsageError(key + " components must be nonnegative");
  }
  return values;
}

std::pair<std::string, double> parse_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("parameter must look like name=value, got '" + text + "'");
  const std::string name = trim(text.substr(0, eq));
  if (name.empty()) throw UsageError("parameter must look like name=value, got '" + text + "'");
  return {name, parse_number<double>("parameter " + name, trim(text.substr(eq + 1)))};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::stringstream stream(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_number) + ": empty key");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

RunConfig resolve(const std::string& command, const Flags& flags, const std::optional<std::string>& env_seed) {
  static const std::set<std::string> known = {
      "model", "preset", "param",  "xmax",  "x0",     "t_final", "window",  "n_windows",      "burn_in",
      "chains", "seed", "mode",    "out",   "jobs",   "kind",    "steps",   "events",         "compare",
      "check",  "require_simple",  "no_trajectory"};

  std::map<std::string, std::string> file;
  std::vector<std::string> file_params;
  if (flags.config) {
    for (auto& [key, value] : parse_config_text(read_file(*flags.config))) {
      if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
      if (key == "param") {
        file_params.push_back(value);
      } else {
        file[key] = value;
      }
    }
  }
  auto from_file = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = file.find(key);
    if (it == file.end()) return std::nullopt;
    return it->second;
  };
  auto text_value = [&](const std::optional<std::string>& flag, const std::string& key) {
    return flag ? flag : from_file(key);
  };
  auto bool_value = [&](bool flag, const std::string& key) {
    if (flag) return true;
    const auto v = from_file(key);
    return v ? parse_bool(key, *v) : false;
  };
  auto number_value = [&]<typename T>(const std::optional<T>& flag, const std::string& key) -> std::optional<T> {
    if (flag) return flag;
    if (const auto v = from_file(key)) return parse_number<T>(key, *v);
    return std::nullopt;
  };

  RunConfig config;
  config.command = command;

  std::optional<std::string> model = flags.model;
  std::optional<std::string> preset_name = flags.preset;
  if (!model && !preset_name) {
    model = from_file("model");
    preset_name = from_file("preset");
  }
  if (model && preset_name) throw UsageError("--model and --preset are mutually exclusive");
  if (!model && !preset_name) throw UsageError("one of --model or --preset is required");

  std::vector<std::string> all_params = file_params;
  all_params.insert(all_params.end(), flags.params.begin(), flags.params.end());
  for (const auto& p : all_params) {
    const auto [name, value] = parse_param(p);
    config.params.insert_or_assign(name, value);
  }

  std::optional<PresetModel> preset;
  if (model) {
    if (!config.params.empty()) throw UsageError("--param applies to presets only");
    config.model_file = *model;
    config.network = std::make_shared<const ReactionNetwork>(load_network_file(*model));
  } else {
    config.preset = *preset_name;
    preset = preset_model(*preset_name, config.params);
    config.network = std::make_shared<const ReactionNetwork>(preset->network);
    config.window = preset->window;
  }
  const std::size_t dimension = config.network->dimension();

  if (const auto v = text_value(flags.xmax, "xmax")) {
    config.xmax = parse_state("xmax", *v, dimension);
  } else if (preset) {
    config.xmax = preset->box_upper;
  } else if (command != "inspect") {
    throw UsageError("--xmax is required with --model");
  }
  if (const auto v = text_value(flags.x0, "x0")) {
    config.x0 = parse_state("x0", *v, dimension);
  } else if (preset) {
    config.x0 = preset->initial_state;
  } else {
    config.x0.assign(dimension, 0);
  }

  if (const auto v = number_value(flags.window, "window")) config.window = *v;
  const auto t_final = number_value(flags.t_final, "t_final");
  if (t_final) {
    config.t_final = *t_final;
    config.t_final_given = true;
  }
  if (const auto v = number_value(flags.n_windows, "n_windows")) config.n_windows = *v;
  config.burn_in = number_value(flags.burn_in, "burn_in");
  if (const auto v = number_value(flags.chains, "chains")) config.chains = *v;
  if (const auto v = number_value(flags.jobs, "jobs")) config.jobs = *v;
  if (const auto v = number_value(flags.steps, "steps")) config.steps = *v;
  config.events = number_value(flags.events, "events");

  if (flags.seed) {
    config.seed = *flags.seed;
    config.seed_source = "flag";
  } else if (const auto v = from_file("seed")) {
    config.seed = parse_number<std::uint64_t>("seed", *v);
    config.seed_source = "config";
  } else if (env_seed) {
    config.seed = parse_number<std::uint64_t>("PATHTHERM_SEED", trim(*env_seed));
    config.seed_source = "env";
  }

  if (const auto v = text_value(flags.mode, "mode")) {
    try {
      config.mode = parse_ssa_mode(*v);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }
  if (const auto v = text_value(flags.kind, "kind")) {
    try {
      config.kind = parse_z_kind(*v);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }
  if (const auto v = text_value(flags.out, "out")) {
    config.out = *v;
    config.out_given = true;
  }
  config.compare = bool_value(flags.compare, "compare");
  config.check = bool_value(flags.check, "check");
  config.require_simple = bool_value(flags.require_simple, "require_simple");
  config.no_trajectory = bool_value(flags.no_trajectory, "no_trajectory");

  if (!(config.window > 0.0)) throw UsageError("--window must be positive");
  if (!(config.t_final > 0.0)) throw UsageError("--t-final must be positive");
  if (t_final && config.window > config.t_final) throw UsageError("--window must not exceed --t-final");
  if (config.burn_in && !(*config.burn_in >= 0.0)) throw UsageError("--burn-in must be nonnegative");
  if (config.n_windows < 1) throw UsageError("--n-windows must be at least 1");
  if (config.chains < 1) throw UsageError("--chains must be at least 1");
  if (config.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (config.events && *config.events < 1) throw UsageError("--events must be at least 1");
  return config;
}

void write_run_json(const RunConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw UsageError("cannot create output directory '" + config.out + "': " + ec.message());

  nlohmann::ordered_json j;
  j["command"] = config.command;
  if (config.model_file.empty()) {
    j["preset"] = config.preset;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.params) params[k] = v;
    j["params"] = params;
  } else {
    j["model"] = config.model_file;
  }
  j["network"] = serialize_network(*config.network);
  j["xmax"] = config.xmax;
  j["x0"] = config.x0;
  j["t_final"] = config.t_final;
  j["window"] = config.window;
  j["n_windows"] = config.n_windows;
  if (config.burn_in) {
    j["burn_in"] = *config.burn_in;
  } else {
    j["burn_in"] = "auto";
  }
  j["chains"] = config.chains;
  j["seed"] = config.seed;
  j["seed_source"] = config.seed_source;
  j["mode"] = to_string(config.mode);
  j["jobs"] = config.jobs;
  j["kind"] = to_string(config.kind);
  j["steps"] = config.steps;
  if (config.events) j["events"] = *config.events;
  j["compare"] = config.compare;
  j["check"] = config.check;
  j["require_simple"] = config.require_simple;
  j["no_trajectory"] = config.no_trajectory;

  const auto path = fs::path(config.out) / "run.json";
  std::ofstream out(path);
  if (!out) throw UsageError("output directory '" + config.out + "' is not writable");
  out << j.dump(2) << '\n';
}

}  // namespace paththerm::cli
