#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "paththerm/cme.hpp"
#include "paththerm/error.hpp"
#include "paththerm/generator.hpp"
#include "paththerm/rng.hpp"
#include "paththerm/state_box.hpp"
#include "paththerm/stats.hpp"
#include "paththerm/trajectory.hpp"
#include "paththerm/windows.hpp"

namespace paththerm::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kBalanceTolerance = 1e-10;
constexpr double kTruncationThreshold = 1e-10;
constexpr double kReversibilityTolerance = 1e-10;
constexpr double kTvLimit = 0.02;
constexpr double kSignificance = 0.01;

std::string output_path(const RunConfig& config, const std::string& name) {
  return (std::filesystem::path(config.out) / name).string();
}

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  std::ofstream out(output_path(config, name));
  if (!out) throw UsageError("cannot write " + output_path(config, name));
  return out;
}

void write_json(const RunConfig& config, const std::string& name, const Json& j) {
  open_output(config, name) << j.dump(2) << '\n';
}

std::shared_ptr<const Generator> build(const RunConfig& config) {
  const auto box = make_box(*config.network, config.xmax, config.x0);
  return std::make_shared<const Generator>(build_generator(config.network, box));
}

Json box_json(const StateBox& box) {
  Json j;
  j["lower"] = box.lower();
  j["upper"] = box.upper();
  j["states"] = box.size();
  j["reachable_only"] = box.restricted();
  return j;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

int cmd_inspect(const RunConfig& config, std::ostream& out) {
  const auto& net = *config.network;
  const ChannelGrouping grouping(net);

  out << "species:";
  for (std::size_t i = 0; i < net.dimension(); ++i) out << ' ' << net.dynamic_name(i);
  out << "\nreactions: " << net.reaction_count() << "\nreverse pairing: " << (net.has_reverse_pairing() ? "yes" : "no")
      << "\nchannel groups:\n";

  Json groups = Json::array();
  for (std::size_t g = 0; g < grouping.groups().size(); ++g) {
    const auto& group = grouping.groups()[g];
    const bool shared = group.members.size() > 1;
    out << "  [" << g << "] jump " << format_jump(group.jump) << " reactions";
    for (const auto r : group.members) out << ' ' << r;
    if (shared) out << "  MULTIGRAPH";
    out << '\n';
    Json jg;
    jg["jump"] = format_jump(group.jump);
    jg["reactions"] = group.members;
    jg["multigraph"] = shared;
    groups.push_back(jg);
  }
  const bool multigraph = grouping.multigraph();
  out << "verdict: " << (multigraph ? "multigraph" : "simple") << '\n';

  if (config.out_given) {
    Json j;
    j["species"] = Json::array();
    for (std::size_t i = 0; i < net.dimension(); ++i) j["species"].push_back(net.dynamic_name(i));
    j["reactions"] = net.reaction_count();
    j["reverse_pairing"] = net.has_reverse_pairing();
    j["groups"] = groups;
    j["verdict"] = multigraph ? "multigraph" : "simple";
    write_json(config, "inspect.json", j);
  }
  if (config.require_simple && multigraph) {
    throw CheckFailure("network has channels sharing a jump vector (--require-simple)");
  }
  return ok;
}

int cmd_stationary(const RunConfig& config, std::ostream& out) {
  const auto generator = build(config);
  const auto p = stationary(*generator);
  {
    auto csv = open_output(config, "stationary.csv");
    write_distribution_csv(csv, p);
  }
  const double residual = stationary_residual(*generator, p);
  const double boundary = boundary_mass(*generator, p);
  const double balance = detailed_balance_residual(*generator, p);
  const bool balanced = balance <= kBalanceTolerance;

  Json j;
  j["box"] = box_json(generator->box());
  j["residual"] = residual;
  j["boundary_mass"] = boundary;
  j["truncation_adequate"] = boundary < kTruncationThreshold;
  j["detailed_balance_residual"] = balance;
  j["detailed_balance"] = balanced ? "satisfied" : "detailed balance violated";
  if (config.network->has_reverse_pairing()) {
    try {
      j["entropy_production_rate"] = mean_entropy_production_rate(*generator, p);
    } catch (const NumericalError& e) {
      j["entropy_production_rate"] = nullptr;
      j["entropy_production_note"] = e.what();
    }
  } else {
    j["entropy_production_rate"] = nullptr;
    j["entropy_production_note"] = "network has no reverse pairing";
  }
  j["gibbs_shannon_entropy"] = gibbs_shannon_entropy(p);
  j["relaxation_time"] = relaxation_time(*generator);
  write_json(config, "stationary_report.json", j);

  out << "states: " << generator->size() << "\nresidual: " << residual << "\nboundary mass: " << boundary
      << "\ndetailed balance residual: " << balance << (balanced ? "" : "  (detailed balance violated)") << '\n';

  require_adequate_truncation(*generator, p, kTruncationThreshold);
  if (config.check && !balanced) {
    std::ostringstream message;
    message << "detailed balance residual " << balance << " exceeds 1e-10";
    throw CheckFailure(message.str());
  }
  return ok;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  RngStream rng(config.seed, 0);
  double t_final = config.t_final;
  if (config.events && !config.t_final_given) t_final = std::numeric_limits<double>::infinity();
  const auto trajectory =
      simulate(config.network, config.x0, t_final, rng, config.mode,
               config.events.value_or(std::numeric_limits<std::size_t>::max()));

  if (!config.no_trajectory) {
    auto jsonl = open_output(config, "trajectory.jsonl");
    write_trajectory_jsonl(jsonl, trajectory, config.seed, 0);
  }

  const auto box = make_box(*config.network, config.xmax, config.x0);
  const double from = std::min(config.burn_in.value_or(0.0), trajectory.t_final());
  double outside = 0.0;
  auto occupation = occupation_times(trajectory, *box, from, &outside);
  double inside = 0.0;
  for (const double v : occupation) inside += v;
  const double observed = inside + outside;

  std::optional<Distribution> empirical;
  if (inside > 0.0) {
    empirical = Distribution::normalized(box, std::move(occupation));
  } else if (box->contains(trajectory.final_state())) {
    empirical = Distribution::delta(box, trajectory.final_state());
  }
  if (empirical) {
    auto csv = open_output(config, "histogram.csv");
    write_distribution_csv(csv, *empirical);
  }

  Json j;
  j["events"] = trajectory.event_count();
  j["t_final"] = trajectory.t_final();
  j["absorbed"] = trajectory.absorbed();
  j["final_state"] = trajectory.final_state();
  j["seed"] = config.seed;
  j["stream"] = 0;
  j["mode"] = to_string(config.mode);
  j["histogram_from"] = from;
  j["outside_box_fraction"] = observed > 0.0 ? outside / observed : 0.0;
  j["box"] = box_json(*box);

  out << "events: " << trajectory.event_count() << "\nt_final: " << trajectory.t_final() << '\n';
  if (trajectory.absorbed()) out << "absorbed: no reaction can fire in state " << Json(trajectory.final_state()).dump() << '\n';

  std::optional<double> tv;
  if (config.compare) {
    const auto generator = std::make_shared<const Generator>(build_generator(config.network, box));
    const auto p = stationary(*generator);
    if (empirical) {
      // Time spent outside the box counts against the agreement.
      const double in_share = observed > 0.0 ? inside / observed : 1.0;
      double sum = 1.0 - in_share;
      for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(in_share * (*empirical)[i] - p[i]);
      tv = 0.5 * sum;
    }
    j["tv_distance"] = tv ? Json(*tv) : Json(nullptr);
    j["tv_limit"] = kTvLimit;
    out << "total variation vs CME stationary: ";
    if (tv) {
      out << *tv << '\n';
    } else {
      out << "n/a\n";
    }
  }
  write_json(config, "simulate_report.json", j);

  if (config.check) {
    if (!config.compare) throw UsageError("--check for simulate needs --compare");
    if (!tv || !(*tv < kTvLimit)) throw CheckFailure("total variation distance is not below 0.02");
  }
  return ok;
}

int cmd_ft(const RunConfig& config, std::ostream& out) {
  if (config.kind == ZKind::conditional) throw UsageError("ft supports --kind lumped or channel");
  const auto generator = build(config);
  const auto p = stationary(*generator);
  require_adequate_truncation(*generator, p, kTruncationThreshold);

  std::optional<double> sigma_star;
  if (config.network->has_reverse_pairing()) {
    try {
      sigma_star = mean_entropy_production_rate(*generator, p);
    } catch (const NumericalError&) {
    }
  }
  const double relaxation = relaxation_time(*generator);

  WindowPlan plan;
  plan.window = config.window;
  plan.n_windows = config.n_windows;
  plan.burn_in = config.burn_in.value_or(20.0 * relaxation);
  plan.chains = config.chains;
  plan.jobs = config.jobs;
  plan.mode = config.mode;
  plan.seed = config.seed;
  const auto samples = stationary_windows(config.network, p, config.x0, plan, {config.kind});
  const auto values = values_of(samples.by_kind.front());

  const bool degenerate =
      std::all_of(values.begin(), values.end(), [](double v) { return std::abs(v) <= 1e-12; });
  const auto hist = histogram(values, BinSpec{degenerate ? 1.0 : 0.0, true});
  {
    auto csv = open_output(config, "zeta_histogram.csv");
    write_histogram_csv(csv, hist);
  }

  Json j;
  j["kind"] = to_string(config.kind);
  j["weighting"] = "stationary";
  j["n_samples"] = values.size();

  std::optional<FtResult> ft;
  std::string ft_note;
  if (degenerate) {
    ft_note = "every zeta is zero: with stationary endpoint weighting the state-level functional vanishes identically";
  } else {
    try {
      ft = ft_test(values);
    } catch (const Error& e) {
      ft_note = e.what();
    }
  }
  j["slope"] = ft ? Json(ft->slope) : Json(nullptr);
  j["slope_ci"] = ft ? Json::array({ft->ci_low, ft->ci_high}) : Json(nullptr);

  std::optional<TestResult> symmetry;
  std::string symmetry_note;
  if (!degenerate) {
    try {
      symmetry = symmetry_test(values);
    } catch (const Error& e) {
      symmetry_note = e.what();
    }
  }
  j["ks_stat"] = symmetry ? Json(symmetry->statistic) : Json(degenerate ? Json(0.0) : Json(nullptr));
  j["p_value"] = symmetry ? Json(symmetry->p_value) : Json(degenerate ? Json(1.0) : Json(nullptr));
  j["histogram"] = "zeta_histogram.csv";
  j["degenerate"] = degenerate;
  if (!ft_note.empty()) j["ft_note"] = ft_note;
  if (!symmetry_note.empty()) j["symmetry_note"] = symmetry_note;

  const auto mean = mean_estimate(values);
  const double rate = mean.mean / config.window;
  const double rate_se = mean.standard_error / config.window;
  j["mean"] = mean.mean;
  j["standard_error"] = mean.standard_error;
  j["mean_rate"] = rate;
  j["rate_standard_error"] = rate_se;
  j["sigma_star"] = sigma_star ? Json(*sigma_star) : Json(nullptr);
  // The lumped functional only targets sigma* when no two channels share a jump.
  const bool comparable = config.kind == ZKind::channel || !ChannelGrouping(*config.network).multigraph();
  const bool within = sigma_star && comparable && std::abs(rate - *sigma_star) <= 3.0 * rate_se;
  j["within_3sigma"] = sigma_star && comparable ? Json(within) : Json(nullptr);

  if (ft) {
    j["bin_width"] = ft->bin_width;
    j["used_pairs"] = ft->used_pairs;
    Json bins = Json::array();
    for (const auto& b : ft->bins) {
      Json jb;
      jb["zeta"] = b.zeta;
      jb["positive"] = b.positive;
      jb["negative"] = b.negative;
      jb["log_ratio"] = nullable(b.log_ratio);
      jb["used"] = b.used;
      bins.push_back(jb);
    }
    j["ft_bins"] = bins;
  }
  j["window"] = config.window;
  j["burn_in"] = plan.burn_in;
  j["relaxation_time"] = relaxation;
  j["chains"] = plan.chains;
  j["absorbed_windows"] = samples.absorbed_windows;
  j["events"] = samples.events;
  write_json(config, "ft_report.json", j);

  out << "kind: " << to_string(config.kind) << "\nsamples: " << values.size() << '\n';
  if (degenerate) out << "all zeta vanish (stationary weighting)\n";
  if (ft) out << "FT slope: " << ft->slope << " [" << ft->ci_low << ", " << ft->ci_high << "]\n";
  if (symmetry) out << "symmetry: D=" << symmetry->statistic << " p=" << symmetry->p_value << '\n';
  out << "mean rate: " << rate << " +- " << rate_se;
  if (sigma_star) out << "  (sigma* = " << *sigma_star << ")";
  out << '\n';

  if (config.check) {
    if (config.kind == ZKind::lumped) {
      if (!degenerate && !(ft && ft->covers(1.0) && ft->ci_low >= 0.9 && ft->ci_high <= 1.1)) {
        throw CheckFailure("FT slope interval does not cover 1 within [0.9, 1.1]");
      }
    } else {
      std::string failures;
      if (!(symmetry && symmetry->p_value > kSignificance)) failures += "symmetry rejected at 0.01; ";
      if (!within) failures += "mean rate not within 3 sigma of sigma*; ";
      if (!failures.empty()) throw CheckFailure(failures.substr(0, failures.size() - 2));
    }
  }
  return ok;
}

int cmd_reversibility(const RunConfig& config, std::ostream& out) {
  const auto generator = build(config);
  const auto p = stationary(*generator);
  const double dt = config.steps > 0 ? config.window / static_cast<double>(config.steps) : config.window;
  const auto report = reversibility_enumeration(*generator, p, dt, config.steps);
  const bool reversible = report.max_gap <= kReversibilityTolerance;

  Json j;
  j["box"] = box_json(generator->box());
  j["steps"] = report.steps;
  j["dt"] = report.dt;
  j["paths"] = report.paths;
  j["max_gap"] = report.max_gap;
  j["reversible"] = reversible;
  j["worst_path"] = report.worst_path;
  j["worst_forward"] = report.worst_forward;
  j["worst_reverse"] = report.worst_reverse;
  write_json(config, "reversibility_report.json", j);

  out << "paths: " << report.paths << "\nmax gap: " << report.max_gap << '\n';
  if (config.check && !reversible) throw CheckFailure("forward and reverse path probabilities differ");
  return ok;
}

}  // namespace paththerm::cli
