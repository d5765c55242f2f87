#include "paththerm/path_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "paththerm/cme.hpp"
#include "paththerm/error.hpp"
#include "paththerm/rng.hpp"

namespace paththerm {

namespace {

struct Neumaier {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = sum + v;
    c += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

double endpoint_log(const Distribution& p, std::span<const std::int64_t> state, const char* which) {
  const double v = p.at(state);
  if (!(v > 0.0)) throw NumericalError(std::string("Z undefined: zero ") + which + " probability at the path endpoint");
  return std::log(v);
}

double boundary_term(const Trajectory& trajectory, const Distribution& p_start, const Distribution& p_end) {
  const std::size_t dim = trajectory.initial_state().size();
  const auto* last = trajectory.state_after_ptr(trajectory.event_count());
  return endpoint_log(p_start, trajectory.initial_state(), "start") -
         endpoint_log(p_end, std::span<const std::int64_t>(last, dim), "end");
}

std::size_t grid_index(const StateBox& box, const State& state) {
  const auto index = box.index_of(state);
  if (!index) throw NumericalError("discretized path leaves the state box");
  return *index;
}

void check_grid(const DiscretizedPath& path, double dt) {
  if (path.times.size() != path.states.size() || path.times.empty()) {
    throw InputError("discretized path needs matching, nonempty times and states");
  }
  for (std::size_t i = 1; i < path.times.size(); ++i) {
    const double step = path.times[i] - path.times[i - 1];
    if (std::abs(step - dt) > 1e-9 * std::max(dt, 1e-300)) {
      throw InputError("grid spacing does not match the conditional table's dt");
    }
  }
}

struct FtFit {
  double slope = 0.0;
  std::size_t used = 0;
};

// counts/sums indexed by bin j + offset, j = round(z / w).
FtFit fit_pairs(const std::vector<std::size_t>& counts, const std::vector<double>& sums, std::size_t offset,
                std::size_t min_count, std::vector<FtBin>* table) {
  double num = 0.0;
  double den = 0.0;
  FtFit fit;
  const std::size_t half = offset;
  for (std::size_t j = 1; j <= half; ++j) {
    const std::size_t pos = counts[offset + j];
    const std::size_t neg = counts[offset - j];
    FtBin bin;
    bin.positive = pos;
    bin.negative = neg;
    if (pos > 0 && neg > 0) {
      bin.zeta = 0.5 * (sums[offset + j] / static_cast<double>(pos) - sums[offset - j] / static_cast<double>(neg));
      bin.log_ratio = std::log(static_cast<double>(pos) / static_cast<double>(neg));
    }
    bin.used = pos >= min_count && neg >= min_count;
    if (bin.used) {
      const double weight = 1.0 / (1.0 / static_cast<double>(pos) + 1.0 / static_cast<double>(neg));
      num += weight * bin.zeta * bin.log_ratio;
      den += weight * bin.zeta * bin.zeta;
      ++fit.used;
    }
    if (table && (pos > 0 || neg > 0)) table->push_back(bin);
  }
  if (fit.used > 0 && den > 0.0) fit.slope = num / den;
  else fit.used = 0;
  return fit;
}

}  // namespace

ZKind parse_z_kind(const std::string& text) {
  if (text == "lumped") return ZKind::lumped;
  if (text == "channel") return ZKind::channel;
  if (text == "conditional") return ZKind::conditional;
  throw InputError("unknown Z kind '" + text + "' (expected lumped, channel or conditional)");
}

std::string to_string(ZKind kind) {
  switch (kind) {
    case ZKind::lumped: return "lumped";
    case ZKind::channel: return "channel";
    case ZKind::conditional: return "conditional";
  }
  return "lumped";
}

std::vector<double> values_of(std::span<const ZSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.value);
  return out;
}

ZSample z_lumped(const Trajectory& trajectory, const ChannelGrouping& grouping, const Distribution& p_start,
                 const Distribution& p_end) {
  const auto& network = trajectory.network();
  const auto& groups = grouping.groups();
  Neumaier sum;
  for (std::size_t k = 0; k < trajectory.event_count(); ++k) {
    const std::size_t g = grouping.group_of(trajectory.events()[k].channel);
    const auto opposite = grouping.opposite(g);
    if (!opposite) {
      throw NumericalError("Z undefined: jump " + format_jump(groups[g].jump) + " has no reverse jump in the network");
    }
    const double forward = group_rate(network, groups[g], trajectory.state_after_ptr(k));
    const double backward = group_rate(network, groups[*opposite], trajectory.state_after_ptr(k + 1));
    if (!(backward > 0.0)) throw NumericalError("Z undefined: zero reverse rate along the path");
    sum.add(std::log(forward / backward));
  }
  sum.add(boundary_term(trajectory, p_start, p_end));
  return ZSample{sum.value(), 0.0, trajectory.t_final(), ZKind::lumped, EndpointWeighting::supplied};
}

ZSample z_lumped(const Trajectory& trajectory, const ChannelGrouping& grouping, const Distribution& stationary) {
  auto z = z_lumped(trajectory, grouping, stationary, stationary);
  z.weighting = EndpointWeighting::stationary;
  return z;
}

ZSample z_channel(const Trajectory& trajectory, const Distribution& p_start, const Distribution& p_end) {
  const auto& network = trajectory.network();
  if (!network.has_reverse_pairing()) throw InputError("channel-resolved Z needs a reverse-channel pairing");
  Neumaier sum;
  for (std::size_t k = 0; k < trajectory.event_count(); ++k) {
    const std::size_t r = trajectory.events()[k].channel;
    const double forward = network.propensity_unchecked(trajectory.state_after_ptr(k), r);
    const double backward = network.propensity_unchecked(trajectory.state_after_ptr(k + 1), network.reverse_channel(r));
    if (!(backward > 0.0)) {
      throw NumericalError("Z undefined: zero reverse rate for channel " + std::to_string(r) + " along the path");
    }
    sum.add(std::log(forward / backward));
  }
  sum.add(boundary_term(trajectory, p_start, p_end));
  return ZSample{sum.value(), 0.0, trajectory.t_final(), ZKind::channel, EndpointWeighting::supplied};
}

ZSample z_channel(const Trajectory& trajectory, const Distribution& stationary) {
  auto z = z_channel(trajectory, stationary, stationary);
  z.weighting = EndpointWeighting::stationary;
  return z;
}

ConditionalTable make_conditional_table(const Generator& generator, double dt) {
  return ConditionalTable{dt, generator.box_ptr(), conditional_matrix(generator, dt)};
}

ZSample z_conditional(const DiscretizedPath& path, const ConditionalTable& table, const Distribution& p_start,
                      const Distribution& p_end) {
  check_grid(path, table.dt);
  Neumaier sum;
  std::size_t prev = grid_index(*table.box, path.states.front());
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    const std::size_t next = grid_index(*table.box, path.states[i]);
    const double forward = table.matrix(static_cast<Eigen::Index>(next), static_cast<Eigen::Index>(prev));
    const double backward = table.matrix(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(next));
    if (!(forward > 0.0) || !(backward > 0.0)) {
      throw NumericalError("Z undefined: zero conditional probability on the grid (refine or enlarge dt)");
    }
    sum.add(std::log(forward / backward));
    prev = next;
  }
  sum.add(endpoint_log(p_start, path.states.front(), "start") - endpoint_log(p_end, path.states.back(), "end"));
  return ZSample{sum.value(), path.times.front(), path.times.back(), ZKind::conditional, EndpointWeighting::supplied};
}

ZSample z_conditional(const DiscretizedPath& path, const Generator& generator, const Distribution& p_start,
                      const Distribution& p_end) {
  const double dt = path.times.size() > 1 ? path.times[1] - path.times[0] : 0.0;
  return z_conditional(path, make_conditional_table(generator, dt), p_start, p_end);
}

double path_log_probability(const DiscretizedPath& path, const ConditionalTable& table, const Distribution& p0) {
  check_grid(path, table.dt);
  Neumaier sum;
  sum.add(endpoint_log(p0, path.states.front(), "initial"));
  std::size_t prev = grid_index(*table.box, path.states.front());
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    const std::size_t next = grid_index(*table.box, path.states[i]);
    const double p = table.matrix(static_cast<Eigen::Index>(next), static_cast<Eigen::Index>(prev));
    if (!(p > 0.0)) throw NumericalError("path has a zero conditional probability factor");
    sum.add(std::log(p));
    prev = next;
  }
  return sum.value();
}

double path_log_probability(const DiscretizedPath& path, const Generator& generator, const Distribution& p0) {
  const double dt = path.times.size() > 1 ? path.times[1] - path.times[0] : 0.0;
  return path_log_probability(path, make_conditional_table(generator, dt), p0);
}

ReversibilityReport reversibility_enumeration(const Generator& generator, const Distribution& stationary, double dt,
                                              std::size_t steps, std::size_t max_paths) {
  const std::size_t n = generator.size();
  if (n > 10'000) throw InputError("reversibility enumeration needs a box of at most 10^4 states");
  if (steps > 6) throw InputError("reversibility enumeration supports at most 6 steps");
  if (stationary.size() != n) throw InputError("stationary distribution lives on a different box");
  ReversibilityReport report;
  report.steps = steps;
  report.dt = dt;

  std::vector<double> log_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_p[i] = stationary[i] > 0.0 ? std::log(stationary[i]) : -std::numeric_limits<double>::infinity();
  }
  if (steps == 0) {
    for (std::size_t i = 0; i < n; ++i) report.paths += stationary[i] > 0.0 ? 1 : 0;
    return report;
  }

  const Eigen::MatrixXd c = conditional_matrix(generator, dt);
  // Column lists of positive entries with their logs.
  std::vector<std::vector<std::pair<std::size_t, double>>> successors(n);
  Eigen::MatrixXd log_c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t from = 0; from < n; ++from) {
    for (std::size_t to = 0; to < n; ++to) {
      const double v = c(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
      log_c(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) =
          v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
      if (v > 0.0) successors[from].emplace_back(to, std::log(v));
    }
  }

  std::vector<std::size_t> path(steps + 1);
  std::vector<std::size_t> worst;
  double worst_forward = 0.0;
  double worst_reverse = 0.0;

  // Iterative DFS; forward/reverse partial sums per depth.
  std::vector<double> forward(steps + 1);
  std::vector<double> backward(steps + 1);
  std::vector<std::size_t> cursor(steps + 1);
  for (std::size_t x0 = 0; x0 < n; ++x0) {
    if (!(stationary[x0] > 0.0)) continue;
    path[0] = x0;
    forward[0] = log_p[x0];
    backward[0] = 0.0;
    std::size_t depth = 1;
    cursor[1] = 0;
    while (depth > 0) {
      const std::size_t from = path[depth - 1];
      const auto& succ = successors[from];
      if (cursor[depth] >= succ.size()) {
        --depth;
        continue;
      }
      const auto [to, lf] = succ[cursor[depth]++];
      path[depth] = to;
      forward[depth] = forward[depth - 1] + lf;
      backward[depth] = backward[depth - 1] + log_c(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
      if (depth < steps) {
        ++depth;
        cursor[depth] = 0;
        continue;
      }
      if (++report.paths > max_paths) {
        throw InputError("enumeration budget exceeded: more than " + std::to_string(max_paths) + " paths");
      }
      const double reverse = backward[depth] + log_p[to];
      const double gap = std::isfinite(reverse) ? std::abs(forward[depth] - reverse)
                                                : std::numeric_limits<double>::infinity();
      if (gap > report.max_gap || worst.empty()) {
        report.max_gap = std::max(report.max_gap, gap);
        worst = path;
        worst_forward = forward[depth];
        worst_reverse = reverse;
      }
    }
  }
  for (const auto i : worst) report.worst_path.push_back(generator.box().state(i));
  report.worst_forward = worst_forward;
  report.worst_reverse = worst_reverse;
  return report;
}

Histogram histogram(std::span<const double> samples, const BinSpec& spec) {
  if (samples.empty()) throw InputError("histogram of an empty sample");
  for (const double v : samples) {
    if (!std::isfinite(v)) throw InputError("histogram sample is not finite");
  }
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *min_it;
  const double hi = *max_it;
  double width = spec.width > 0.0 ? spec.width : freedman_diaconis_width(samples);
  if (!(width > 0.0)) {
    const double span = spec.symmetric ? std::max(std::abs(lo), std::abs(hi)) : hi - lo;
    width = span > 0.0 ? span / (std::ceil(std::log2(static_cast<double>(samples.size()))) + 1.0) : 1.0;
  }
  Histogram h;
  h.total = samples.size();
  if (spec.symmetric) {
    const double reach = std::max(std::abs(lo), std::abs(hi));
    const auto half = static_cast<std::int64_t>(std::max(0.0, std::ceil(reach / width - 0.5)));
    if (half > 5'000'000) throw InputError("histogram would need more than 10^7 bins");
    const auto bins = static_cast<std::size_t>(2 * half + 1);
    h.counts.assign(bins, 0);
    for (std::size_t k = 0; k <= bins; ++k) {
      h.edges.push_back((static_cast<double>(k) - static_cast<double>(half) - 0.5) * width);
    }
    for (const double v : samples) {
      const auto j = std::clamp<std::int64_t>(std::llround(v / width), -half, half);
      ++h.counts[static_cast<std::size_t>(j + half)];
    }
    return h;
  }
  if (hi == lo) {
    h.edges = {lo - 0.5 * width, lo + 0.5 * width};
    h.counts = {samples.size()};
    return h;
  }
  const double bins_real = std::max(1.0, std::ceil((hi - lo) / width));
  if (bins_real > 1e7) throw InputError("histogram would need more than 10^7 bins");
  const auto bins = static_cast<std::size_t>(bins_real);
  h.counts.assign(bins, 0);
  for (std::size_t k = 0; k <= bins; ++k) h.edges.push_back(lo + static_cast<double>(k) * width);
  for (const double v : samples) {
    const auto k = std::min(static_cast<std::size_t>((v - lo) / width), bins - 1);
    ++h.counts[k];
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
  const auto old = out.precision(17);
  out << "bin_left,bin_right,count\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    out << hist.edges[k] << ',' << hist.edges[k + 1] << ',' << hist.counts[k] << '\n';
  }
  out.precision(old);
}

FtResult ft_test(std::span<const double> samples, const FtOptions& options) {
  if (samples.size() < options.min_samples) {
    throw InputError("fluctuation test needs at least " + std::to_string(options.min_samples) + " samples, got " +
                     std::to_string(samples.size()));
  }
  double width = options.bin_width > 0.0 ? options.bin_width : freedman_diaconis_width(samples);
  FtResult result;
  result.n_samples = samples.size();
  if (!(width > 0.0)) throw NumericalError("no usable bin pairs: samples have zero spread");
  result.bin_width = width;

  std::int64_t half = 0;
  std::vector<std::int64_t> bin_of(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) throw InputError("fluctuation test sample is not finite");
    bin_of[i] = std::llround(samples[i] / width);
    half = std::max(half, std::abs(bin_of[i]));
  }
  if (half > 5'000'000) throw InputError("fluctuation test would need more than 10^7 bins");
  const auto offset = static_cast<std::size_t>(half);
  std::vector<std::size_t> counts(2 * offset + 1, 0);
  std::vector<double> sums(2 * offset + 1, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto k = static_cast<std::size_t>(bin_of[i] + half);
    ++counts[k];
    sums[k] += samples[i];
  }
  const FtFit fit = fit_pairs(counts, sums, offset, options.min_count, &result.bins);
  if (fit.used == 0) throw NumericalError("no usable bin pairs (each side needs " + std::to_string(options.min_count) + " counts)");
  result.slope = fit.slope;
  result.used_pairs = fit.used;

  RngStream rng(options.seed, 0);
  std::vector<double> slopes;
  slopes.reserve(options.bootstrap);
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    std::fill(counts.begin(), counts.end(), 0);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto pick = static_cast<std::size_t>(rng.below(samples.size()));
      const auto k = static_cast<std::size_t>(bin_of[pick] + half);
      ++counts[k];
      sums[k] += samples[pick];
    }
    const FtFit resampled = fit_pairs(counts, sums, offset, options.min_count, nullptr);
    if (resampled.used > 0) slopes.push_back(resampled.slope);
  }
  if (slopes.empty()) {
    result.ci_low = result.ci_high = result.slope;
    return result;
  }
  std::sort(slopes.begin(), slopes.end());
  result.ci_low = sorted_quantile(slopes, options.significance / 2.0);
  result.ci_high = sorted_quantile(slopes, 1.0 - options.significance / 2.0);
  return result;
}

TestResult symmetry_test(std::span<const double> samples, std::size_t min_samples) {
  if (samples.size() < min_samples) {
    throw InputError("symmetry test needs at least " + std::to_string(min_samples) + " samples, got " +
                     std::to_string(samples.size()));
  }
  if (samples.empty()) return TestResult{0.0, 1.0};
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  std::vector<double> y(x.size());
  std::transform(x.rbegin(), x.rend(), y.begin(), [](double v) { return -v; });
  const double n = static_cast<double>(x.size());
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t d_count = 0;  // n * D as an integer difference
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d_count = std::max(d_count, i > j ? i - j : j - i);
  }
  const auto nonzero = static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
  const double d = static_cast<double>(d_count) / n;
  if (nonzero == 0 || d_count == 0) return TestResult{d, 1.0};
  const double lambda = static_cast<double>(d_count) / std::sqrt(static_cast<double>(nonzero));
  return TestResult{d, brownian_sup_abs_survival(lambda)};
}

}  // namespace paththerm
