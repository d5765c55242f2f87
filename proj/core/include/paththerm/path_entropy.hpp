#ifndef PATHTHERM_PATH_ENTROPY_HPP
#define PATHTHERM_PATH_ENTROPY_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "paththerm/generator.hpp"
#include "paththerm/state_box.hpp"
#include "paththerm/stats.hpp"
#include "paththerm/trajectory.hpp"

namespace paththerm {

enum class ZKind { lumped, channel, conditional };
enum class EndpointWeighting { stationary, supplied };

ZKind parse_z_kind(const std::string& text);
std::string to_string(ZKind kind);

/// One value of the path functional Z = ln P(path) / P_R(reversed path), k_B = 1.
struct ZSample {
  double value = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  ZKind kind = ZKind::lumped;
  EndpointWeighting weighting = EndpointWeighting::supplied;
};

std::vector<double> values_of(std::span<const ZSample> samples);

/// Sum over the events of ln[W(X_i|X_{i-1}) / W(X_{i-1}|X_i)] with lumped
/// rates, plus ln p_start(X_0) - ln p_end(X_f). Throws NumericalError on a
/// zero reverse rate or a zero endpoint probability.
ZSample z_lumped(const Trajectory& trajectory, const ChannelGrouping& grouping, const Distribution& p_start,
                 const Distribution& p_end);
ZSample z_lumped(const Trajectory& trajectory, const ChannelGrouping& grouping, const Distribution& stationary);

/// Same sum with each event's own channel and its paired reverse channel.
ZSample z_channel(const Trajectory& trajectory, const Distribution& p_start, const Distribution& p_end);
ZSample z_channel(const Trajectory& trajectory, const Distribution& stationary);

/// Dense short-time conditionals P(X, t + dt | X', t) on a box.
struct ConditionalTable {
  double dt = 0.0;
  StateBoxPtr box;
  Eigen::MatrixXd matrix;  // (to, from)
};

ConditionalTable make_conditional_table(const Generator& generator, double dt);

/// Sum over the grid of ln[P(X_i|X_{i-1}) / P(X_{i-1}|X_i)] plus the boundary
/// term. The grid spacing must match the table's dt.
ZSample z_conditional(const DiscretizedPath& path, const ConditionalTable& table, const Distribution& p_start,
                      const Distribution& p_end);
ZSample z_conditional(const DiscretizedPath& path, const Generator& generator, const Distribution& p_start,
                      const Distribution& p_end);

/// ln p0(X_0) + sum ln P(X_i | X_{i-1}). Throws NumericalError on a zero factor.
double path_log_probability(const DiscretizedPath& path, const ConditionalTable& table, const Distribution& p0);
double path_log_probability(const DiscretizedPath& path, const Generator& generator, const Distribution& p0);

struct ReversibilityReport {
  std::size_t steps = 0;
  double dt = 0.0;
  std::size_t paths = 0;
  double max_gap = 0.0;
  std::vector<State> worst_path;
  double worst_forward = 0.0;
  double worst_reverse = 0.0;
};

/// Enumerates every path X_0 .. X_steps of positive probability on the box
/// (stationary start, grid spacing dt) and compares its log-probability with
/// that of the reversed path. Throws InputError when the box exceeds 10^4
/// states, steps > 6, or more than `max_paths` paths exist.
ReversibilityReport reversibility_enumeration(const Generator& generator, const Distribution& stationary, double dt,
                                              std::size_t steps, std::size_t max_paths = 200'000'000);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

struct BinSpec {
  /// Bin width; 0 selects the Freedman-Diaconis width.
  double width = 0.0;
  /// Bins centred on multiples of the width, so edges mirror about 0.
  bool symmetric = false;
};

/// Uniform bins covering the sample range. Throws InputError on empty input.
Histogram histogram(std::span<const double> samples, const BinSpec& spec = {});

/// CSV `bin_left,bin_right,count`.
void write_histogram_csv(std::ostream& out, const Histogram& hist);

struct FtBin {
  double zeta = 0.0;  ///< abscissa of the pair (mean of the two mirrored centroids)
  std::size_t positive = 0;
  std::size_t negative = 0;
  double log_ratio = 0.0;
  bool used = false;
};

struct FtOptions {
  double bin_width = 0.0;  ///< 0: Freedman-Diaconis
  std::size_t min_count = 20;
  std::size_t min_samples = 10'000;
  std::size_t bootstrap = 1000;
  double significance = 0.01;
  std::uint64_t seed = 0x5eed;
};

struct FtResult {
  std::size_t n_samples = 0;
  double bin_width = 0.0;
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t used_pairs = 0;
  std::vector<FtBin> bins;

  bool covers(double value) const { return ci_low <= value && value <= ci_high; }
};

/// Weighted least-squares slope (through the origin) of ln[P(z)/P(-z)]
/// against z over mirrored bin pairs that both hold at least min_count
/// samples, with a percentile bootstrap interval at level 1 - significance.
/// Throws InputError below min_samples and NumericalError without usable pairs.
FtResult ft_test(std::span<const double> samples, const FtOptions& options = {});

/// Two-sample Kolmogorov-Smirnov statistic between the samples and their
/// negation. Under symmetry the signs are exchangeable, so
/// D n / sqrt(n_nonzero) converges to sup|B| on [0, 1]; that law gives the
/// p-value. Throws InputError below min_samples.
TestResult symmetry_test(std::span<const double> samples, std::size_t min_samples = 10'000);

}  // namespace paththerm

#endif  // PATHTHERM_PATH_ENTROPY_HPP
