#ifndef PATHTHERM_STATS_HPP
#define PATHTHERM_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace paththerm {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// P(sup_{0<=t<=1} |B_t| >= lambda) for standard Brownian motion B.
double brownian_sup_abs_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test for independent samples; asymptotic
/// p-value with the Stephens small-sample correction.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean with the standard error sd / sqrt(n). Compensated summation.
MeanEstimate mean_estimate(std::span<const double> values);

/// Linear-interpolated quantile of an already sorted sample, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

/// Freedman-Diaconis bin width 2 IQR n^(-1/3); zero when the IQR vanishes.
double freedman_diaconis_width(std::span<const double> values);

}  // namespace paththerm

#endif  // PATHTHERM_STATS_HPP
