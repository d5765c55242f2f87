#include "paththerm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "paththerm/error.hpp"

namespace paththerm {

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double brownian_sup_abs_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.0) {
    // P(sup|B| < lambda) = (4/pi) sum (-1)^k / (2k+1) exp(-(2k+1)^2 pi^2 / (8 lambda^2))
    double cdf = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double m = 2.0 * k + 1.0;
      const double term = (k % 2 ? -1.0 : 1.0) / m * std::exp(-m * m * pi * pi / (8.0 * lambda * lambda));
      cdf += term;
      if (std::abs(term) < 1e-18) break;
    }
    return std::clamp(1.0 - 4.0 / pi * cdf, 0.0, 1.0);
  }
  // Reflection series: 4 sum (-1)^k Phi_c((2k+1) lambda).
  double tail = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double m = 2.0 * k + 1.0;
    const double term = (k % 2 ? -1.0 : 1.0) * 0.5 * std::erfc(m * lambda / std::numbers::sqrt2);
    tail += term;
    if (std::abs(term) < 1e-18 * std::max(tail, 1e-300)) break;
  }
  return std::clamp(4.0 * tail, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("two-sample test needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  const double ne = n1 * n2 / (n1 + n2);
  const double root = std::sqrt(ne);
  return TestResult{d, kolmogorov_q((root + 0.12 + 0.11 / root) * d)};
}

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate est;
  est.n = values.size();
  if (values.empty()) return est;
  double sum = 0.0;
  double c = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    c += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  est.mean = (sum + c) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - est.mean) * (v - est.mean);
    est.standard_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return est;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double freedman_diaconis_width(std::span<const double> values) {
  if (values.empty()) throw InputError("bin width of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  return 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(sorted.size()));
}

}  // namespace paththerm
