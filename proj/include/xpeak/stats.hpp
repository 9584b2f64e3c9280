#pragma once

// Two-sample Kolmogorov-Smirnov and chi-square goodness-of-fit helpers.

#include "xpeak/exact.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace xpeak {

/// sup_t |F_a(t) - F_b(t)| over the two empirical CDFs. Inputs must be sorted.
inline double ks_statistic_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("ks_statistic: empty sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return ks_statistic_sorted(a, b);
}

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double kolmogorov_survival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0, sign = 1;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

/// Asymptotic two-sided p-value of a two-sample KS statistic, with the usual
/// small-sample correction on the effective size.
inline double ks_p_value(double statistic, std::size_t na, std::size_t nb) {
  const double ne = static_cast<double>(na) * static_cast<double>(nb) / static_cast<double>(na + nb);
  const double root = std::sqrt(ne);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

/// KS statistic a test at level alpha would reject above, for sizes na, nb.
inline double ks_critical_value(double alpha, std::size_t na, std::size_t nb) {
  const double c = std::sqrt(-std::log(alpha / 2) / 2);
  return c * std::sqrt(static_cast<double>(na + nb) / (static_cast<double>(na) * static_cast<double>(nb)));
}

struct ChiSquareResult {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

/// Pearson goodness of fit of observed counts to exact probabilities.
inline ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed, std::span<const Rational> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2) throw ParameterError("chi_square_test: need >= 2 matching cells");
  std::uint64_t total = 0;
  for (auto o : observed) total += o;
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = to_double(probabilities[i]) * static_cast<double>(total);
    if (expected <= 0) throw ParameterError("chi_square_test: zero expected count");
    const double diff = static_cast<double>(observed[i]) - expected;
    r.statistic += diff * diff / expected;
  }
  r.dof = observed.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace xpeak
