#pragma once

// Halfspace-discrepancy estimation between two product bodies: the largest
// two-sample KS statistic of 1-D projections over a finite direction set.
// A finite set of directions can only under-report the true sup over all
// halfspaces, so the result is a statistical lower-bound estimate.

#include "xpeak/family.hpp"
#include "xpeak/oracles.hpp"
#include "xpeak/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace xpeak {

struct HalfspaceProbe {
  std::vector<double> direction;  // unit vector in R^d
  double discrepancy = 0;         // KS statistic of the projections
};

struct HalfspaceEstimate {
  double estimate = 0;
  HalfspaceProbe argmax;
  std::size_t directions = 0;
  std::size_t samples = 0;
  /// KS value below which a difference is indistinguishable from sampling
  /// noise at level 1e-3, Bonferroni-corrected over the directions.
  double noise_floor = 0;
};

/// Direction set: `random_dirs` Gaussian unit vectors, the d axes, and for each
/// factor every orthant normal s/sqrt(n) placed in that factor's block.
template <class URBG>
std::vector<std::vector<double>> probe_directions(int n, int k, std::size_t random_dirs, URBG& rng) {
  const int d = n * k;
  std::vector<std::vector<double>> dirs;
  std::normal_distribution<double> gauss;
  for (std::size_t r = 0; r < random_dirs; ++r) {
    std::vector<double> v(static_cast<std::size_t>(d));
    double norm = 0;
    for (auto& c : v) {
      c = gauss(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    for (auto& c : v) c /= norm;
    dirs.push_back(std::move(v));
  }
  for (int i = 0; i < d; ++i) {
    std::vector<double> v(static_cast<std::size_t>(d), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(std::move(v));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int f = 0; f < k; ++f)
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << n); ++s) {
      std::vector<double> v(static_cast<std::size_t>(d), 0.0);
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(f * n + i)] = ((s >> i) & 1U) ? scale : -scale;
      dirs.push_back(std::move(v));
    }
  return dirs;
}

inline std::vector<double> project(const std::vector<std::vector<double>>& points, const std::vector<double>& dir) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    double s = 0;
    for (std::size_t i = 0; i < dir.size(); ++i) s += p[i] * dir[i];
    out.push_back(s);
  }
  return out;
}

template <class URBG>
std::vector<std::vector<double>> draw_points(const ProductBody& body, std::size_t count, URBG& rng) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pts.push_back(continuous_random(body, rng));
  return pts;
}

/// Fraction of `samples` uniform points of `body` with dir.x <= t.
inline double projection_fraction(const ProductBody& body, const std::vector<double>& dir, double t, std::size_t samples, Rng& rng) {
  check_point_dim(body, dir.size());
  std::size_t below = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = continuous_random(body, rng);
    double s = 0;
    for (std::size_t c = 0; c < dir.size(); ++c) s += x[c] * dir[c];
    if (s <= t) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(samples);
}

namespace detail {

inline bool body_less(const ProductBody& a, const ProductBody& b) {
  for (std::size_t i = 0; i < a.factors.size(); ++i) {
    const auto& pa = a.factors[i].peaks();
    const auto& pb = b.factors[i].peaks();
    if (pa != pb) return pa < pb;
  }
  return false;
}

}  // namespace detail

/// Max over the probe directions of the KS statistic between projections of
/// `samples` uniform points from each body. Stream assignment depends only on
/// the unordered pair {a, b}, so the estimate is symmetric in its arguments:
/// the smaller body (by peak sets) draws from derive_stream(seed, 0), the other
/// from stream 1, and random directions from stream 2.
inline HalfspaceEstimate halfspace_discrepancy(const ProductBody& a, const ProductBody& b, std::size_t random_dirs, std::size_t samples,
                                               std::uint64_t seed) {
  check_same_shape(a, b);
  if (samples < 1000) throw ParameterError("halfspace_discrepancy: at least 1000 samples per body");
  const bool swap = detail::body_less(b, a);
  const ProductBody& first = swap ? b : a;
  const ProductBody& second = swap ? a : b;
  auto rng_first = derive_stream(seed, 0);
  auto rng_second = derive_stream(seed, 1);
  auto rng_dirs = derive_stream(seed, 2);
  const auto pa = draw_points(first, samples, rng_first);
  const auto pb = draw_points(second, samples, rng_second);
  const auto dirs = probe_directions(a.n(), a.k(), random_dirs, rng_dirs);

  HalfspaceEstimate est;
  est.directions = dirs.size();
  est.samples = samples;
  est.noise_floor = ks_critical_value(1e-3 / static_cast<double>(dirs.size()), samples, samples);
  for (const auto& dir : dirs) {
    const double ks = ks_statistic(project(pa, dir), project(pb, dir));
    if (ks > est.estimate || est.argmax.direction.empty()) {
      est.estimate = ks;
      est.argmax = {dir, ks};
    }
  }
  return est;
}

struct CorollaryRow {
  std::size_t i = 0, j = 0;
  Rational exact_distance;
  double ks_estimate = 0;
  std::size_t dirs = 0;
  std::size_t samples = 0;
};

struct CorollaryReport {
  std::vector<CorollaryRow> rows;
  Rational family_min_distance;
  bool far_floor_met = false;  // every pair of the family has dist > 1/8
  std::size_t argmin = 0;      // row with the smallest estimate (among dist > 1/8 rows when any)
  std::size_t argmax = 0;
  double noise_floor = 0;
  bool flat = false;  // min and max estimates within noise of each other
};

/// Scans `pairs` distinct pairs (i < j in lexicographic order) and reports
/// exact distance against the estimated halfspace discrepancy.
inline CorollaryReport corollary_explore(const ProductFamily& fam, std::size_t pairs, std::size_t random_dirs, std::size_t samples,
                                         std::uint64_t seed) {
  if (fam.size() < 2) throw ParameterError("corollary_explore: family needs at least two bodies");
  CorollaryReport rep;
  rep.family_min_distance = min_pairwise_distance(fam);
  rep.far_floor_met = rep.family_min_distance > Rational(1, 8);
  std::size_t scanned = 0;
  for (std::size_t i = 0; i < fam.size() && scanned < pairs; ++i)
    for (std::size_t j = i + 1; j < fam.size() && scanned < pairs; ++j, ++scanned) {
      const auto a = fam.body(i), b = fam.body(j);
      const auto est = halfspace_discrepancy(a, b, random_dirs, samples, seed + scanned);
      rep.rows.push_back({i, j, exact_distance(a, b), est.estimate, est.directions, samples});
      rep.noise_floor = est.noise_floor;
    }
  std::vector<std::size_t> candidates;
  for (std::size_t r = 0; r < rep.rows.size(); ++r)
    if (rep.rows[r].exact_distance > Rational(1, 8)) candidates.push_back(r);
  if (candidates.empty())
    for (std::size_t r = 0; r < rep.rows.size(); ++r) candidates.push_back(r);
  rep.argmin = candidates.front();
  for (auto r : candidates)
    if (rep.rows[r].ks_estimate < rep.rows[rep.argmin].ks_estimate) rep.argmin = r;
  for (std::size_t r = 0; r < rep.rows.size(); ++r)
    if (rep.rows[r].ks_estimate > rep.rows[rep.argmax].ks_estimate) rep.argmax = r;
  rep.flat = !(rep.rows[rep.argmax].ks_estimate - rep.rows[rep.argmin].ks_estimate > rep.noise_floor);
  return rep;
}

inline void write_corollary_csv(std::ostream& os, const CorollaryReport& rep) {
  os << "i,j,exact_dist,ks_estimate,dirs,samples\n";
  char buf[64];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%.8f", r.ks_estimate);
    os << r.i << ',' << r.j << ',' << r.exact_distance.str() << ',' << buf << ',' << r.dirs << ',' << r.samples << '\n';
  }
}

}  // namespace xpeak
