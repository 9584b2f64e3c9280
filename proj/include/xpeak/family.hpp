#pragma once

// The inner family (constant-weight code over the 2^n peaks of one factor)
// and the product family (q-ary outer code over inner-family indices), with
// exact volumes, exact distances and the lemma checks.

#include "xpeak/codes.hpp"
#include "xpeak/exact.hpp"
#include "xpeak/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace xpeak {

struct FamilyLimits {
  int max_n = 4;
  int max_k = 8;
  std::uint64_t max_bodies = std::uint64_t{1} << 20;
  CodeBudget codes;
};

struct InnerFamily {
  int n = 0;
  Code code;  // length 2^n, constant weight 2^(n-1)
  std::vector<InnerBody> bodies;

  std::size_t size() const { return bodies.size(); }
  std::uint32_t weight() const { return std::uint32_t{1} << (n - 1); }
};

/// Wraps an explicit constant-weight code. Checks length 2^n, weight 2^(n-1)
/// and relative distance >= 1/4.
inline InnerFamily make_inner_family(int n, Code code) {
  const auto g = make_geometry(n);
  const std::uint32_t len = std::uint32_t{1} << n;
  if (!code.is_binary() || code.length() != len) throw ParameterError("inner family: code must be binary of length 2^n");
  if (code.size() == 0) throw ParameterError("inner family: empty code");
  for (std::size_t i = 0; i < code.size(); ++i)
    if (code.weight(i) != len / 2) throw VerificationError("inner family: codeword " + std::to_string(i) + " is not of weight 2^(n-1)");
  if (code.size() >= 2 && 4 * code.min_distance() < len)
    throw VerificationError("inner family: relative minimum distance below 1/4");
  InnerFamily fam;
  fam.n = n;
  fam.bodies.reserve(code.size());
  for (const auto& w : code.words()) {
    std::vector<std::uint8_t> bits(w.begin(), w.end());
    fam.bodies.emplace_back(PeakSet::from_bits(bits));
  }
  fam.code = std::move(code);
  return fam;
}

/// Half-length minimum distance max(1, ceil(2^n/8)); complement extension
/// doubles it to at least 2^n/4.
inline unsigned inner_half_code_distance(int n) {
  if (n < 1 || n > 31) throw ParameterError("inner_half_code_distance: n out of range");
  const unsigned len = 1U << n;
  return std::max(1U, (len + 7) / 8);
}

inline InnerFamily build_inner_family(int n, const FamilyLimits& limits = {}) {
  if (n < 2 || n > limits.max_n)
    throw ParameterError("build_inner_family: n must be in [2, " + std::to_string(limits.max_n) + "] (got " + std::to_string(n) + ")");
  const unsigned half = 1U << (n - 1);
  auto half_code = gv_greedy(2, half, inner_half_code_distance(n), limits.codes);
  return make_inner_family(n, complement_extend(half_code, limits.codes));
}

struct ProductBody {
  std::vector<InnerBody> factors;

  int n() const { return factors.empty() ? 0 : factors.front().dim(); }
  int k() const { return static_cast<int>(factors.size()); }
  int d() const { return n() * k(); }
};

inline Rational product_volume(const ProductBody& body) {
  Rational v = 1;
  for (const auto& f : body.factors) v *= inner_volume(f);
  return v;
}

class ProductFamily {
 public:
  ProductFamily() = default;
  ProductFamily(InnerFamily inner, Code outer) : inner_(std::move(inner)), outer_(std::move(outer)) {
    if (outer_.alphabet_size() != inner_.size())
      throw ParameterError("product family: outer alphabet size must equal the inner family size");
    if (outer_.size() == 0) throw ParameterError("product family: empty outer code");
    const unsigned k = outer_.length();
    if (outer_.size() >= 2 && 2 * outer_.min_distance() < k)
      throw VerificationError("product family: outer minimum distance below ceil(k/2)");
  }

  const InnerFamily& inner() const { return inner_; }
  const Code& outer() const { return outer_; }
  int n() const { return inner_.n; }
  int k() const { return static_cast<int>(outer_.length()); }
  int d() const { return n() * k(); }
  std::size_t size() const { return outer_.size(); }

  std::uint32_t symbol(std::size_t body, int factor) const { return outer_.word(body).at(static_cast<std::size_t>(factor)); }
  const InnerBody& factor(std::size_t body, int factor) const { return inner_.bodies[symbol(body, factor)]; }

  /// Bodies are materialized on demand.
  ProductBody body(std::size_t index) const {
    if (index >= size()) throw ParameterError("product family: body index " + std::to_string(index) + " out of range");
    ProductBody b;
    b.factors.reserve(static_cast<std::size_t>(k()));
    for (int j = 0; j < k(); ++j) b.factors.push_back(factor(index, j));
    return b;
  }

 private:
  InnerFamily inner_;
  Code outer_;
};

inline unsigned outer_code_distance(int k) { return static_cast<unsigned>((k + 1) / 2); }

inline ProductFamily build_product_family(int n, int k, const FamilyLimits& limits = {}) {
  if (k < 1 || k > limits.max_k)
    throw ParameterError("build_product_family: k must be in [1, " + std::to_string(limits.max_k) + "] (got " + std::to_string(k) + ")");
  auto inner = build_inner_family(n, limits);
  const BigInt space = pow_big(BigInt(inner.size()), static_cast<unsigned>(k));
  if (space > BigInt(limits.codes.enumeration))
    throw ResourceError("build_product_family: |inner|^k = " + space.str() +
                        " exceeds the enumeration budget; use a smaller k or supply an outer code");
  auto outer = gv_greedy(static_cast<unsigned>(inner.size()), static_cast<unsigned>(k), outer_code_distance(k), limits.codes);
  if (outer.size() > limits.max_bodies) throw ResourceError("build_product_family: family exceeds the body limit");
  return ProductFamily(std::move(inner), std::move(outer));
}

// Distances. Inside one factor, A_i ∩ B_i is the core plus the common peaks,
// so every volume is a product of (core_weight + peaks) in peak-volume units.

/// vol(A∩B)/vol(larger of A, B) as an exact integer pair.
struct OverlapRatio {
  BigInt intersection;
  BigInt larger;
};

inline void check_same_shape(const ProductBody& a, const ProductBody& b) {
  if (a.k() != b.k() || a.n() != b.n() || a.k() == 0) throw ParameterError("distance: bodies must have the same n and k");
}

inline OverlapRatio overlap_ratio(const ProductBody& a, const ProductBody& b) {
  check_same_shape(a, b);
  const std::uint64_t core = make_geometry(a.n()).core_weight();
  BigInt inter = 1, va = 1, vb = 1;
  for (int i = 0; i < a.k(); ++i) {
    const auto& pa = a.factors[static_cast<std::size_t>(i)].peaks();
    const auto& pb = b.factors[static_cast<std::size_t>(i)].peaks();
    inter *= core + intersection_count(pa, pb);
    va *= core + pa.count();
    vb *= core + pb.count();
  }
  return {inter, va >= vb ? va : vb};
}

/// Total-variation distance for arbitrary bodies of the same shape:
/// vol(K\L)/vol K if vol K >= vol L, else vol(L\K)/vol L.
inline Rational general_distance(const ProductBody& a, const ProductBody& b) {
  const auto r = overlap_ratio(a, b);
  return 1 - Rational(r.intersection, r.larger);
}

/// 1 - |A∩B|/|A| for equal-volume bodies.
inline Rational exact_distance(const ProductBody& a, const ProductBody& b) {
  check_same_shape(a, b);
  if (product_volume(a) != product_volume(b)) throw ParameterError("exact_distance: bodies must have equal volume");
  return general_distance(a, b);
}

/// Same as exact_distance on two members of a family, by index.
inline Rational family_distance(const ProductFamily& fam, std::size_t i, std::size_t j) {
  return exact_distance(fam.body(i), fam.body(j));
}

/// 1 - e^{-k/(16n)} at 100-digit precision.
inline BigFloat distance_lemma_bound(int n, int k) {
  return 1 - boost::multiprecision::exp(-BigFloat(k) / BigFloat(16 * n));
}

struct DistanceLemmaReport {
  int n = 0;
  int k = 0;
  std::uint64_t pairs_checked = 0;
  bool all_pairs = true;
  Rational min_distance;  // over checked pairs
  std::size_t min_i = 0, min_j = 0;
  double bound = 0;  // 1 - e^{-k/(16n)}
  std::uint32_t max_common_peaks = 0;  // over differing factors
  Rational common_peak_limit;          // 3 * 2^n / 8
  unsigned min_differing_factors = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

struct PairScan {
  std::uint64_t max_all_pairs = 10'000'000;
  std::uint64_t sampled_pairs = 1'000'000;
  std::uint64_t seed = 1;
};

/// Checks, for every (or a seeded sample of) distinct pairs: dist > 1 -
/// e^{-k/(16n)}, common peaks <= 3*2^n/8 in every differing factor, and at
/// least ceil(k/2) differing factors.
inline DistanceLemmaReport verify_distance_lemma(const ProductFamily& fam, const PairScan& scan = {}) {
  DistanceLemmaReport rep;
  rep.n = fam.n();
  rep.k = fam.k();
  const int n = fam.n();
  const int k = fam.k();
  const std::uint32_t len = std::uint32_t{1} << n;
  rep.common_peak_limit = Rational(3 * len, 8);
  const BigFloat bound = distance_lemma_bound(n, k);
  const BigFloat survival = 1 - bound;  // e^{-k/(16n)}
  rep.bound = bound.convert_to<double>();
  const unsigned need_diff = outer_code_distance(k);
  rep.min_differing_factors = static_cast<unsigned>(k);

  const std::size_t q = fam.inner().size();
  const std::uint64_t core = make_geometry(n).core_weight();
  const std::uint64_t w = fam.inner().weight();
  std::vector<std::uint32_t> common(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      common[a * q + b] = intersection_count(fam.inner().bodies[a].peaks(), fam.inner().bodies[b].peaks());
  const BigInt full = pow_big(BigInt(core + w), static_cast<unsigned>(k));
  // full * e^{-x} is irrational, so inter < full * e^{-x} <=> inter <= floor(full * e^{-x}).
  const BigInt limit = static_cast<BigInt>(boost::multiprecision::floor(BigFloat(full) * survival));
  const bool narrow = full <= BigInt(UINT64_MAX);
  const std::uint64_t limit64 = narrow ? limit.convert_to<std::uint64_t>() : 0;

  bool have_min = false;
  BigInt best_inter = 0;
  std::uint64_t best64 = 0;
  auto record = [&](std::size_t i, std::size_t j, const std::string& what) {
    rep.violations.push_back("pair (" + std::to_string(i) + "," + std::to_string(j) + ")" + what);
  };
  auto check_pair = [&](std::size_t i, std::size_t j) {
    ++rep.pairs_checked;
    std::uint64_t inter64 = 1;
    BigInt inter = 1;
    unsigned differing = 0;
    for (int f = 0; f < k; ++f) {
      const auto si = fam.symbol(i, f), sj = fam.symbol(j, f);
      const auto mcommon = common[si * q + sj];
      if (narrow)
        inter64 *= core + mcommon;
      else
        inter *= core + mcommon;
      if (si != sj) {
        ++differing;
        rep.max_common_peaks = std::max(rep.max_common_peaks, mcommon);
        if (8 * mcommon > 3 * len)
          record(i, j, " factor " + std::to_string(f) + ": " + std::to_string(mcommon) + " common peaks > 3*2^n/8");
      }
    }
    rep.min_differing_factors = std::min(rep.min_differing_factors, differing);
    if (differing < need_diff) record(i, j, " differs in only " + std::to_string(differing) + " factors");
    if (narrow) {
      if (inter64 > limit64) record(i, j, ": distance " + (1 - Rational(BigInt(inter64), full)).str() + " not above 1 - e^{-k/(16n)}");
      if (!have_min || inter64 > best64) {
        have_min = true;
        best64 = inter64;
        rep.min_i = i;
        rep.min_j = j;
      }
    } else {
      if (inter > limit) record(i, j, ": distance " + (1 - Rational(inter, full)).str() + " not above 1 - e^{-k/(16n)}");
      if (!have_min || inter > best_inter) {
        have_min = true;
        best_inter = inter;
        rep.min_i = i;
        rep.min_j = j;
      }
    }
  };

  const std::uint64_t m = fam.size();
  const std::uint64_t total = m * (m - 1) / 2;
  if (m < 2) {
    rep.min_distance = 0;
    return rep;
  }
  if (total <= scan.max_all_pairs) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) check_pair(i, j);
  } else {
    rep.all_pairs = false;
    auto rng = derive_stream(scan.seed, 0);
    std::uniform_int_distribution<std::uint64_t> pick_i(0, m - 1), pick_j(0, m - 2);
    for (std::uint64_t s = 0; s < scan.sampled_pairs; ++s) {
      const auto i = pick_i(rng);
      auto j = pick_j(rng);
      if (j >= i) ++j;
      check_pair(std::min(i, j), std::max(i, j));
    }
  }
  if (narrow) best_inter = best64;
  rep.min_distance = have_min ? 1 - Rational(best_inter, full) : Rational(1);
  return rep;
}

/// |family| > (q/4)^{k/2}, checked exactly as |family|^2 * 4^k > q^k.
inline bool cardinality_holds(const ProductFamily& fam) {
  const BigInt f = fam.size();
  const BigInt q = fam.inner().size();
  const unsigned k = static_cast<unsigned>(fam.k());
  return f * f * pow_big(BigInt(4), k) > pow_big(q, k);
}

/// Exact per-factor check on all pairs of distinct inner bodies:
/// (core + m*peak)/(core + w*peak) <= (1 + 3/(8(n-1))) / (1 + 1/(2(n-1))).
inline bool factor_ratio_holds(const InnerFamily& inner) {
  const int n = inner.n;
  const auto g = make_geometry(n);
  const Rational limit = (1 + Rational(3, 8 * (n - 1))) / (1 + Rational(1, 2 * (n - 1)));
  const Rational full = g.core_volume + Rational(inner.weight()) * g.peak_volume;
  for (std::size_t a = 0; a < inner.size(); ++a)
    for (std::size_t b = a + 1; b < inner.size(); ++b) {
      const auto m = intersection_count(inner.bodies[a].peaks(), inner.bodies[b].peaks());
      if ((g.core_volume + Rational(m) * g.peak_volume) / full > limit) return false;
    }
  return true;
}

/// Exact minimum pairwise distance (all pairs). When the pair count exceeds
/// `max_pairs`, returns the certified floor 1 - rho^{ceil(k/2)}, rho the
/// largest per-factor overlap ratio between distinct inner bodies.
inline Rational min_pairwise_distance(const ProductFamily& fam, std::uint64_t max_pairs = 10'000'000) {
  const std::uint64_t m = fam.size();
  if (m < 2) return 1;
  if (m * (m - 1) / 2 <= max_pairs) {
    PairScan scan;
    scan.max_all_pairs = max_pairs;
    return verify_distance_lemma(fam, scan).min_distance;
  }
  const auto& inner = fam.inner();
  const std::uint64_t core = make_geometry(fam.n()).core_weight();
  std::uint32_t worst = 0;
  for (std::size_t a = 0; a < inner.size(); ++a)
    for (std::size_t b = a + 1; b < inner.size(); ++b)
      worst = std::max(worst, intersection_count(inner.bodies[a].peaks(), inner.bodies[b].peaks()));
  const Rational rho(core + worst, core + inner.weight());
  return 1 - pow_rational(rho, outer_code_distance(fam.k()));
}

/// All bodies have the same exact volume.
inline bool equal_volumes(const ProductFamily& fam) {
  for (const auto& b : fam.inner().bodies)
    if (b.peak_count() != fam.inner().weight()) return false;
  return true;
}

// Manifest:
//   xpeak-manifest v1
//   n=<int> k=<int> inner_size=<int> outer_size=<int>
//   <outer code block>   (q=<inner_size> len=<k> dmin=..., comma-separated inner indices)
//   <inner code block>   (q=2 len=<2^n> dmin=..., bit-strings, position j = orthant j)

inline constexpr const char* kManifestVersion = "xpeak-manifest v1";

inline void write_manifest(std::ostream& os, const ProductFamily& fam) {
  os << kManifestVersion << '\n';
  os << "n=" << fam.n() << " k=" << fam.k() << " inner_size=" << fam.inner().size() << " outer_size=" << fam.size() << '\n';
  write_code(os, fam.outer());
  write_code(os, fam.inner().code);
}

inline ProductFamily read_manifest(std::istream& is, const CodeBudget& budget = {}) {
  std::string line;
  if (!std::getline(is, line) || line != kManifestVersion) throw ParameterError("manifest: missing or unsupported version line");
  if (!std::getline(is, line)) throw ParameterError("manifest: missing header");
  int n = 0, k = 0;
  std::size_t inner_size = 0, outer_size = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "n=%d k=%d inner_size=%zu outer_size=%zu%c", &n, &k, &inner_size, &outer_size, &tail) != 4)
    throw ParameterError("manifest: bad header '" + line + "'");
  if (n < 2 || n > kMaxFactorDim || k < 1) throw ParameterError("manifest: n or k out of range");
  auto outer = read_code(is, outer_size, budget);
  auto inner_code = read_code(is, inner_size, budget);
  if (outer.length() != static_cast<unsigned>(k) || outer.alphabet_size() != inner_size)
    throw ParameterError("manifest: outer code block does not match the header");
  return ProductFamily(make_inner_family(n, std::move(inner_code)), std::move(outer));
}

}  // namespace xpeak
