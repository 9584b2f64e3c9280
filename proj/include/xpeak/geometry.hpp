#pragma once

// Cross-polytope with peaks: construction constants, point classification,
// membership, exact volumes and exactly-uniform sampling.
//
// Orthant encoding: bit i of an orthant index is 1 iff sign s_i = +1. Orthant
// index j is also the peak index and the position of the peak's bit in a
// codeword of length 2^n.

#include "xpeak/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xpeak {

/// Peak sets carry 2^n bits; beyond this the representation is out of scope.
inline constexpr int kMaxFactorDim = 16;

struct GeometryParams {
  int n = 0;
  Rational alpha;
  Rational core_volume;
  Rational peak_volume;

  /// core_volume / peak_volume = 2^n (n-1), an integer. Region selection in
  /// the samplers uses these integer weights so it is exact.
  std::uint64_t core_weight() const { return (std::uint64_t{1} << n) * static_cast<std::uint64_t>(n - 1); }
};

inline GeometryParams make_geometry(int n) {
  if (n < 2) throw ParameterError("make_geometry: n must be >= 2 (got " + std::to_string(n) + ")");
  if (n > kMaxFactorDim) throw ParameterError("make_geometry: n > " + std::to_string(kMaxFactorDim) + " is not supported");
  GeometryParams g;
  g.n = n;
  g.alpha = Rational(n, n - 1);
  const BigInt two_n = BigInt(1) << n;
  g.core_volume = Rational(two_n, factorial(static_cast<unsigned>(n)));
  g.peak_volume = g.core_volume / Rational(two_n * (n - 1));
  return g;
}

class OrthantSign {
 public:
  OrthantSign() = default;
  OrthantSign(int n, std::uint32_t bits) : n_(n), bits_(bits) {
    if (n < 1 || n > kMaxFactorDim || (bits >> n) != 0)
      throw ParameterError("OrthantSign: index " + std::to_string(bits) + " out of range for n=" + std::to_string(n));
  }

  static OrthantSign from_signs(std::span<const int> signs) {
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
      if (signs[i] != 1 && signs[i] != -1) throw ParameterError("OrthantSign: signs must be +1 or -1");
      if (signs[i] == 1) bits |= std::uint32_t{1} << i;
    }
    return OrthantSign(static_cast<int>(signs.size()), bits);
  }

  int dim() const { return n_; }
  std::uint32_t index() const { return bits_; }
  int sign(int i) const { return ((bits_ >> i) & 1U) ? 1 : -1; }

  std::vector<int> signs() const {
    std::vector<int> s(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) s[static_cast<std::size_t>(i)] = sign(i);
    return s;
  }

  friend bool operator==(const OrthantSign&, const OrthantSign&) = default;

 private:
  int n_ = 0;
  std::uint32_t bits_ = 0;
};

enum class Region { Core, Peak, Outside };

/// Core | Peak(orthant) | Outside. `orthant` is meaningful only for Peak.
struct RegionLabel {
  Region kind = Region::Outside;
  std::uint32_t orthant = 0;

  static RegionLabel core() { return {Region::Core, 0}; }
  static RegionLabel peak(std::uint32_t orthant) { return {Region::Peak, orthant}; }
  static RegionLabel outside() { return {Region::Outside, 0}; }

  bool is_core() const { return kind == Region::Core; }
  bool is_peak() const { return kind == Region::Peak; }
  bool is_inside() const { return kind != Region::Outside; }

  friend bool operator==(const RegionLabel&, const RegionLabel&) = default;
};

/// Number of inside labels of one factor: Core plus one per orthant.
inline std::uint64_t inside_label_count(int n) { return (std::uint64_t{1} << n) + 1; }

/// Bit-set over the 2^n orthants of one factor.
class PeakSet {
 public:
  PeakSet() = default;
  explicit PeakSet(int n) : n_(n), words_(word_count(n), 0) {
    if (n < 1 || n > kMaxFactorDim) throw ParameterError("PeakSet: n out of range");
  }

  static PeakSet full(int n) {
    PeakSet s(n);
    for (std::uint32_t j = 0; j < s.size(); ++j) s.set(j);
    return s;
  }

  static PeakSet from_indices(int n, std::span<const std::uint32_t> indices) {
    PeakSet s(n);
    for (auto j : indices) s.set(j);
    return s;
  }

  /// Bit j of the word is orthant j.
  static PeakSet from_bits(std::span<const std::uint8_t> bits) {
    const auto len = bits.size();
    if (len < 2 || !std::has_single_bit(len)) throw ParameterError("PeakSet: bit length must be 2^n with n >= 1");
    PeakSet s(std::countr_zero(len));
    for (std::uint32_t j = 0; j < len; ++j)
      if (bits[j]) s.set(j);
    return s;
  }

  int dim() const { return n_; }
  std::uint32_t size() const { return std::uint32_t{1} << n_; }

  bool test(std::uint32_t j) const {
    check(j);
    return (words_[j / 64] >> (j % 64)) & 1U;
  }
  void set(std::uint32_t j, bool value = true) {
    check(j);
    if (value)
      words_[j / 64] |= std::uint64_t{1} << (j % 64);
    else
      words_[j / 64] &= ~(std::uint64_t{1} << (j % 64));
  }

  std::uint32_t count() const {
    std::uint32_t c = 0;
    for (auto w : words_) c += static_cast<std::uint32_t>(std::popcount(w));
    return c;
  }

  std::vector<std::uint32_t> members() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t j = 0; j < size(); ++j)
      if (test(j)) out.push_back(j);
    return out;
  }

  PeakSet complement() const {
    PeakSet c(n_);
    for (std::uint32_t j = 0; j < size(); ++j) c.set(j, !test(j));
    return c;
  }

  friend std::uint32_t intersection_count(const PeakSet& a, const PeakSet& b) {
    same_dim(a, b);
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) c += static_cast<std::uint32_t>(std::popcount(a.words_[i] & b.words_[i]));
    return c;
  }

  friend std::uint32_t symmetric_difference_count(const PeakSet& a, const PeakSet& b) {
    same_dim(a, b);
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) c += static_cast<std::uint32_t>(std::popcount(a.words_[i] ^ b.words_[i]));
    return c;
  }

  /// Hex string of 2^n bits, orthant 0 = least significant bit.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::uint32_t digits = std::max<std::uint32_t>(1, size() / 4);
    std::string out(digits, '0');
    for (std::uint32_t d = 0; d < digits; ++d) {
      unsigned nibble = 0;
      for (unsigned b = 0; b < 4; ++b) {
        const std::uint32_t j = 4 * d + b;
        if (j < size() && test(j)) nibble |= 1U << b;
      }
      out[digits - 1 - d] = kDigits[nibble];
    }
    return out;
  }

  static PeakSet from_hex(int n, std::string_view hex) {
    PeakSet s(n);
    const std::uint32_t digits = std::max<std::uint32_t>(1, s.size() / 4);
    if (hex.size() != digits)
      throw ParameterError("PeakSet: expected " + std::to_string(digits) + " hex digits for n=" + std::to_string(n) + ", got '" +
                           std::string(hex) + "'");
    for (std::uint32_t d = 0; d < digits; ++d) {
      const char c = hex[digits - 1 - d];
      unsigned nibble = 0;
      if (c >= '0' && c <= '9')
        nibble = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f')
        nibble = static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F')
        nibble = static_cast<unsigned>(c - 'A' + 10);
      else
        throw ParameterError(std::string("PeakSet: bad hex digit '") + c + "'");
      for (unsigned b = 0; b < 4; ++b) {
        const std::uint32_t j = 4 * d + b;
        if ((nibble >> b) & 1U) {
          if (j >= s.size()) throw ParameterError("PeakSet: hex value exceeds 2^n bits");
          s.set(j);
        }
      }
    }
    return s;
  }

  friend bool operator==(const PeakSet&, const PeakSet&) = default;
  friend auto operator<=>(const PeakSet& a, const PeakSet& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.words_ <=> b.words_;
  }

 private:
  static std::size_t word_count(int n) { return n >= 6 ? (std::size_t{1} << (n - 6)) : 1; }
  void check(std::uint32_t j) const {
    if (j >= size()) throw ParameterError("PeakSet: orthant index " + std::to_string(j) + " out of range");
  }
  static void same_dim(const PeakSet& a, const PeakSet& b) {
    if (a.n_ != b.n_) throw ParameterError("PeakSet: dimension mismatch");
  }

  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// One n-dimensional cross-polytope with the peaks in `peaks` attached.
class InnerBody {
 public:
  InnerBody() = default;
  explicit InnerBody(PeakSet peaks) : peaks_(std::move(peaks)) {
    if (peaks_.dim() < 2) throw ParameterError("InnerBody: n must be >= 2");
  }

  static InnerBody bare(int n) { return InnerBody(PeakSet(n)); }
  static InnerBody all_peaks(int n) { return InnerBody(PeakSet::full(n)); }

  int dim() const { return peaks_.dim(); }
  const PeakSet& peaks() const { return peaks_; }
  bool has_peak(std::uint32_t orthant) const { return peaks_.test(orthant); }
  std::uint32_t peak_count() const { return peaks_.count(); }

  /// `n=<int>;peaks=<hex>`
  std::string to_string() const { return "n=" + std::to_string(dim()) + ";peaks=" + peaks_.to_hex(); }

  static InnerBody parse(std::string_view text) {
    const auto semi = text.find(';');
    if (text.substr(0, 2) != "n=" || semi == std::string_view::npos || text.substr(semi + 1, 6) != "peaks=")
      throw ParameterError("InnerBody: expected 'n=<int>;peaks=<hex>', got '" + std::string(text) + "'");
    int n = 0;
    try {
      n = std::stoi(std::string(text.substr(2, semi - 2)));
    } catch (const std::exception&) {
      throw ParameterError("InnerBody: bad dimension in '" + std::string(text) + "'");
    }
    if (n < 2 || n > kMaxFactorDim) throw ParameterError("InnerBody: n out of range in '" + std::string(text) + "'");
    return InnerBody(PeakSet::from_hex(n, text.substr(semi + 7)));
  }

  friend bool operator==(const InnerBody&, const InnerBody&) = default;

 private:
  PeakSet peaks_;
};

/// A point with exact rational coordinates num[i] / den, den > 0.
struct LatticePoint {
  std::vector<std::int64_t> num;
  std::int64_t den = 1;
};

namespace detail {

template <class T>
T abs_value(const T& v) {
  return v < T(0) ? -v : v;
}

}  // namespace detail

/// Classification of the point num/den. Works for any ordered additive type;
/// doubles use den = 1, lattice points use integer numerators.
/// Core iff sum|x| <= 1; Peak(sign x) iff 1 < sum|x| <= 1 + min|x|; else Outside.
/// Both regions are closed. A zero coordinate with sum|x| > 1 is Outside.
template <class T>
RegionLabel classify_scaled(std::span<const T> num, const T& den) {
  T total(0);
  T smallest = num.empty() ? T(0) : detail::abs_value(num[0]);
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    const T t = detail::abs_value(num[i]);
    total += t;
    if (t < smallest) smallest = t;
    if (num[i] > T(0)) bits |= std::uint32_t{1} << i;
  }
  if (total <= den) return RegionLabel::core();
  if (smallest > T(0) && total <= den + smallest) return RegionLabel::peak(bits);
  return RegionLabel::outside();
}

inline void check_dim(int n, std::size_t len, const char* what) {
  if (static_cast<std::size_t>(n) != len)
    throw ParameterError(std::string(what) + ": dimension mismatch (expected " + std::to_string(n) + ", got " + std::to_string(len) + ")");
}

inline RegionLabel classify_point(int n, std::span<const double> x) {
  check_dim(n, x.size(), "classify_point");
  for (double v : x)
    if (!std::isfinite(v)) throw ParameterError("classify_point: non-finite coordinate");
  return classify_scaled<double>(x, 1.0);
}

inline RegionLabel classify_point(int n, const LatticePoint& x) {
  check_dim(n, x.num.size(), "classify_point");
  if (x.den <= 0) throw ParameterError("classify_point: lattice denominator must be positive");
  return classify_scaled<std::int64_t>(x.num, x.den);
}

inline bool label_in_body(const InnerBody& body, const RegionLabel& label) {
  return label.is_core() || (label.is_peak() && body.has_peak(label.orthant));
}

inline bool membership_inner(const InnerBody& body, std::span<const double> x) {
  return label_in_body(body, classify_point(body.dim(), x));
}

inline bool membership_inner(const InnerBody& body, const LatticePoint& x) {
  return label_in_body(body, classify_point(body.dim(), x));
}

/// Brute-force halfspace description: a.x <= 1 for every a in {-1,0,1}^n with
/// exactly one zero entry, plus s.x <= 1 for each missing orthant s.
template <class T>
bool membership_q_scaled(int n, const PeakSet& missing, std::span<const T> num, const T& den) {
  if (n > 12) throw ParameterError("membership_q_oracle: n <= 12 required");
  check_dim(n, num.size(), "membership_q_oracle");
  if (missing.dim() != n) throw ParameterError("membership_q_oracle: missing-set dimension mismatch");
  const std::uint32_t half = std::uint32_t{1} << (n - 1);
  for (int zero = 0; zero < n; ++zero) {
    for (std::uint32_t pattern = 0; pattern < half; ++pattern) {
      T dot(0);
      int bit = 0;
      for (int i = 0; i < n; ++i) {
        if (i == zero) continue;
        if ((pattern >> bit) & 1U)
          dot += num[static_cast<std::size_t>(i)];
        else
          dot -= num[static_cast<std::size_t>(i)];
        ++bit;
      }
      if (dot > den) return false;
    }
  }
  for (std::uint32_t s = 0; s < missing.size(); ++s) {
    if (!missing.test(s)) continue;
    T dot(0);
    for (int i = 0; i < n; ++i) {
      if ((s >> i) & 1U)
        dot += num[static_cast<std::size_t>(i)];
      else
        dot -= num[static_cast<std::size_t>(i)];
    }
    if (dot > den) return false;
  }
  return true;
}

inline bool membership_q_oracle(int n, const PeakSet& missing, std::span<const double> x) {
  return membership_q_scaled<double>(n, missing, x, 1.0);
}

inline bool membership_q_oracle(int n, const PeakSet& missing, const LatticePoint& x) {
  return membership_q_scaled<std::int64_t>(n, missing, x.num, x.den);
}

inline Rational inner_volume(const InnerBody& body) {
  const auto g = make_geometry(body.dim());
  return g.core_volume + Rational(body.peak_count()) * g.peak_volume;
}

/// Draws the region of a uniform point: Core with weight 2^n (n-1), each
/// present peak with weight 1 (exact volume ratio core : peak).
template <class URBG>
RegionLabel sample_region(const InnerBody& body, URBG& rng) {
  const int n = body.dim();
  const std::uint64_t core_weight = (std::uint64_t{1} << n) * static_cast<std::uint64_t>(n - 1);
  const std::uint64_t total = core_weight + body.peak_count();
  std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
  std::uint64_t r = pick(rng);
  if (r < core_weight) return RegionLabel::core();
  r -= core_weight;
  const auto& peaks = body.peaks();
  for (std::uint32_t j = 0; j < peaks.size(); ++j) {
    if (peaks.test(j) && r-- == 0) return RegionLabel::peak(j);
  }
  return RegionLabel::core();  // unreachable: r < peak_count
}

/// Uniform point in one region of an n-dimensional factor. Core: normalized
/// exponentials give a uniform simplex point, then independent uniform signs.
/// Peak(s): normalized exponentials are barycentric weights over the n signed
/// unit vectors and the apex s/(n-1).
template <class URBG>
std::vector<double> sample_in_region(int n, const RegionLabel& region, URBG& rng) {
  if (!region.is_inside()) throw ParameterError("sample_in_region: cannot sample the Outside region");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  double total = 0;
  for (auto& v : w) {
    v = expo(rng);
    total += v;
  }
  for (auto& v : w) v /= total;
  std::vector<double> x(static_cast<std::size_t>(n));
  if (region.is_core()) {
    const std::uint64_t signs = rng();
    for (int i = 0; i < n; ++i) {
      const double y = w[static_cast<std::size_t>(i) + 1];
      x[static_cast<std::size_t>(i)] = ((signs >> i) & 1U) ? y : -y;
    }
  } else {
    const double apex = w[0] / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double y = w[static_cast<std::size_t>(i) + 1] + apex;
      x[static_cast<std::size_t>(i)] = ((region.orthant >> i) & 1U) ? y : -y;
    }
  }
  return x;
}

struct InnerSample {
  std::vector<double> point;
  RegionLabel region;
};

template <class URBG>
InnerSample sample_inner(const InnerBody& body, URBG& rng) {
  const auto region = sample_region(body, rng);
  return {sample_in_region(body.dim(), region, rng), region};
}

}  // namespace xpeak
