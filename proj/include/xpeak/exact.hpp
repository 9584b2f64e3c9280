#pragma once

// Exact and extended-precision number types shared by every module, plus the
// error hierarchy and the random-stream split rule.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace xpeak {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_100;

/// Invalid parameters or malformed input (CLI exit code 2).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A checked construction property failed (CLI exit code 3).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration or pair budget exceeded (CLI exit code 4).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// Split rule for independent streams: stream `index` of master seed `seed`
/// is an mt19937_64 seeded by seed_seq{lo(seed), hi(seed), lo(index), hi(index)}.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline BigInt pow_big(const BigInt& base, unsigned exponent) {
  return boost::multiprecision::pow(base, exponent);
}

inline Rational pow_rational(const Rational& base, unsigned exponent) {
  Rational result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= base;
  return result;
}

inline BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

inline BigInt binomial(unsigned n, unsigned r) {
  if (r > n) return 0;
  if (r > n - r) r = n - r;
  BigInt c = 1;
  for (unsigned i = 1; i <= r; ++i) {
    c *= n - r + i;
    c /= i;
  }
  return c;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline BigFloat to_bigfloat(const Rational& r) {
  return BigFloat(boost::multiprecision::numerator(r)) / BigFloat(boost::multiprecision::denominator(r));
}

inline BigFloat log2_big(const BigFloat& x) { return boost::multiprecision::log(x) / boost::multiprecision::log(BigFloat(2)); }

inline BigFloat log2_big(const BigInt& x) { return log2_big(BigFloat(x)); }

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace xpeak
