#pragma once

// Binary and q-ary block codes: Hamming-ball volumes, lexicographic greedy
// (Gilbert-Varshamov) construction, constant-weight complement extension,
// exhaustive minimum-distance certification and the text format.

#include "xpeak/exact.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace xpeak {

using Word = std::vector<std::uint32_t>;

struct CodeBudget {
  /// Max q^length words a greedy scan may enumerate.
  std::uint64_t enumeration = std::uint64_t{1} << 24;
  /// Max word pairs an exhaustive distance certification may visit.
  std::uint64_t pairs = std::uint64_t{1} << 28;
};

inline std::uint32_t hamming_distance(const Word& a, const Word& b) {
  if (a.size() != b.size()) throw ParameterError("hamming_distance: length mismatch");
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

/// V_q(n, r) = sum_{i=0}^{r} C(n,i) (q-1)^i.
inline BigInt v_q(unsigned q, unsigned n, unsigned r) {
  if (q < 2) throw ParameterError("v_q: q must be >= 2");
  if (r > n) throw ParameterError("v_q: r must be <= n");
  BigInt total = 0;
  BigInt power = 1;
  for (unsigned i = 0; i <= r; ++i) {
    total += binomial(n, i) * power;
    power *= q - 1;
  }
  return total;
}

/// ceil(q^n / V_q(n, d-1)), the size the greedy construction must reach.
inline BigInt gv_floor(unsigned q, unsigned n, unsigned d) {
  if (d < 1) throw ParameterError("gv_floor: d must be >= 1");
  const BigInt space = pow_big(BigInt(q), n);
  const BigInt ball = v_q(q, n, d - 1);
  return (space + ball - 1) / ball;
}

namespace detail {

// Words of length <= 8 over q <= 256, one byte per symbol.
inline bool packable(unsigned q, std::size_t len) { return q <= 256 && len <= 8; }

inline std::uint64_t pack(const Word& w) {
  std::uint64_t p = 0;
  for (std::size_t i = 0; i < w.size(); ++i) p |= std::uint64_t{w[i]} << (8 * i);
  return p;
}

inline std::uint32_t packed_distance(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ b;
  x |= x >> 4;
  x |= x >> 2;
  x |= x >> 1;
  return static_cast<std::uint32_t>(std::popcount(x & 0x0101010101010101ULL));
}

}  // namespace detail

/// Exact minimum pairwise Hamming distance. Rejects codes with fewer than two
/// words (undefined) and codes containing a repeated word.
inline std::uint32_t min_distance_exhaustive(const std::vector<Word>& words, unsigned q, const CodeBudget& budget = {}) {
  const std::uint64_t m = words.size();
  if (m < 2) throw ParameterError("min_distance_exhaustive: needs at least two words");
  if (m * (m - 1) / 2 > budget.pairs) throw ResourceError("min_distance_exhaustive: pair budget exceeded (" + std::to_string(m) + " words)");
  std::uint32_t best = UINT32_MAX;
  if (detail::packable(q, words[0].size())) {
    std::vector<std::uint64_t> packed;
    packed.reserve(words.size());
    for (const auto& w : words) packed.push_back(detail::pack(w));
    for (std::size_t i = 0; i < packed.size(); ++i)
      for (std::size_t j = i + 1; j < packed.size(); ++j) best = std::min(best, detail::packed_distance(packed[i], packed[j]));
  } else {
    for (std::size_t i = 0; i < words.size(); ++i)
      for (std::size_t j = i + 1; j < words.size(); ++j) best = std::min(best, hamming_distance(words[i], words[j]));
  }
  if (best == 0) throw ParameterError("min_distance_exhaustive: code contains a repeated word");
  return best;
}

class Code {
 public:
  Code() = default;

  /// Validates symbols and lengths and certifies the minimum distance
  /// exhaustively. `dmin` is the exact minimum for two or more words and 0
  /// (undefined) for smaller codes.
  Code(unsigned q, unsigned length, std::vector<Word> words, const CodeBudget& budget = {})
      : q_(q), length_(length), words_(std::move(words)) {
    if (q < 2) throw ParameterError("Code: alphabet size must be >= 2");
    if (length < 1) throw ParameterError("Code: length must be >= 1");
    for (const auto& w : words_) {
      if (w.size() != length) throw ParameterError("Code: word length mismatch");
      for (auto s : w)
        if (s >= q) throw ParameterError("Code: symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(q));
    }
    if (words_.size() >= 2) {
      dmin_ = min_distance_exhaustive(words_, q_, budget);
    } else {
      dmin_ = 0;
    }
  }

  unsigned alphabet_size() const { return q_; }
  unsigned length() const { return length_; }
  unsigned min_distance() const { return dmin_; }
  std::size_t size() const { return words_.size(); }
  bool is_binary() const { return q_ == 2; }
  const std::vector<Word>& words() const { return words_; }
  const Word& word(std::size_t i) const { return words_.at(i); }

  unsigned weight(std::size_t i) const {
    return static_cast<unsigned>(std::count_if(words_.at(i).begin(), words_.at(i).end(), [](auto s) { return s != 0; }));
  }

  friend bool operator==(const Code&, const Code&) = default;

 private:
  unsigned q_ = 2;
  unsigned length_ = 0;
  unsigned dmin_ = 0;
  std::vector<Word> words_;
};

using BinaryCode = Code;
using QaryCode = Code;

namespace detail {

inline void mark_ball(std::vector<std::uint8_t>& covered, std::vector<std::uint32_t>& sym, std::uint64_t index,
                      const std::vector<std::uint64_t>& place, unsigned q, std::size_t start, unsigned radius) {
  covered[index] = 1;
  if (radius == 0) return;
  for (std::size_t pos = start; pos < sym.size(); ++pos) {
    const std::uint32_t original = sym[pos];
    const std::uint64_t base = index - std::uint64_t{original} * place[pos];
    for (std::uint32_t s = 0; s < q; ++s) {
      if (s == original) continue;
      sym[pos] = s;
      mark_ball(covered, sym, base + std::uint64_t{s} * place[pos], place, q, pos + 1, radius - 1);
    }
    sym[pos] = original;
  }
}

}  // namespace detail

/// Deterministic lexicographic greedy: scan all q^length words in
/// lexicographic order (position 0 most significant) and keep a word iff it is
/// at distance >= min_dist from every kept word. The scan marks the radius
/// (min_dist-1) ball around each kept word, so "not marked" is the keep test.
inline Code gv_greedy(unsigned q, unsigned length, unsigned min_dist, const CodeBudget& budget = {}) {
  if (q < 2 || length < 1) throw ParameterError("gv_greedy: need q >= 2 and length >= 1");
  if (min_dist < 1 || min_dist > length) throw ParameterError("gv_greedy: min_dist must be in [1, length]");
  const BigInt space = pow_big(BigInt(q), length);
  if (space > BigInt(budget.enumeration))
    throw ResourceError("gv_greedy: q^length = " + space.str() + " exceeds enumeration budget " + std::to_string(budget.enumeration));
  const auto total = space.convert_to<std::uint64_t>();

  std::vector<std::uint64_t> place(length);
  std::uint64_t p = 1;
  for (unsigned i = length; i-- > 0;) {
    place[i] = p;
    p *= q;
  }

  std::vector<std::uint8_t> covered(total, 0);
  std::vector<Word> kept;
  Word sym(length, 0);
  for (std::uint64_t index = 0; index < total; ++index) {
    std::uint64_t rest = index;
    for (unsigned i = 0; i < length; ++i) {
      sym[i] = static_cast<std::uint32_t>(rest / place[i]);
      rest %= place[i];
    }
    if (covered[index]) continue;
    kept.push_back(sym);
    detail::mark_ball(covered, sym, index, place, q, 0, min_dist - 1);
  }

  Code code(q, length, std::move(kept), budget);
  if (code.size() >= 2 && code.min_distance() < min_dist)
    throw VerificationError("gv_greedy: certified distance below target (construction bug)");
  if (BigInt(code.size()) < gv_floor(q, length, min_dist)) throw VerificationError("gv_greedy: size below the Gilbert-Varshamov floor");
  return code;
}

/// {(c, complement(c))}: length doubles, every word has weight = length.
inline Code complement_extend(const Code& code, const CodeBudget& budget = {}) {
  if (!code.is_binary()) throw ParameterError("complement_extend: binary code required");
  std::vector<Word> out;
  out.reserve(code.size());
  for (const auto& w : code.words()) {
    Word e(w);
    for (auto s : w) e.push_back(1 - s);
    out.push_back(std::move(e));
  }
  return Code(2, 2 * code.length(), std::move(out), budget);
}

// Text format: header `q=<int> len=<int> dmin=<int>` then one word per line,
// bit-strings for q=2 and comma-separated symbols otherwise.

inline std::string format_word(const Word& w, unsigned q) {
  std::string s;
  if (q == 2) {
    for (auto b : w) s.push_back(b ? '1' : '0');
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s.push_back(',');
      s += std::to_string(w[i]);
    }
  }
  return s;
}

inline Word parse_word(const std::string& line, unsigned q, unsigned length) {
  Word w;
  if (q == 2) {
    for (char c : line) {
      if (c != '0' && c != '1') throw ParameterError("code: bad binary word '" + line + "'");
      w.push_back(c == '1');
    }
  } else {
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(item, &used);
        if (used != item.size()) throw ParameterError("");
        w.push_back(static_cast<std::uint32_t>(v));
      } catch (const std::exception&) {
        throw ParameterError("code: bad symbol '" + item + "' in word '" + line + "'");
      }
    }
  }
  if (w.size() != length) throw ParameterError("code: word '" + line + "' has wrong length");
  return w;
}

inline void write_code(std::ostream& os, const Code& code) {
  os << "q=" << code.alphabet_size() << " len=" << code.length() << " dmin=" << code.min_distance() << '\n';
  for (const auto& w : code.words()) os << format_word(w, code.alphabet_size()) << '\n';
}

/// Reads a header and `count` words (or words up to EOF / a blank line when
/// `count` is empty). The stated dmin must equal the recertified one.
inline Code read_code(std::istream& is, std::optional<std::size_t> count = std::nullopt, const CodeBudget& budget = {}) {
  std::string header;
  if (!std::getline(is, header)) throw ParameterError("code: missing header");
  unsigned q = 0, len = 0, dmin = 0;
  {
    char tail = 0;
    if (std::sscanf(header.c_str(), "q=%u len=%u dmin=%u%c", &q, &len, &dmin, &tail) != 3)
      throw ParameterError("code: bad header '" + header + "'");
  }
  if (q < 2 || len < 1) throw ParameterError("code: bad header '" + header + "'");
  std::vector<Word> words;
  std::string line;
  while ((!count || words.size() < *count) && std::getline(is, line)) {
    if (line.empty()) {
      if (count) throw ParameterError("code: unexpected blank line");
      break;
    }
    words.push_back(parse_word(line, q, len));
  }
  if (count && words.size() != *count) throw ParameterError("code: expected " + std::to_string(*count) + " words");
  std::set<Word> unique(words.begin(), words.end());
  if (unique.size() != words.size()) throw ParameterError("code: repeated word");
  Code code(q, len, std::move(words), budget);
  if (code.min_distance() != dmin)
    throw VerificationError("code: header dmin=" + std::to_string(dmin) + " but certified dmin=" + std::to_string(code.min_distance()));
  return code;
}

}  // namespace xpeak
