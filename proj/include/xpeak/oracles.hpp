#pragma once

// Continuous and discrete random/membership oracles of a product body, the
// simulation of the continuous random oracle from discrete answers, and the
// query transcript.

#include "xpeak/family.hpp"
#include "xpeak/geometry.hpp"

#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace xpeak {

/// One inside label per factor.
struct DiscreteRandomAnswer {
  std::vector<RegionLabel> labels;
  friend bool operator==(const DiscreteRandomAnswer&, const DiscreteRandomAnswer&) = default;
};

/// One peak (orthant index) per factor.
struct DiscreteMembershipQuery {
  std::vector<std::uint32_t> peaks;
  friend bool operator==(const DiscreteMembershipQuery&, const DiscreteMembershipQuery&) = default;
};

struct DiscreteMembershipAnswer {
  std::vector<bool> present;
  friend bool operator==(const DiscreteMembershipAnswer&, const DiscreteMembershipAnswer&) = default;
};

inline void check_point_dim(const ProductBody& body, std::size_t len) {
  if (static_cast<std::size_t>(body.d()) != len)
    throw ParameterError("oracle: point has dimension " + std::to_string(len) + ", body has " + std::to_string(body.d()));
}

/// Uniform point of the product body: independent uniform points per factor.
template <class URBG>
std::vector<double> continuous_random(const ProductBody& body, URBG& rng) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(body.d()));
  for (const auto& f : body.factors) {
    const auto s = sample_inner(f, rng);
    x.insert(x.end(), s.point.begin(), s.point.end());
  }
  return x;
}

inline std::span<const double> factor_block(std::span<const double> x, int n, int factor) {
  return x.subspan(static_cast<std::size_t>(factor * n), static_cast<std::size_t>(n));
}

inline bool continuous_membership(const ProductBody& body, std::span<const double> x) {
  check_point_dim(body, x.size());
  for (int i = 0; i < body.k(); ++i)
    if (!membership_inner(body.factors[static_cast<std::size_t>(i)], factor_block(x, body.n(), i))) return false;
  return true;
}

/// Region labels of a uniform point, without the point. Consumes the random
/// stream exactly like the region step of continuous_random.
template <class URBG>
DiscreteRandomAnswer discrete_random(const ProductBody& body, URBG& rng) {
  DiscreteRandomAnswer a;
  a.labels.reserve(body.factors.size());
  for (const auto& f : body.factors) a.labels.push_back(sample_region(f, rng));
  return a;
}

/// Uniform point in the labelled region of every factor.
template <class URBG>
std::vector<double> simulate_continuous_from_discrete(int n, const DiscreteRandomAnswer& answer, URBG& rng) {
  std::vector<double> x;
  x.reserve(answer.labels.size() * static_cast<std::size_t>(n));
  for (const auto& label : answer.labels) {
    if (!label.is_inside()) throw ParameterError("simulate_continuous_from_discrete: Outside label");
    const auto block = sample_in_region(n, label, rng);
    x.insert(x.end(), block.begin(), block.end());
  }
  return x;
}

inline DiscreteMembershipAnswer discrete_membership(const ProductBody& body, const DiscreteMembershipQuery& query) {
  if (query.peaks.size() != body.factors.size())
    throw ParameterError("discrete_membership: query has " + std::to_string(query.peaks.size()) + " indices, body has " +
                         std::to_string(body.k()) + " factors");
  DiscreteMembershipAnswer a;
  a.present.reserve(query.peaks.size());
  for (std::size_t i = 0; i < query.peaks.size(); ++i) {
    const auto& f = body.factors[i];
    if (query.peaks[i] >= f.peaks().size())
      throw ParameterError("discrete_membership: peak index " + std::to_string(query.peaks[i]) + " out of range");
    a.present.push_back(f.has_peak(query.peaks[i]));
  }
  return a;
}

/// Continuous membership answered through the discrete oracle: each block is
/// classified; any Outside block answers false without a query; Core blocks
/// are members; peak blocks are looked up (non-peak factors ask for peak 0 and
/// ignore the reply). Returns the answer and the discrete query issued, if any.
struct SimulatedMembership {
  bool member = false;
  std::optional<DiscreteMembershipQuery> query;
};

inline SimulatedMembership membership_via_discrete(const ProductBody& body, std::span<const double> x) {
  check_point_dim(body, x.size());
  std::vector<RegionLabel> labels;
  bool any_peak = false;
  for (int i = 0; i < body.k(); ++i) {
    labels.push_back(classify_point(body.n(), factor_block(x, body.n(), i)));
    if (!labels.back().is_inside()) return {false, std::nullopt};
    any_peak = any_peak || labels.back().is_peak();
  }
  if (!any_peak) return {true, std::nullopt};
  DiscreteMembershipQuery q;
  for (const auto& l : labels) q.peaks.push_back(l.is_peak() ? l.orthant : 0);
  const auto a = discrete_membership(body, q);
  bool member = true;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].is_peak() && !a.present[i]) member = false;
  return {member, q};
}

// Transcript log, one line per query:
//   R <label,...>                 labels are C or P<orthant-hex>
//   M <idx,...> -> <bool,...>

enum class QueryKind { Random, Membership };

struct TranscriptEntry {
  QueryKind kind = QueryKind::Random;
  DiscreteRandomAnswer random;
  DiscreteMembershipQuery query;
  DiscreteMembershipAnswer answer;
  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

inline std::string format_label(const RegionLabel& l) {
  if (l.is_core()) return "C";
  if (l.is_peak()) {
    std::ostringstream os;
    os << 'P' << std::hex << l.orthant;
    return os.str();
  }
  throw ParameterError("format_label: Outside is not an oracle answer");
}

inline RegionLabel parse_label(std::string_view s) {
  if (s == "C") return RegionLabel::core();
  if (s.size() >= 2 && s[0] == 'P') {
    std::uint32_t v = 0;
    for (char c : s.substr(1)) {
      int digit = -1;
      if (c >= '0' && c <= '9') digit = c - '0';
      if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
      if (digit < 0 || v > 0x0fffffff) throw ParameterError("transcript: bad label '" + std::string(s) + "'");
      v = v * 16 + static_cast<std::uint32_t>(digit);
    }
    return RegionLabel::peak(v);
  }
  throw ParameterError("transcript: bad label '" + std::string(s) + "'");
}

inline std::string format_entry(const TranscriptEntry& e) {
  std::string out;
  if (e.kind == QueryKind::Random) {
    out = "R ";
    for (std::size_t i = 0; i < e.random.labels.size(); ++i) {
      if (i) out += ',';
      out += format_label(e.random.labels[i]);
    }
  } else {
    out = "M ";
    for (std::size_t i = 0; i < e.query.peaks.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(e.query.peaks[i]);
    }
    out += " -> ";
    for (std::size_t i = 0; i < e.answer.present.size(); ++i) {
      if (i) out += ',';
      out += e.answer.present[i] ? "true" : "false";
    }
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    parts.emplace_back(s.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace detail

inline TranscriptEntry parse_entry(std::string_view line) {
  TranscriptEntry e;
  if (line.size() > 2 && line.substr(0, 2) == "R ") {
    e.kind = QueryKind::Random;
    for (const auto& p : detail::split_commas(line.substr(2))) e.random.labels.push_back(parse_label(p));
    return e;
  }
  if (line.size() > 2 && line.substr(0, 2) == "M ") {
    e.kind = QueryKind::Membership;
    const auto arrow = line.find(" -> ");
    if (arrow == std::string_view::npos) throw ParameterError("transcript: missing ' -> ' in '" + std::string(line) + "'");
    for (const auto& p : detail::split_commas(line.substr(2, arrow - 2))) {
      try {
        std::size_t used = 0;
        e.query.peaks.push_back(static_cast<std::uint32_t>(std::stoul(p, &used)));
        if (used != p.size()) throw ParameterError("");
      } catch (const std::exception&) {
        throw ParameterError("transcript: bad peak index '" + p + "'");
      }
    }
    for (const auto& p : detail::split_commas(line.substr(arrow + 4))) {
      if (p != "true" && p != "false") throw ParameterError("transcript: bad boolean '" + p + "'");
      e.answer.present.push_back(p == "true");
    }
    if (e.answer.present.size() != e.query.peaks.size()) throw ParameterError("transcript: query/answer length mismatch");
    return e;
  }
  throw ParameterError("transcript: unknown line '" + std::string(line) + "'");
}

/// Append-only query history.
class Transcript {
 public:
  void append_random(DiscreteRandomAnswer a) {
    TranscriptEntry e;
    e.kind = QueryKind::Random;
    e.random = std::move(a);
    entries_.push_back(std::move(e));
  }
  void append_membership(DiscreteMembershipQuery q, DiscreteMembershipAnswer a) {
    TranscriptEntry e;
    e.kind = QueryKind::Membership;
    e.query = std::move(q);
    e.answer = std::move(a);
    entries_.push_back(std::move(e));
  }
  void append(TranscriptEntry e) { entries_.push_back(std::move(e)); }

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::size_t query_count() const { return entries_.size(); }

  std::string to_log() const {
    std::string out;
    for (const auto& e : entries_) out += format_entry(e) + '\n';
    return out;
  }

  static Transcript parse_log(std::string_view log) {
    Transcript t;
    std::size_t start = 0;
    while (start < log.size()) {
      auto end = log.find('\n', start);
      if (end == std::string_view::npos) end = log.size();
      if (end > start) t.append(parse_entry(log.substr(start, end - start)));
      start = end + 1;
    }
    return t;
  }

 private:
  std::vector<TranscriptEntry> entries_;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The learner's view of a hidden body: discrete oracles with a query budget,
/// every answer recorded in the transcript.
class OracleSession {
 public:
  OracleSession(const ProductBody& hidden, Rng& rng, std::size_t budget) : hidden_(hidden), rng_(rng), budget_(budget) {}

  int n() const { return hidden_.n(); }
  int k() const { return hidden_.k(); }
  std::size_t budget() const { return budget_; }
  std::size_t remaining() const { return budget_ - transcript_.query_count(); }
  const Transcript& transcript() const { return transcript_; }

  const DiscreteRandomAnswer& random() {
    spend();
    transcript_.append_random(discrete_random(hidden_, rng_));
    return transcript_.entries().back().random;
  }

  const DiscreteMembershipAnswer& membership(const DiscreteMembershipQuery& q) {
    spend();
    transcript_.append_membership(q, discrete_membership(hidden_, q));
    return transcript_.entries().back().answer;
  }

 private:
  void spend() {
    if (transcript_.query_count() >= budget_) throw BudgetExceeded("oracle session: query budget of " + std::to_string(budget_) + " exhausted");
  }

  const ProductBody& hidden_;
  Rng& rng_;
  std::size_t budget_;
  Transcript transcript_;
};

}  // namespace xpeak
