#pragma once

// The query game against a hidden body of a product family, baseline
// learners, and the finite-size accounting: decision-tree success bound,
// parameter selection and the query lower bound.

#include "xpeak/exact.hpp"
#include "xpeak/family.hpp"
#include "xpeak/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace xpeak {

/// Whether body `index` of `fam` could have produced every answer.
inline bool consistent_with(const ProductFamily& fam, std::size_t index, const TranscriptEntry& e) {
  if (e.kind == QueryKind::Random) {
    for (int f = 0; f < fam.k(); ++f) {
      const auto& label = e.random.labels.at(static_cast<std::size_t>(f));
      if (label.is_peak() && !fam.factor(index, f).has_peak(label.orthant)) return false;
      if (!label.is_inside()) return false;
    }
    return true;
  }
  for (int f = 0; f < fam.k(); ++f) {
    const auto i = static_cast<std::size_t>(f);
    if (fam.factor(index, f).has_peak(e.query.peaks.at(i)) != e.answer.present.at(i)) return false;
  }
  return true;
}

inline std::vector<std::size_t> consistent_set(const ProductFamily& fam, const Transcript& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    bool ok = true;
    for (const auto& e : t.entries())
      if (!consistent_with(fam, i, e)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(i);
  }
  return out;
}

/// All consistent bodies have equal volume and equal peak counts, so every
/// one of them has the same likelihood; ties go to the lowest index, or to a
/// uniform pick when `tie_rng` is given.
inline std::size_t ml_consistency_learner(const Transcript& t, const ProductFamily& fam, Rng* tie_rng = nullptr) {
  const auto candidates = consistent_set(fam, t);
  if (candidates.empty()) throw VerificationError("ml_consistency_learner: no body is consistent with the transcript");
  if (tie_rng == nullptr) return candidates.front();
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(*tie_rng)];
}

/// A learner's output: a family index, or a free-form product of inner bodies.
struct Hypothesis {
  std::optional<std::size_t> index;
  ProductBody body;

  static Hypothesis member(std::size_t i) { return {i, {}}; }
  static Hypothesis freeform(ProductBody b) { return {std::nullopt, std::move(b)}; }
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  /// May use at most session.budget() queries; the rng is the trial's stream.
  virtual Hypothesis learn(OracleSession& session, const ProductFamily& fam, Rng& rng) = 0;
};

enum class QueryPolicy { Random, Membership, Mixed };

/// Consistency (maximum-likelihood) learner. Random steps draw from the random
/// oracle; membership steps ask, in every factor, for the peak whose presence
/// splits the surviving candidates most evenly. Mixed alternates, starting with
/// a random draw. Stops early once one candidate remains.
class MlLearner : public Learner {
 public:
  explicit MlLearner(QueryPolicy policy = QueryPolicy::Mixed, bool shuffle_ties = false) : policy_(policy), shuffle_ties_(shuffle_ties) {}

  std::string name() const override { return "ml"; }

  Hypothesis learn(OracleSession& session, const ProductFamily& fam, Rng& rng) override {
    std::vector<std::size_t> candidates(fam.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    for (std::size_t step = 0; session.remaining() > 0 && candidates.size() > 1; ++step) {
      const bool use_random = policy_ == QueryPolicy::Random || (policy_ == QueryPolicy::Mixed && step % 2 == 0);
      if (use_random)
        session.random();
      else
        session.membership(best_split(fam, candidates));
      const auto& e = session.transcript().entries().back();
      std::erase_if(candidates, [&](std::size_t i) { return !consistent_with(fam, i, e); });
    }
    return Hypothesis::member(ml_consistency_learner(session.transcript(), fam, shuffle_ties_ ? &rng : nullptr));
  }

  static DiscreteMembershipQuery best_split(const ProductFamily& fam, const std::vector<std::size_t>& candidates) {
    DiscreteMembershipQuery q;
    const std::uint32_t peaks = std::uint32_t{1} << fam.n();
    for (int f = 0; f < fam.k(); ++f) {
      std::vector<std::size_t> present(peaks, 0);
      for (auto i : candidates)
        for (auto o : fam.factor(i, f).peaks().members()) ++present[o];
      std::uint32_t best = 0;
      std::size_t best_score = 0;
      for (std::uint32_t o = 0; o < peaks; ++o) {
        const std::size_t score = std::min(present[o], candidates.size() - present[o]);
        if (score > best_score) {
          best_score = score;
          best = o;
        }
      }
      q.peaks.push_back(best);
    }
    return q;
  }

 private:
  QueryPolicy policy_;
  bool shuffle_ties_;
};

/// Ignores the oracles and guesses a uniform family member.
class RandomGuessLearner : public Learner {
 public:
  std::string name() const override { return "random"; }
  Hypothesis learn(OracleSession&, const ProductFamily& fam, Rng& rng) override {
    std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
    return Hypothesis::member(pick(rng));
  }
};

struct GameConfig {
  const ProductFamily* family = nullptr;
  std::size_t query_budget = 0;
  Rational epsilon{1, 32};
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
};

struct GameStats {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t exact_identifications = 0;
  std::size_t budget_violations = 0;

  double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
  /// Binomial standard error of the success rate at probability p.
  static double sigma(double p, std::size_t trials) { return std::sqrt(p * (1 - p) / static_cast<double>(trials)); }
  double std_error() const { return sigma(success_rate(), trials); }
  /// 95% normal-approximation radius.
  double confidence_radius() const { return 1.96 * std_error(); }
};

/// Plays `trials` independent games. Trial t uses stream derive_stream(seed, t):
/// the hidden body index is its first draw, the learner consumes the rest.
inline GameStats run_game(const GameConfig& config, Learner& learner) {
  if (config.family == nullptr || config.family->size() == 0) throw ParameterError("run_game: no family");
  if (config.epsilon <= 0 || config.epsilon >= 1) throw ParameterError("run_game: epsilon must lie in (0,1)");
  const auto& fam = *config.family;
  const Rational separation = min_pairwise_distance(fam);
  if (fam.size() >= 2 && !(2 * config.epsilon < separation))
    throw ParameterError("run_game: 2*epsilon must be below the family's minimum pairwise distance " + separation.str());

  GameStats stats;
  std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
  for (std::size_t t = 0; t < config.trials; ++t) {
    auto rng = derive_stream(config.seed, t);
    const std::size_t hidden = pick(rng);
    const auto body = fam.body(hidden);
    OracleSession session(body, rng, config.query_budget);
    ++stats.trials;
    Hypothesis h;
    try {
      h = learner.learn(session, fam, rng);
    } catch (const BudgetExceeded&) {
      ++stats.budget_violations;
      continue;
    }
    const Rational dist = h.index ? family_distance(fam, *h.index, hidden) : general_distance(h.body, body);
    if (dist <= config.epsilon) ++stats.successes;
    if (h.index && *h.index == hidden) ++stats.exact_identifications;
  }
  return stats;
}

/// 2*epsilon < 1 - e^{-k/(16n)}.
inline bool separation_holds(int n, int k, const Rational& epsilon) {
  return to_bigfloat(2 * epsilon) < distance_lemma_bound(n, k);
}

/// min(1, (2^n+1)^{kq} / family_size): a decision tree with q queries has at
/// most that many leaves, and each leaf is within epsilon of at most one body.
inline Rational success_upper_bound(int n, int k, std::size_t q, const BigInt& family_size, const Rational& epsilon) {
  if (n < 1 || k < 1 || family_size < 1) throw ParameterError("success_upper_bound: bad parameters");
  if (!separation_holds(n, k, epsilon))
    throw ParameterError("success_upper_bound: 2*epsilon >= 1 - e^{-k/(16n)}, the leaf-counting bound does not apply");
  const BigInt branch = (BigInt(1) << n) + 1;
  const BigFloat leaves_log2 = BigFloat(k) * BigFloat(q) * log2_big(branch);
  if (leaves_log2 > log2_big(family_size) + 1) return 1;
  const BigInt leaves = pow_big(branch, static_cast<unsigned>(k * q));
  if (leaves >= family_size) return 1;
  return Rational(leaves, family_size);
}

struct ParameterChoice {
  int d = 0;
  Rational epsilon;
  int n = 0;
  int k = 0;
  double scale = 0;  // sqrt(d / ln(1/(1-2 epsilon)))
  bool separation = false;
};

inline bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

inline BigFloat parameter_scale(int d, const Rational& epsilon) {
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  return sqrt(BigFloat(d) / log(1 / (1 - to_bigfloat(2 * epsilon))));
}

/// n = the smallest power of two >= sqrt(d / ln(1/(1-2 eps))), k = d/n, with
/// 2 <= scale <= n < 4*scale <= d checked. `separation` reports whether
/// 2 eps < 1 - e^{-k/(16n)} also holds.
inline ParameterChoice choose_parameters(int d, const Rational& epsilon) {
  if (!is_power_of_two(d)) throw ParameterError("choose_parameters: d must be a power of two");
  if (epsilon < Rational(8, d) || epsilon > Rational(1, 8)) throw ParameterError("choose_parameters: epsilon must lie in [8/d, 1/8]");
  const BigFloat s = parameter_scale(d, epsilon);
  int n = 1;
  while (BigFloat(n) < s) n *= 2;
  if (!(BigFloat(2) <= s && s <= BigFloat(n) && BigFloat(n) < 4 * s && 4 * s <= BigFloat(d)))
    throw ParameterError("choose_parameters: inequality chain 2 <= s <= n < 4s <= d fails");
  ParameterChoice c;
  c.d = d;
  c.epsilon = epsilon;
  c.n = n;
  c.k = d / n;
  c.scale = s.convert_to<double>();
  c.separation = separation_holds(c.n, c.k, epsilon);
  return c;
}

/// Least q >= 0 with (2^n+1)^{kq} >= (1-delta) * family_size, exactly.
inline std::uint64_t query_lower_bound_exact(int n, int k, const Rational& delta, const BigInt& family_size) {
  if (delta < 0 || delta >= 1) throw ParameterError("query_lower_bound: delta must lie in [0,1)");
  if (family_size < 1) throw ParameterError("query_lower_bound: family size must be >= 1");
  const BigInt per_query = pow_big((BigInt(1) << n) + 1, static_cast<unsigned>(k));
  const Rational target = (1 - delta) * Rational(family_size);
  std::uint64_t q = 0;
  BigInt leaves = 1;
  while (Rational(leaves) < target) {
    leaves *= per_query;
    ++q;
  }
  return q;
}

struct QueryBound {
  ParameterChoice params;
  Rational delta;
  bool ball_exact = false;      // V_2 computed exactly (else entropy bound)
  BigFloat log2_inner_size;     // lower bound on log2 |inner family|
  BigFloat log2_family_size;    // lower bound on log2 |product family|
  BigFloat log2_q;              // log2 of the least q, or -1 when q = 0
  std::optional<BigInt> q;      // exact when log2 q < 300
  double asymptotic_log2 = 0;   // sqrt(d / ln(1/(1-2 eps)))
};

namespace detail {

inline BigFloat binary_entropy(const BigFloat& p) {
  using boost::multiprecision::log;
  const BigFloat ln2 = log(BigFloat(2));
  return -(p * log(p) + (1 - p) * log(1 - p)) / ln2;
}

}  // namespace detail

/// Finite-size lower bound on |inner family| for factor dimension n:
/// log2 ceil(2^N / V_2(N, r)) with N = 2^(n-1), r = ceil(2^n/8) - 1. Exact for
/// N <= 4096, otherwise via V_2(N, r) <= 2^{N H(r/N)}.
inline BigFloat log2_inner_family_lower_bound(int n, bool* exact = nullptr) {
  if (n - 1 <= 12) {
    const unsigned N = 1U << (n - 1);
    const unsigned r = inner_half_code_distance(n) - 1;
    const BigInt space = BigInt(1) << N;
    const BigInt ball = v_q(2, N, r);
    if (exact) *exact = true;
    return log2_big((space + ball - 1) / ball);
  }
  if (exact) *exact = false;
  using boost::multiprecision::ldexp;
  const BigFloat N = ldexp(BigFloat(1), n - 1);
  const BigFloat r = ldexp(BigFloat(1), n - 3) - 1;
  return N * (1 - detail::binary_entropy(r / N));
}

/// The query floor: least q with (2^n+1)^{kq} >= (1-delta) F_lb, where
/// F_lb = (|inner|_lb / 4)^{k/2} is the certified family-size lower bound.
inline QueryBound query_lower_bound(int d, const Rational& epsilon, const Rational& delta) {
  if (delta < 0 || delta >= 1) throw ParameterError("query_lower_bound: delta must lie in [0,1)");
  QueryBound b;
  b.params = choose_parameters(d, epsilon);
  b.delta = delta;
  b.asymptotic_log2 = b.params.scale;
  const int n = b.params.n;
  const int k = b.params.k;
  b.log2_inner_size = log2_inner_family_lower_bound(n, &b.ball_exact);
  b.log2_family_size = BigFloat(k) / 2 * (b.log2_inner_size - 2);
  if (b.log2_family_size < 0) b.log2_family_size = 0;
  using boost::multiprecision::ceil;
  using boost::multiprecision::ldexp;
  const BigFloat per_query = BigFloat(k) * (BigFloat(n) + log2_big(1 + ldexp(BigFloat(1), -n)));
  const BigFloat x = (b.log2_family_size + log2_big(to_bigfloat(1 - delta))) / per_query;
  if (x <= 0) {
    b.q = BigInt(0);
    b.log2_q = -1;
    return b;
  }
  const BigFloat q = ceil(x);
  b.log2_q = log2_big(q);
  if (b.log2_q < 300) b.q = static_cast<BigInt>(q);
  return b;
}

}  // namespace xpeak
