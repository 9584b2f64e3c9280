// xpeak: family generation, verification, oracles, games and bounds.
//
// Exit codes: 0 ok, 2 parameter error, 3 verification failure, 4 resource budget exceeded.

#include "xpeak/xpeak.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace xpeak;

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitVerification = 3;
constexpr int kExitResource = 4;

ProductFamily load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open manifest '" + path + "'");
  return read_manifest(in);
}

std::size_t check_index(const ProductFamily& fam, long long index) {
  if (index < 0 || static_cast<std::uint64_t>(index) >= fam.size())
    throw ParameterError("body index " + std::to_string(index) + " out of range [0, " + std::to_string(fam.size()) + ")");
  return static_cast<std::size_t>(index);
}

// BigInt's string constructor reads a leading 0 as octal.
BigInt parse_decimal(std::string digits) {
  bool negative = false;
  if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
    negative = digits[0] == '-';
    digits.erase(0, 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) throw ParameterError("not a decimal integer");
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  const BigInt v(digits);
  return negative ? BigInt(-v) : v;
}

/// "3/8", "-0.45", "2" as an exact rational.
Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const BigInt den = parse_decimal(text.substr(slash + 1));
      if (den <= 0) throw ParameterError("");
      return Rational(parse_decimal(text.substr(0, slash)), den);
    }
    std::string digits = text;
    bool negative = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      negative = digits[0] == '-';
      digits.erase(0, 1);
    }
    const auto dot = digits.find('.');
    BigInt scale = 1;
    if (dot != std::string::npos) {
      scale = pow_big(BigInt(10), static_cast<unsigned>(digits.size() - dot - 1));
      digits.erase(dot, 1);
    }
    const Rational r(parse_decimal(digits), scale);
    return negative ? Rational(-r) : r;
  } catch (const std::exception&) {
    throw ParameterError("'" + text + "' is not a number (use decimals or p/q)");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string fixed(double v, int digits = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- gen-family -------------------------------------------------------------

int cmd_gen_family(int n, int k, const std::string& out) {
  const auto fam = build_product_family(n, k);
  std::ofstream os(out);
  if (!os) throw ParameterError("cannot write '" + out + "'");
  write_manifest(os, fam);
  std::cout << "n=" << fam.n() << " k=" << fam.k() << " d=" << fam.d() << " inner_size=" << fam.inner().size() << " family_size=" << fam.size()
            << " outer_dmin=" << fam.outer().min_distance() << " inner_dmin=" << fam.inner().code.min_distance() << '\n';
  return 0;
}

// ---- verify -----------------------------------------------------------------

class Checker {
 public:
  explicit Checker(std::uint64_t seed) : seed_(seed) {}

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    if (!ok) throw VerificationError(name + " failed" + (detail.empty() ? "" : ": " + detail) + " (reproduce with --seed " + std::to_string(seed_) + ")");
    std::cout << "ok   " << name << (detail.empty() ? "" : "  " + detail) << '\n';
  }

 private:
  std::uint64_t seed_;
};

int cmd_verify(const std::string& path, std::uint64_t seed, std::uint64_t points) {
  // reading already certifies both codes' minimum distances and the inner code shape
  const auto fam = load_manifest(path);
  Checker c(seed);
  const int n = fam.n(), k = fam.k();
  std::cout << "manifest n=" << n << " k=" << k << " family_size=" << fam.size() << '\n';
  c.check("codes certified", true, "inner dmin=" + std::to_string(fam.inner().code.min_distance()) + " outer dmin=" + std::to_string(fam.outer().min_distance()));

  const auto g = make_geometry(n);
  c.check("peak volume", pow_big(BigInt(2), static_cast<unsigned>(n)) * g.peak_volume == g.core_volume / (n - 1), g.peak_volume.str());
  c.check("equal volumes", equal_volumes(fam), product_volume(fam.body(0)).str());
  c.check("factor ratio", factor_ratio_holds(fam.inner()));
  c.check("cardinality", cardinality_holds(fam), std::to_string(fam.size()) + " bodies");

  PairScan scan;
  scan.seed = seed;
  const auto rep = verify_distance_lemma(fam, scan);
  c.check("distance lemma", rep.ok(),
          (rep.ok() ? "" : rep.violations.front() + "; ") + std::to_string(rep.pairs_checked) + (rep.all_pairs ? " pairs (all)" : " pairs (sampled)") +
              " min dist " + rep.min_distance.str() + " > " + fixed(rep.bound));
  c.check("common peaks", Rational(rep.max_common_peaks) <= rep.common_peak_limit,
          std::to_string(rep.max_common_peaks) + " <= " + rep.common_peak_limit.str());

  auto rng = derive_stream(seed, 0);
  if (n <= 12) {
    std::uint64_t disagreements = 0;
    const std::int64_t den = 4096;
    std::uniform_int_distribution<std::int64_t> coord(-den * 6 / 5, den * 6 / 5);
    for (const auto& body : fam.inner().bodies) {
      const auto missing = body.peaks().complement();
      for (std::uint64_t t = 0; t < points; ++t) {
        LatticePoint x{std::vector<std::int64_t>(static_cast<std::size_t>(n)), den};
        for (auto& v : x.num) v = coord(rng);
        if (membership_inner(body, x) != membership_q_oracle(n, missing, x)) ++disagreements;
      }
    }
    c.check("membership vs halfspaces", disagreements == 0, std::to_string(points * fam.inner().size()) + " lattice points");
  }

  std::uint64_t outside = 0, mislabelled = 0;
  std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
  for (std::uint64_t t = 0; t < points; ++t) {
    const auto body = fam.body(pick(rng));
    if (!continuous_membership(body, continuous_random(body, rng))) ++outside;
    const auto answer = discrete_random(body, rng);
    const auto x = simulate_continuous_from_discrete(n, answer, rng);
    for (int f = 0; f < k; ++f)
      if (classify_point(n, factor_block(x, n, f)) != answer.labels[static_cast<std::size_t>(f)]) ++mislabelled;
    if (membership_via_discrete(body, x).member != continuous_membership(body, x)) ++mislabelled;
  }
  c.check("samplers", outside == 0 && mislabelled == 0, std::to_string(points) + " draws");
  std::cout << "all checks passed\n";
  return 0;
}

// ---- sample / member ----------------------------------------------------------

int cmd_sample(const std::string& path, long long index, std::uint64_t count, std::uint64_t seed, const std::string& format) {
  const auto fam = load_manifest(path);
  const auto body = fam.body(check_index(fam, index));
  auto rng = derive_stream(seed, 0);
  if (format == "points") {
    for (int i = 0; i < body.d(); ++i) std::cout << (i ? "," : "") << 'x' << i;
    std::cout << '\n';
    char buf[32];
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto x = continuous_random(body, rng);
      for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", x[i]);
        std::cout << (i ? "," : "") << buf;
      }
      std::cout << '\n';
    }
  } else {
    Transcript t;
    for (std::uint64_t i = 0; i < count; ++i) t.append_random(discrete_random(body, rng));
    std::cout << t.to_log();
  }
  return 0;
}

int cmd_member(const std::string& path, long long index, const std::string& point) {
  const auto fam = load_manifest(path);
  const auto body = fam.body(check_index(fam, index));
  const auto parts = split(point, ',');
  if (parts.size() != static_cast<std::size_t>(body.d()))
    throw ParameterError("point has " + std::to_string(parts.size()) + " coordinates, body dimension is " + std::to_string(body.d()));
  std::vector<Rational> x;
  BigInt den = 1;
  for (const auto& p : parts) {
    x.push_back(parse_rational(p));
    den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x.back()));
  }
  // exact test: scale every block to integers over the common denominator
  bool member = true;
  for (int f = 0; f < body.k(); ++f) {
    std::vector<BigInt> num;
    for (int i = 0; i < body.n(); ++i) {
      const Rational v = x[static_cast<std::size_t>(f * body.n() + i)] * den;
      num.push_back(boost::multiprecision::numerator(v));
    }
    const auto label = classify_scaled<BigInt>(num, den);
    if (!label_in_body(body.factors[static_cast<std::size_t>(f)], label)) member = false;
  }
  std::cout << (member ? "true" : "false") << '\n';
  return 0;
}

// ---- game -------------------------------------------------------------------

int cmd_game(const std::string& path, const std::vector<std::size_t>& qs, const std::string& eps_text, std::size_t trials, std::uint64_t seed,
             const std::string& learner_name, const std::string& csv) {
  const auto fam = load_manifest(path);
  const Rational eps = parse_rational(eps_text);
  std::unique_ptr<Learner> learner;
  if (learner_name == "ml")
    learner = std::make_unique<MlLearner>();
  else
    learner = std::make_unique<RandomGuessLearner>();

  std::ostringstream out;
  out << "n,k,d,family_size,q,trials,successes,success_rate,upper_bound,seed\n";
  const bool bounded = separation_holds(fam.n(), fam.k(), eps);
  for (auto q : qs) {
    const auto s = run_game(GameConfig{&fam, q, eps, trials, seed}, *learner);
    out << fam.n() << ',' << fam.k() << ',' << fam.d() << ',' << fam.size() << ',' << q << ',' << s.trials << ',' << s.successes << ','
        << fixed(s.success_rate()) << ',';
    if (bounded) out << fixed(to_double(success_upper_bound(fam.n(), fam.k(), q, fam.size(), eps)));
    out << ',' << seed << '\n';
    if (s.budget_violations) throw VerificationError("learner exceeded the query budget");
  }
  if (csv.empty() || csv == "-") {
    std::cout << out.str();
  } else {
    std::ofstream os(csv);
    if (!os) throw ParameterError("cannot write '" + csv + "'");
    os << out.str();
  }
  return 0;
}

// ---- bounds -----------------------------------------------------------------

int cmd_bounds(int d, const std::string& eps_text, const std::string& delta_text) {
  const Rational eps = parse_rational(eps_text), delta = parse_rational(delta_text);
  const auto b = query_lower_bound(d, eps, delta);
  const auto& p = b.params;
  std::cout << "d=" << p.d << " epsilon=" << p.epsilon.str() << " delta=" << delta.str() << '\n';
  std::cout << "n=" << p.n << " k=" << p.k << '\n';
  std::cout << "scale=" << fixed(p.scale, 6) << "  (sqrt(d / ln(1/(1-2 epsilon))))\n";
  std::cout << "chain 2 <= scale <= n < 4 scale <= d: holds\n";
  std::cout << "separation 2 epsilon < 1 - exp(-k/(16n)): " << (p.separation ? "holds" : "fails") << '\n';
  std::cout << "log2 inner family >= " << b.log2_inner_size.str(12) << (b.ball_exact ? " (exact ball)" : " (entropy bound)") << '\n';
  std::cout << "log2 family >= " << b.log2_family_size.str(12) << '\n';
  std::cout << "log2 q >= " << b.log2_q.str(12) << '\n';
  if (b.q)
    std::cout << "q=" << b.q->str() << '\n';
  else
    std::cout << "q=2^" << b.log2_q.str(12) << " (too large to print exactly)\n";
  return 0;
}

// ---- halfspace-gap / corollary -------------------------------------------------

std::string format_direction(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fixed(v[i], 6);
  return s;
}

int cmd_halfspace_gap(const std::string& path, const std::string& pair, std::size_t dirs, std::size_t samples, std::uint64_t seed) {
  const auto fam = load_manifest(path);
  const auto parts = split(pair, ',');
  if (parts.size() != 2) throw ParameterError("--pair expects i,j");
  long long i = 0, j = 0;
  try {
    i = std::stoll(parts[0]);
    j = std::stoll(parts[1]);
  } catch (const std::exception&) {
    throw ParameterError("--pair expects two integers");
  }
  const auto a = fam.body(check_index(fam, i)), b = fam.body(check_index(fam, j));
  const auto est = halfspace_discrepancy(a, b, dirs, samples, seed);
  std::cout << "i=" << i << " j=" << j << '\n';
  std::cout << "exact_dist=" << general_distance(a, b).str() << " (" << fixed(to_double(general_distance(a, b))) << ")\n";
  std::cout << "ks_estimate=" << fixed(est.estimate) << "  (lower-bound estimate over " << est.directions << " directions)\n";
  std::cout << "noise_floor=" << fixed(est.noise_floor) << "  (" << samples << " samples per body)\n";
  std::cout << "argmax_direction=" << format_direction(est.argmax.direction) << '\n';
  return 0;
}

int cmd_corollary(const std::string& path, std::size_t pairs, std::size_t dirs, std::size_t samples, std::uint64_t seed, const std::string& csv) {
  const auto fam = load_manifest(path);
  const auto rep = corollary_explore(fam, pairs, dirs, samples, seed);
  std::ostringstream out;
  write_corollary_csv(out, rep);
  if (csv.empty() || csv == "-") {
    std::cout << out.str();
  } else {
    std::ofstream os(csv);
    if (!os) throw ParameterError("cannot write '" + csv + "'");
    os << out.str();
  }
  const auto& lo = rep.rows[rep.argmin];
  const auto& hi = rep.rows[rep.argmax];
  std::cerr << "family min distance " << rep.family_min_distance.str() << (rep.far_floor_met ? " > 1/8" : " <= 1/8 (corollary regime not reached)") << '\n';
  std::cerr << "min estimate " << fixed(lo.ks_estimate) << " at (" << lo.i << "," << lo.j << "), max " << fixed(hi.ks_estimate) << " at (" << hi.i << ","
            << hi.j << ")" << (rep.flat ? ", flat within noise " : ", noise ") << fixed(rep.noise_floor) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-polytopes with peaks: families, oracles, games and bounds"};
  app.require_subcommand(1);

  int n = 3, k = 4, d = 1024;
  std::string out, manifest, format = "points", point, eps = "1/32", delta = "1/2", learner = "ml", csv, pair;
  long long body_index = 0;
  std::uint64_t count = 10, seed = 1, points = 2000;
  std::vector<std::size_t> qs{0};
  std::size_t trials = 1000, dirs = 32, samples = 10000, pairs = 20;

  auto* gen = app.add_subcommand("gen-family", "build a product family and write its manifest");
  gen->add_option("--n", n, "factor dimension")->required();
  gen->add_option("--k", k, "number of factors")->required();
  gen->add_option("--out", out, "manifest path")->required();

  auto* verify = app.add_subcommand("verify", "run every invariant check on a manifest");
  verify->add_option("--manifest", manifest)->required();
  verify->add_option("--seed", seed, "seed for sampled checks");
  verify->add_option("--points", points, "random points per sampled check");

  auto* sample = app.add_subcommand("sample", "draw from the random oracle of one body");
  sample->add_option("--manifest", manifest)->required();
  sample->add_option("--body-index", body_index)->required();
  sample->add_option("--count", count);
  sample->add_option("--seed", seed);
  sample->add_option("--format", format)->check(CLI::IsMember({"points", "labels"}));

  auto* member = app.add_subcommand("member", "exact membership of a point");
  member->add_option("--manifest", manifest)->required();
  member->add_option("--body-index", body_index)->required();
  member->add_option("--point", point, "comma-separated coordinates (decimals or p/q)")->required();

  auto* game = app.add_subcommand("game", "play the query game; CSV output");
  game->add_option("--manifest", manifest)->required();
  game->add_option("--q", qs, "query budget(s)")->delimiter(',');
  game->add_option("--epsilon", eps);
  game->add_option("--trials", trials);
  game->add_option("--seed", seed);
  game->add_option("--learner", learner)->check(CLI::IsMember({"ml", "random"}));
  game->add_option("--csv", csv, "output file (default stdout)");

  auto* bounds = app.add_subcommand("bounds", "parameter choice and query lower bound");
  bounds->add_option("--d", d)->required();
  bounds->add_option("--epsilon", eps)->required();
  bounds->add_option("--delta", delta);

  auto* gap = app.add_subcommand("halfspace-gap", "estimate the halfspace discrepancy of two bodies");
  gap->add_option("--manifest", manifest)->required();
  gap->add_option("--pair", pair, "i,j")->required();
  gap->add_option("--dirs", dirs, "random directions (axes and orthant normals are always added)");
  gap->add_option("--samples", samples);
  gap->add_option("--seed", seed);

  auto* cor = app.add_subcommand("corollary", "exact distance against estimated halfspace discrepancy over many pairs; CSV output");
  cor->add_option("--manifest", manifest)->required();
  cor->add_option("--pairs", pairs);
  cor->add_option("--dirs", dirs);
  cor->add_option("--samples", samples);
  cor->add_option("--seed", seed);
  cor->add_option("--csv", csv, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParameter;
  }

  try {
    if (*gen) return cmd_gen_family(n, k, out);
    if (*verify) return cmd_verify(manifest, seed, points);
    if (*sample) return cmd_sample(manifest, body_index, count, seed, format);
    if (*member) return cmd_member(manifest, body_index, point);
    if (*game) return cmd_game(manifest, qs, eps, trials, seed, learner, csv);
    if (*bounds) return cmd_bounds(d, eps, delta);
    if (*gap) return cmd_halfspace_gap(manifest, pair, dirs, samples, seed);
    if (*cor) return cmd_corollary(manifest, pairs, dirs, samples, seed, csv);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kExitVerification;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  }
  return 0;
}
