#include "xpeak/family.hpp"
#include "xpeak/oracles.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace xpeak;

namespace {

ProductBody body_of(int n, std::vector<std::vector<std::uint32_t>> peak_lists) {
  ProductBody b;
  for (auto& l : peak_lists) b.factors.emplace_back(PeakSet::from_indices(n, l));
  return b;
}

const ProductFamily& family_3_4() {
  static const ProductFamily fam = build_product_family(3, 4);
  return fam;
}

}  // namespace

TEST(InnerFamily, DimensionThree) {
  const auto inner = build_inner_family(3);
  ASSERT_EQ(inner.size(), 16U);
  for (const auto& b : inner.bodies) {
    EXPECT_EQ(b.peak_count(), 4U);
    EXPECT_EQ(inner_volume(b), Rational(5, 3));
  }
  std::set<PeakSet> distinct;
  for (std::size_t a = 0; a < inner.size(); ++a) {
    distinct.insert(inner.bodies[a].peaks());
    for (std::size_t b = a + 1; b < inner.size(); ++b)
      EXPECT_GE(symmetric_difference_count(inner.bodies[a].peaks(), inner.bodies[b].peaks()), 2U);
  }
  EXPECT_EQ(distinct.size(), 16U);
}

TEST(InnerFamily, DimensionTwoAndFour) {
  const auto two = build_inner_family(2);
  EXPECT_EQ(two.size(), 4U);
  const auto four = build_inner_family(4);
  EXPECT_EQ(four.size(), 128U);  // binary greedy of length 8, distance 2
  EXPECT_GE(4 * four.code.min_distance(), 16U);
  for (const auto& b : four.bodies) EXPECT_EQ(b.peak_count(), 8U);
  EXPECT_THROW(build_inner_family(1), ParameterError);
  EXPECT_THROW(build_inner_family(5), ParameterError);
}

TEST(InnerFamily, RejectsCodesOfWrongShape) {
  EXPECT_THROW(make_inner_family(3, gv_greedy(2, 4, 1)), ParameterError);
  EXPECT_THROW(make_inner_family(2, Code(2, 4, {{1, 1, 1, 0}, {0, 0, 1, 1}})), VerificationError);
  // distance 2 at length 16 is below a quarter
  EXPECT_THROW(make_inner_family(4, Code(2, 16, {{1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
                                                 {1, 1, 1, 1, 1, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0}})),
               VerificationError);
}

TEST(ProductFamily, Sizes) {
  const auto f32 = build_product_family(3, 2);
  EXPECT_EQ(f32.size(), 256U);
  EXPECT_EQ(f32.d(), 6);
  EXPECT_EQ(family_3_4().size(), 4096U);
  EXPECT_GE(family_3_4().size(), 1075U);
  EXPECT_EQ(build_product_family(2, 8).size(), 256U);
  EXPECT_THROW(build_product_family(3, 0), ParameterError);
  EXPECT_THROW(build_product_family(3, 9), ParameterError);
  EXPECT_THROW(build_product_family(4, 4), ResourceError);  // 128^4 candidates
}

TEST(ProductFamily, BodiesFollowTheOuterCode) {
  const auto& fam = family_3_4();
  const auto b = fam.body(123);
  ASSERT_EQ(b.k(), 4);
  for (int f = 0; f < 4; ++f) EXPECT_EQ(b.factors[static_cast<std::size_t>(f)], fam.inner().bodies[fam.symbol(123, f)]);
  EXPECT_EQ(product_volume(b), pow_rational(Rational(5, 3), 4));
  EXPECT_TRUE(equal_volumes(fam));
}

TEST(Distance, WorkedExamples) {
  // one differing factor with 3 of 4 peaks shared: 1 - 19/20
  const auto a = body_of(3, {{0, 1, 2, 3}, {0, 1, 2, 3}});
  const auto b = body_of(3, {{0, 1, 2, 4}, {0, 1, 2, 3}});
  EXPECT_EQ(exact_distance(a, b), Rational(1, 20));
  const auto c = body_of(3, {{0, 1, 2, 4}, {0, 1, 2, 4}});
  EXPECT_EQ(exact_distance(a, c), Rational(39, 400));
  EXPECT_EQ(exact_distance(a, a), 0);
  EXPECT_EQ(exact_distance(a, b), exact_distance(b, a));
}

TEST(Distance, GeneralDistanceUsesTheLargerBody) {
  const auto big = body_of(3, {{0, 1, 2, 3, 4}});
  const auto small = body_of(3, {{0}});
  // vol(big) = 21, vol(big ∩ small) = 17 in peak units
  EXPECT_EQ(general_distance(big, small), Rational(4, 21));
  EXPECT_EQ(general_distance(small, big), Rational(4, 21));
  EXPECT_THROW(exact_distance(big, small), ParameterError);
  EXPECT_THROW(general_distance(big, body_of(3, {{0}, {0}})), ParameterError);
}

TEST(Distance, MonteCarloAgreesWithExactValue) {
  const auto a = body_of(3, {{0, 1, 2, 3}, {0, 1, 2, 3}});
  const auto b = body_of(3, {{0, 1, 2, 4}, {0, 1, 2, 3}});
  auto rng = derive_stream(5, 0);
  const int samples = 200000;
  int outside = 0;
  for (int i = 0; i < samples; ++i)
    if (!continuous_membership(b, continuous_random(a, rng))) ++outside;
  const double p = 1.0 / 20;
  const double sigma = std::sqrt(p * (1 - p) / samples);
  EXPECT_NEAR(static_cast<double>(outside) / samples, p, 3 * sigma);
}

TEST(Distance, MetricPropertiesOverAFamily) {
  const auto fam = build_product_family(3, 2);
  auto rng = derive_stream(11, 0);
  std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
  for (int t = 0; t < 200; ++t) {
    const auto i = pick(rng), j = pick(rng), l = pick(rng);
    const auto dij = family_distance(fam, i, j);
    EXPECT_EQ(dij, family_distance(fam, j, i));
    EXPECT_EQ(dij == 0, i == j);
    // 1 - ratio is a TV distance on equal volumes, so the triangle inequality holds
    EXPECT_LE(dij, family_distance(fam, i, l) + family_distance(fam, l, j));
  }
}

TEST(DistanceLemma, SmallFamilies) {
  struct Case {
    int n, k;
    Rational min_dist;
    std::size_t size;
  };
  for (const auto& c : {Case{3, 2, Rational(1, 20), 256}, Case{3, 4, Rational(39, 400), 4096}, Case{2, 8, Rational(671, 1296), 256}}) {
    const auto fam = c.n == 3 && c.k == 4 ? family_3_4() : build_product_family(c.n, c.k);
    ASSERT_EQ(fam.size(), c.size);
    const auto rep = verify_distance_lemma(fam);
    EXPECT_TRUE(rep.ok()) << c.n << "," << c.k << ": " << (rep.violations.empty() ? "" : rep.violations.front());
    EXPECT_TRUE(rep.all_pairs);
    EXPECT_EQ(rep.pairs_checked, c.size * (c.size - 1) / 2);
    EXPECT_EQ(rep.min_distance, c.min_dist);
    EXPECT_GT(to_bigfloat(rep.min_distance), distance_lemma_bound(c.n, c.k));
    EXPECT_LE(Rational(rep.max_common_peaks), rep.common_peak_limit);
    EXPECT_GE(rep.min_differing_factors, outer_code_distance(c.k));
    EXPECT_EQ(family_distance(fam, rep.min_i, rep.min_j), rep.min_distance);
    EXPECT_EQ(min_pairwise_distance(fam), c.min_dist);
  }
}

TEST(DistanceLemma, BoundValues) {
  EXPECT_NEAR(distance_lemma_bound(3, 2).convert_to<double>(), 1 - std::exp(-2.0 / 48), 1e-15);
  EXPECT_NEAR(distance_lemma_bound(3, 4).convert_to<double>(), 0.07995558537067671, 1e-15);
}

TEST(DistanceLemma, SampledScanIsReproducible) {
  PairScan scan;
  scan.max_all_pairs = 100;
  scan.sampled_pairs = 5000;
  scan.seed = 9;
  const auto r1 = verify_distance_lemma(family_3_4(), scan);
  const auto r2 = verify_distance_lemma(family_3_4(), scan);
  EXPECT_FALSE(r1.all_pairs);
  EXPECT_EQ(r1.pairs_checked, 5000U);
  EXPECT_EQ(r1.min_distance, r2.min_distance);
  EXPECT_GE(r1.min_distance, Rational(39, 400));
  EXPECT_TRUE(r1.ok());
}

TEST(ProductFamily, RejectsACloseOuterCode) {
  // distance 1 at k = 4 is below ceil(k/2)
  EXPECT_THROW(ProductFamily(build_inner_family(3), Code(16, 4, {{0, 0, 0, 0}, {0, 0, 0, 1}, {5, 6, 7, 8}})), VerificationError);
  EXPECT_THROW(ProductFamily(build_inner_family(3), Code(8, 4, {{0, 0, 0, 0}})), ParameterError);
}

TEST(FamilyChecks, CardinalityAndFactorRatio) {
  EXPECT_TRUE(cardinality_holds(build_product_family(3, 2)));
  EXPECT_TRUE(cardinality_holds(family_3_4()));
  EXPECT_TRUE(cardinality_holds(build_product_family(2, 8)));
  for (int n = 2; n <= 4; ++n) EXPECT_TRUE(factor_ratio_holds(build_inner_family(n))) << n;
  // a single-word outer code is too small
  EXPECT_FALSE(cardinality_holds(ProductFamily(build_inner_family(3), Code(16, 4, {{0, 0, 0, 0}}))));
}

TEST(FamilyChecks, MinDistanceFallbackIsALowerBound) {
  EXPECT_LE(min_pairwise_distance(family_3_4(), 10), Rational(39, 400));
  EXPECT_GT(to_bigfloat(min_pairwise_distance(family_3_4(), 10)), distance_lemma_bound(3, 4));
}

TEST(Manifest, RoundTrip) {
  const auto& fam = family_3_4();
  std::ostringstream os;
  write_manifest(os, fam);
  EXPECT_EQ(os.str().rfind("xpeak-manifest v1\nn=3 k=4 inner_size=16 outer_size=4096\n", 0), 0U);
  std::istringstream is(os.str());
  const auto back = read_manifest(is);
  EXPECT_EQ(back.size(), fam.size());
  EXPECT_EQ(back.outer(), fam.outer());
  EXPECT_EQ(back.inner().code, fam.inner().code);
  EXPECT_EQ(back.body(77).factors, fam.body(77).factors);
}

TEST(Manifest, RejectsMalformedInput) {
  std::ostringstream os;
  write_manifest(os, build_product_family(2, 2));
  const std::string good = os.str();
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_manifest(is);
  };
  EXPECT_NO_THROW(parse(good));
  EXPECT_THROW(parse(""), ParameterError);
  EXPECT_THROW(parse("xpeak-manifest v2\n" + good.substr(good.find('\n') + 1)), ParameterError);
  std::string bad_header = good;
  bad_header.replace(bad_header.find("k=2"), 3, "k=x");
  EXPECT_THROW(parse(bad_header), ParameterError);
  EXPECT_THROW(parse(good.substr(0, good.size() / 2)), ParameterError);
}
