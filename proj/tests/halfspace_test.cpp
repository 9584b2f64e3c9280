#include "oracles.hpp"
#include "xpeak/halfspace.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace xpeak;

namespace {

const ProductFamily& family_3_2() {
  static const ProductFamily fam = build_product_family(3, 2);
  return fam;
}

}  // namespace

TEST(KsStatistic, MatchesReference) {
  auto rng = derive_stream(1, 0);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> a, b;
    const int na = 20 + 7 * t, nb = 35 + 3 * t;
    for (int i = 0; i < na; ++i) a.push_back(t % 2 ? coarse(rng) : g(rng));
    for (int i = 0; i < nb; ++i) b.push_back(t % 2 ? coarse(rng) : g(rng) + 0.3);
    EXPECT_NEAR(ks_statistic(a, b), oracle::ks_reference(a, b), 1e-12) << t;
  }
  EXPECT_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0);
  EXPECT_EQ(ks_statistic({1, 2}, {3, 4}), 1);
  EXPECT_THROW(ks_statistic({}, {1}), ParameterError);
}

TEST(KsStatistic, PValues) {
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_EQ(kolmogorov_survival(0), 1);
  EXPECT_LT(ks_p_value(0.1, 10000, 10000), 1e-20);
  EXPECT_GT(ks_p_value(0.005, 10000, 10000), 0.5);
  // the critical value inverts the leading term of the survival function
  const double c = ks_critical_value(0.01, 5000, 5000);
  EXPECT_NEAR(2 * std::exp(-2 * c * c * 2500), 0.01, 1e-12);
}

TEST(ChiSquare, KnownStatistic) {
  const std::vector<std::uint64_t> obs{30, 70};
  const std::vector<Rational> probs{Rational(1, 2), Rational(1, 2)};
  const auto r = chi_square_test(obs, probs);
  EXPECT_DOUBLE_EQ(r.statistic, 16.0);
  EXPECT_EQ(r.dof, 1U);
  EXPECT_NEAR(r.p_value, 6.334e-5, 1e-7);
  const std::vector<std::uint64_t> exact{50, 50};
  EXPECT_NEAR(chi_square_test(exact, probs).p_value, 1.0, 1e-12);
  EXPECT_THROW(chi_square_test(std::vector<std::uint64_t>{1}, std::vector<Rational>{1}), ParameterError);
}

TEST(ProjectionFraction, AxisHalfOfTheCrossPolytope) {
  ProductBody body;
  body.factors.push_back(InnerBody::bare(3));
  auto rng = derive_stream(2, 0);
  const std::size_t samples = 100000;
  const double frac = projection_fraction(body, {1, 0, 0}, 0.0, samples, rng);
  EXPECT_NEAR(frac, 0.5, 3 * std::sqrt(0.25 / samples));
  // x_1 <= 1 everywhere
  EXPECT_EQ(projection_fraction(body, {1, 0, 0}, 1.0, 1000, rng), 1.0);
}

TEST(ProbeDirections, Shape) {
  auto rng = derive_stream(3, 0);
  const auto dirs = probe_directions(3, 2, 10, rng);
  EXPECT_EQ(dirs.size(), 10U + 6U + 2U * 8U);
  for (const auto& d : dirs) {
    double norm = 0;
    for (double c : d) norm += c * c;
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
}

TEST(HalfspaceDiscrepancy, SameBodyIsNoise) {
  const auto a = family_3_2().body(0);
  const auto est = halfspace_discrepancy(a, a, 16, 5000, 4);
  EXPECT_LT(est.estimate, est.noise_floor);
  EXPECT_EQ(est.samples, 5000U);
  EXPECT_EQ(est.directions, 16U + 6U + 16U);
}

TEST(HalfspaceDiscrepancy, SymmetricDeterministicAndBounded) {
  const auto a = family_3_2().body(0), b = family_3_2().body(255);
  const auto ab = halfspace_discrepancy(a, b, 8, 2000, 5);
  const auto ba = halfspace_discrepancy(b, a, 8, 2000, 5);
  EXPECT_EQ(ab.estimate, ba.estimate);
  EXPECT_EQ(ab.estimate, halfspace_discrepancy(a, b, 8, 2000, 5).estimate);
  EXPECT_LE(ab.estimate, 1.0);
  EXPECT_GE(ab.estimate, 0.0);
  EXPECT_THROW(halfspace_discrepancy(a, b, 8, 999, 5), ParameterError);
}

TEST(HalfspaceDiscrepancy, DetectsFarBodies) {
  // bare cores against all-peak factors differ by a third of the mass per factor
  ProductBody bare, full;
  bare.factors = {InnerBody::bare(3)};
  full.factors = {InnerBody::all_peaks(3)};
  const auto est = halfspace_discrepancy(bare, full, 8, 5000, 6);
  EXPECT_GT(est.estimate, est.noise_floor);
  EXPECT_LE(est.estimate, to_double(general_distance(bare, full)) + est.noise_floor);
}

TEST(Corollary, CsvAndReport) {
  const auto rep = corollary_explore(family_3_2(), 6, 4, 1000, 7);
  ASSERT_EQ(rep.rows.size(), 6U);
  EXPECT_EQ(rep.family_min_distance, Rational(1, 20));
  EXPECT_FALSE(rep.far_floor_met);
  for (const auto& r : rep.rows) {
    EXPECT_LT(r.i, r.j);
    EXPECT_GT(to_bigfloat(r.exact_distance), distance_lemma_bound(3, 2));
    EXPECT_LE(r.ks_estimate, 1.0);
  }
  std::ostringstream os;
  write_corollary_csv(os, rep);
  const auto text = os.str();
  EXPECT_EQ(text.rfind("i,j,exact_dist,ks_estimate,dirs,samples\n0,1,", 0), 0U);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_THROW(corollary_explore(ProductFamily(build_inner_family(3), Code(16, 2, {{0, 0}})), 1, 1, 1000, 1), ParameterError);
}
