#include "xpeak/oracles.hpp"
#include "xpeak/stats.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace xpeak;

namespace {

ProductBody body_of(int n, std::vector<std::vector<std::uint32_t>> peak_lists) {
  ProductBody b;
  for (auto& l : peak_lists) b.factors.emplace_back(PeakSet::from_indices(n, l));
  return b;
}

ProductBody uniform_body(InnerBody f, int k) {
  ProductBody b;
  b.factors.assign(static_cast<std::size_t>(k), f);
  return b;
}

}  // namespace

TEST(ContinuousRandom, BareFactorsStayInTheCore) {
  const auto body = uniform_body(InnerBody::bare(3), 2);
  auto rng = derive_stream(1, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto x = continuous_random(body, rng);
    ASSERT_EQ(x.size(), 6U);
    for (int f = 0; f < 2; ++f) EXPECT_TRUE(classify_point(3, factor_block(x, 3, f)).is_core());
    EXPECT_TRUE(continuous_membership(body, x));
  }
}

TEST(ContinuousRandom, PeakMassAndSymmetryWithAllPeaks) {
  const auto body = uniform_body(InnerBody::all_peaks(3), 1);
  auto rng = derive_stream(2, 0);
  const int samples = 100000;
  int in_peak = 0;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < samples; ++i) {
    const auto x = continuous_random(body, rng);
    if (classify_point(3, x).is_peak()) ++in_peak;
    for (int c = 0; c < 3; ++c) mean[static_cast<std::size_t>(c)] += x[static_cast<std::size_t>(c)];
  }
  // 8 peaks of weight 1 against a core of weight 16
  const double p = 1.0 / 3;
  EXPECT_NEAR(static_cast<double>(in_peak) / samples, p, 5 * std::sqrt(p * (1 - p) / samples));
  // |x_i| <= 1, so the standard deviation of a coordinate is below 1
  for (double m : mean) EXPECT_NEAR(m / samples, 0.0, 5.0 / std::sqrt(static_cast<double>(samples)));
}

TEST(ContinuousMembership, Examples) {
  const auto body = body_of(3, {{7}, {}});
  const std::vector<double> origin(6, 0.0);
  EXPECT_TRUE(continuous_membership(body, origin));
  const std::vector<double> positive_peak{0.45, 0.45, 0.45, 0, 0, 0};
  EXPECT_TRUE(continuous_membership(body, positive_peak));
  const std::vector<double> negative_peak{-0.45, -0.45, -0.45, 0, 0, 0};
  EXPECT_FALSE(continuous_membership(body, negative_peak));
  const std::vector<double> second_peak{0, 0, 0, 0.45, 0.45, 0.45};
  EXPECT_FALSE(continuous_membership(body, second_peak));
  EXPECT_THROW(continuous_membership(body, std::vector<double>(5, 0.0)), ParameterError);
}

TEST(DiscreteRandom, LabelFrequencies) {
  const int samples = 200000;
  {
    const auto body = uniform_body(InnerBody::all_peaks(3), 1);
    auto rng = derive_stream(3, 0);
    int core = 0;
    for (int i = 0; i < samples; ++i) core += discrete_random(body, rng).labels[0].is_core();
    const double p = 2.0 / 3;
    EXPECT_NEAR(static_cast<double>(core) / samples, p, 5 * std::sqrt(p * (1 - p) / samples));
  }
  {
    const auto body = body_of(3, {{0, 1, 2, 3}});
    auto rng = derive_stream(4, 0);
    std::map<std::uint32_t, int> peaks;
    for (int i = 0; i < samples; ++i) {
      const auto l = discrete_random(body, rng).labels[0];
      ASSERT_TRUE(l.is_inside());
      if (l.is_peak()) ++peaks[l.orthant];
    }
    EXPECT_EQ(peaks.size(), 4U);
    const double p = 1.0 / 20;
    for (const auto& [orthant, count] : peaks) {
      EXPECT_LT(orthant, 4U);  // absent peaks never come back
      EXPECT_NEAR(static_cast<double>(count) / samples, p, 5 * std::sqrt(p * (1 - p) / samples));
    }
  }
}

TEST(DiscreteRandom, BranchingFactor) {
  for (int n = 2; n <= 3; ++n)
    for (int k = 1; k <= 2; ++k) {
      const auto body = uniform_body(InnerBody::all_peaks(n), k);
      auto rng = derive_stream(6, static_cast<std::uint64_t>(10 * n + k));
      std::set<std::string> seen;
      for (int i = 0; i < 100000; ++i) {
        Transcript t;
        t.append_random(discrete_random(body, rng));
        seen.insert(t.to_log());
      }
      std::uint64_t expected = 1;
      for (int f = 0; f < k; ++f) expected *= inside_label_count(n);
      EXPECT_EQ(seen.size(), expected) << n << "," << k;
    }
  EXPECT_EQ(inside_label_count(3), 9U);
}

TEST(DiscreteRandom, SharesTheStreamWithContinuousRandom) {
  // the label of a fresh stream is the region of the point the same stream gives
  const auto body = body_of(3, {{0, 5, 6}});
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto a = derive_stream(seed, 0), b = derive_stream(seed, 0);
    const auto label = discrete_random(body, a).labels[0];
    EXPECT_EQ(classify_point(3, continuous_random(body, b)), label);
  }
}

TEST(Simulation, PointsLandInTheirLabelledRegion) {
  auto rng = derive_stream(8, 0);
  const auto body = body_of(3, {{0, 1, 2, 3, 4, 5, 6, 7}, {2, 5}});
  for (int i = 0; i < 5000; ++i) {
    const auto a = discrete_random(body, rng);
    const auto x = simulate_continuous_from_discrete(3, a, rng);
    ASSERT_EQ(x.size(), 6U);
    for (int f = 0; f < 2; ++f) EXPECT_EQ(classify_point(3, factor_block(x, 3, f)), a.labels[static_cast<std::size_t>(f)]);
    EXPECT_TRUE(continuous_membership(body, x));
  }
  DiscreteRandomAnswer bad;
  bad.labels = {RegionLabel::outside()};
  EXPECT_THROW(simulate_continuous_from_discrete(3, bad, rng), ParameterError);
}

TEST(Simulation, MatchesTheContinuousOracleInDistribution) {
  const auto body = body_of(3, {{0, 3, 5, 6}, {1, 2, 4, 7}});
  auto direct_rng = derive_stream(9, 0), sim_rng = derive_stream(9, 1);
  const std::size_t samples = 50000;
  std::vector<std::vector<double>> direct(6), simulated(6);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = continuous_random(body, direct_rng);
    const auto y = simulate_continuous_from_discrete(3, discrete_random(body, sim_rng), sim_rng);
    for (std::size_t c = 0; c < 6; ++c) {
      direct[c].push_back(x[c]);
      simulated[c].push_back(y[c]);
    }
  }
  for (std::size_t c = 0; c < 6; ++c) {
    const double ks = ks_statistic(direct[c], simulated[c]);
    EXPECT_GT(ks_p_value(ks, samples, samples), 1e-3) << "coordinate " << c;
  }
}

TEST(DiscreteMembership, Examples) {
  const auto body = body_of(3, {{0, 1, 2, 3}, {0, 1, 2, 3}});
  const auto a = discrete_membership(body, {{0, 7}});
  EXPECT_EQ(a.present, (std::vector<bool>{true, false}));
  EXPECT_THROW(discrete_membership(body, {{0, 8}}), ParameterError);
  EXPECT_THROW(discrete_membership(body, {{0}}), ParameterError);
}

TEST(MembershipViaDiscrete, AgreesWithDirectMembership) {
  const auto body = body_of(3, {{0, 3, 5, 6}, {1, 2, 4, 7}});
  auto rng = derive_stream(10, 0);
  std::uniform_real_distribution<double> box(-0.8, 0.8);
  int queried = 0;
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> x(6);
    for (auto& c : x) c = box(rng);
    const auto sim = membership_via_discrete(body, x);
    EXPECT_EQ(sim.member, continuous_membership(body, x));
    if (sim.query) ++queried;
  }
  EXPECT_GT(queried, 0);
  const std::vector<double> origin(6, 0.0);
  EXPECT_FALSE(membership_via_discrete(body, origin).query.has_value());
  EXPECT_TRUE(membership_via_discrete(body, origin).member);
}

TEST(Transcript, LogFormat) {
  Transcript t;
  t.append_random({{RegionLabel::core(), RegionLabel::peak(7)}});
  t.append_membership({{0, 7}}, {{true, false}});
  t.append_random({{RegionLabel::peak(12), RegionLabel::core()}});
  EXPECT_EQ(t.to_log(), "R C,P7\nM 0,7 -> true,false\nR Pc,C\n");
  EXPECT_EQ(t.query_count(), 3U);
  const auto back = Transcript::parse_log(t.to_log());
  EXPECT_EQ(back.entries(), t.entries());
}

TEST(Transcript, RejectsMalformedLines) {
  for (const char* bad : {"X C", "R C,Q1", "R ", "M 0,1", "M 0,x -> true,true", "M 0,1 -> true", "M 0 -> maybe", "R PZ"})
    EXPECT_THROW(parse_entry(bad), ParameterError) << bad;
  EXPECT_THROW(format_label(RegionLabel::outside()), ParameterError);
}

TEST(OracleSession, RecordsAndEnforcesTheBudget) {
  const auto body = body_of(3, {{0, 1, 2, 3}, {4, 5, 6, 7}});
  auto rng = derive_stream(12, 0);
  OracleSession s(body, rng, 3);
  s.random();
  EXPECT_EQ(s.membership({{0, 0}}).present, (std::vector<bool>{true, false}));
  s.random();
  EXPECT_EQ(s.remaining(), 0U);
  EXPECT_THROW(s.random(), BudgetExceeded);
  EXPECT_EQ(s.transcript().query_count(), 3U);
}

TEST(OracleSession, SameSeedSameTranscript) {
  const auto body = body_of(3, {{0, 1, 2, 3}, {4, 5, 6, 7}});
  auto run = [&](std::uint64_t seed) {
    auto rng = derive_stream(seed, 4);
    OracleSession s(body, rng, 40);
    for (int i = 0; i < 40; ++i) s.random();
    return s.transcript().to_log();
  };
  EXPECT_EQ(run(13), run(13));
  EXPECT_NE(run(13), run(14));
}
