#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "gatsim/csbm.hpp"
#include "gatsim/error.hpp"
#include "gatsim/log.hpp"

using namespace gatsim;

namespace {

CsbmParams reference_params(std::size_t n = 3000, double mu = 1.0, double sigma = 1.0) {
  return CsbmParams::from_scaling(n, 3.0, 2.0, mu, sigma);
}

class Quiet : public ::testing::Test {
 protected:
  void SetUp() override { set_warnings_enabled(false); }
  void TearDown() override { set_warnings_enabled(true); }
};

}  // namespace

TEST(CsbmParams, ValidationRejectsBadFields) {
  EXPECT_THROW((CsbmParams{1, 0.1, 0.1, 1, 1}.validate()), ParameterError);
  EXPECT_THROW((CsbmParams{10, 1.5, 0.1, 1, 1}.validate()), ParameterError);
  EXPECT_THROW((CsbmParams{10, 0.5, -0.1, 1, 1}.validate()), ParameterError);
  EXPECT_THROW((CsbmParams{10, 0.5, 0.1, 0, 1}.validate()), ParameterError);
  EXPECT_THROW((CsbmParams{10, 0.5, 0.1, 1, 0}.validate()), ParameterError);
  EXPECT_NO_THROW((CsbmParams{10, 0.5, 0.1, 1, 1}.validate()));
}

TEST(CsbmParams, ScalingAndAssumptionFlag) {
  const auto p = reference_params();
  const double unit = std::pow(std::log(3000.0), 2) / 3000.0;
  EXPECT_DOUBLE_EQ(p.p, 3.0 * unit);
  EXPECT_DOUBLE_EQ(p.q, 2.0 * unit);
  EXPECT_TRUE(p.assumption1());
  EXPECT_FALSE(CsbmParams::from_scaling(3000, 2.0, 3.0, 1, 1).assumption1());
  EXPECT_FALSE(CsbmParams::from_scaling(3000, 3.0, 0.5, 1, 1).assumption1());
}

TEST(SampleCsbm, RejectsTooFewNodes) { EXPECT_THROW(sample_csbm(CsbmParams{1, 0, 0, 1, 1}, 1), ParameterError); }

TEST_F(Quiet, ZeroProbabilitiesGiveNoEdges) {
  const auto g = sample_csbm(CsbmParams{50, 0.0, 0.0, 1, 1}, 3);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST_F(Quiet, UnitProbabilitiesGiveCompleteGraph) {
  const auto g = sample_csbm(CsbmParams{4, 1.0, 1.0, 1, 1}, 3);
  EXPECT_EQ(g.edge_count(), 6u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.degree(i), 3u);
}

TEST_F(Quiet, PLessThanQWarnsAndKeepsValues) {
  const auto before = warning_count();
  const auto g = sample_csbm(CsbmParams{20, 0.1, 0.3, 1, 1}, 1);
  EXPECT_GT(warning_count(), before);
  EXPECT_DOUBLE_EQ(g.params().p, 0.1);
  EXPECT_DOUBLE_EQ(g.params().q, 0.3);
}

TEST(SampleCsbm, SameSeedBitIdentical) {
  const auto a = sample_csbm(reference_params(800), 99);
  const auto b = sample_csbm(reference_params(800), 99);
  EXPECT_EQ(a.labels(), b.labels());
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.edges(), b.edges());
  const auto c = sample_csbm(reference_params(800), 100);
  EXPECT_NE(a.edges(), c.edges());
}

TEST(SampleCsbm, AdjacencySymmetricWithoutSelfLoops) {
  const auto g = sample_csbm(reference_params(600), 5);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const auto nb = g.neighbors(i);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    for (auto j : nb) {
      EXPECT_NE(j, i);
      const auto back = g.neighbors(j);
      EXPECT_TRUE(std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(i)));
    }
  }
}

TEST(SampleCsbm, MeanDegreeMatchesAnalyticOverSeeds) {
  const auto params = reference_params();
  const double want = params.n * (params.p + params.q) / 2.0;
  double total = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto g = sample_csbm(params, static_cast<std::uint64_t>(s));
    total += 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.n());
  }
  EXPECT_NEAR(total / seeds, want, 0.05 * want);
}

TEST(SampleCsbm, EdgeDensitiesWithinBinomialErrors) {
  // Pooled over 1000 seeds at small n.
  const CsbmParams params{40, 0.3, 0.1, 1, 1};
  double same_pairs = 0, same_edges = 0, cross_pairs = 0, cross_edges = 0;
  for (int s = 0; s < 1000; ++s) {
    const auto g = sample_csbm(params, static_cast<std::uint64_t>(s));
    std::size_t c1 = 0;
    for (auto l : g.labels()) c1 += l;
    const double c0 = static_cast<double>(g.n() - c1);
    same_pairs += c0 * (c0 - 1) / 2 + static_cast<double>(c1) * (static_cast<double>(c1) - 1) / 2;
    cross_pairs += c0 * static_cast<double>(c1);
    for (auto [i, j] : g.edges()) (g.labels()[i] == g.labels()[j] ? same_edges : cross_edges) += 1;
  }
  EXPECT_NEAR(same_edges / same_pairs, params.p, 3.0 * std::sqrt(params.p * (1 - params.p) / same_pairs));
  EXPECT_NEAR(cross_edges / cross_pairs, params.q, 3.0 * std::sqrt(params.q * (1 - params.q) / cross_pairs));
}

TEST(SampleCsbm, ClassFeatureMeansNearPlusMinusMu) {
  const auto params = reference_params(3000, 3.0, 10.0);
  const auto g = sample_csbm(params, 11);
  double sum[2] = {0, 0};
  double cnt[2] = {0, 0};
  for (std::size_t i = 0; i < g.n(); ++i) {
    sum[g.labels()[i]] += g.features()[i];
    cnt[g.labels()[i]] += 1;
  }
  const double tol = 4.0 * params.sigma / std::sqrt(params.n / 2.0);
  EXPECT_NEAR(sum[0] / cnt[0], -params.mu, tol);
  EXPECT_NEAR(sum[1] / cnt[1], params.mu, tol);
}

TEST(NeighborhoodStats, IsolatedNode) {
  const FeaturedGraph g(CsbmParams{3, 0, 0, 1, 1}, 0, {0, 1, 1}, {0.1, 0.2, 0.3}, {{1, 2}});
  const auto s = neighborhood_stats(g, 0);
  EXPECT_EQ(s.degree, 0u);
  EXPECT_EQ(s.same_class, 0u);
  EXPECT_EQ(s.cross_class, 0u);
}

TEST(NeighborhoodStats, CompleteGraphOfFour) {
  const FeaturedGraph g(CsbmParams{4, 1, 1, 1, 1}, 0, {0, 0, 1, 1}, {1, 1, 1, 1},
                        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const auto s = neighborhood_stats(g, 0);
  EXPECT_EQ(s.degree, 3u);
  EXPECT_EQ(s.same_class, 1u);
  EXPECT_EQ(s.cross_class, 2u);
  EXPECT_THROW(neighborhood_stats(g, 4), ParameterError);
}

TEST(NeighborhoodStats, SplitAddsUpOnSampledGraph) {
  const auto g = sample_csbm(reference_params(), 2);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const auto s = neighborhood_stats(g, i);
    // Recount straight from the edge list.
    EXPECT_EQ(s.degree, s.same_class + s.cross_class);
    EXPECT_EQ(s.degree, g.degree(i));
  }
}

TEST(FeaturedGraph, RejectsMalformedEdges) {
  const CsbmParams p{3, 0, 0, 1, 1};
  EXPECT_THROW(FeaturedGraph(p, 0, {0, 1, 0}, {0, 0, 0}, {{0, 0}}), ParameterError);
  EXPECT_THROW(FeaturedGraph(p, 0, {0, 1, 0}, {0, 0, 0}, {{0, 1}, {1, 0}}), ParameterError);
  EXPECT_THROW(FeaturedGraph(p, 0, {0, 1, 0}, {0, 0, 0}, {{0, 3}}), ParameterError);
  EXPECT_THROW(FeaturedGraph(p, 0, {0, 1}, {0, 0, 0}, {}), ParameterError);
}

TEST(ConcentrationEvents, EmptyGraphFailsDegreeEvent) {
  const auto params = reference_params();
  std::vector<std::uint8_t> labels(params.n);
  std::vector<double> feats(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    labels[i] = i % 2;
    feats[i] = labels[i] ? 1.0 : -1.0;
  }
  const FeaturedGraph g(params, 0, labels, feats, {});
  const auto r = check_concentration_events(g, params);
  EXPECT_TRUE(r.delta1);
  EXPECT_FALSE(r.delta2);
  EXPECT_DOUBLE_EQ(r.class_imbalance, 0.0);
}

TEST(ConcentrationEvents, SlackIsClassImbalance) {
  const auto params = reference_params();
  const auto g = sample_csbm(params, 4);
  std::size_t c0 = 0;
  for (auto l : g.labels()) c0 += l == 0;
  const auto r = check_concentration_events(g, params);
  EXPECT_DOUBLE_EQ(r.class_imbalance, std::abs(static_cast<double>(c0) - 1500.0));
  EXPECT_DOUBLE_EQ(r.class_bound, 10.0 * std::sqrt(3000.0 * std::log(3000.0)));
}

TEST(ConcentrationEvents, HoldInMostSeedsAtReferenceParams) {
  const auto params = reference_params();
  int all = 0;
  for (int s = 0; s < 100; ++s) all += check_concentration_events(sample_csbm(params, static_cast<std::uint64_t>(s)), params).all();
  EXPECT_GE(all, 95);
}

TEST(GraphText, RoundTrip) {
  const auto g = sample_csbm(reference_params(300), 8);
  std::stringstream buf;
  write_graph(buf, g);
  const auto h = read_graph(buf);
  EXPECT_EQ(h.n(), g.n());
  EXPECT_EQ(h.seed(), g.seed());
  EXPECT_EQ(h.labels(), g.labels());
  EXPECT_EQ(h.features(), g.features());
  EXPECT_EQ(h.edges(), g.edges());
  EXPECT_DOUBLE_EQ(h.params().p, g.params().p);
}

TEST(GraphText, ParseErrorsCarryLineNumbers) {
  std::stringstream bad_header("3 0.1 0.1 1\n");
  EXPECT_THROW(read_graph(bad_header), ParseError);
  std::stringstream bad_edge("3 0.1 0.1 1 1 7\n0 1.0\n1 2.0\n0 0.5\n2 1\n");
  try {
    read_graph(bad_edge);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
  std::stringstream truncated("3 0.1 0.1 1 1 7\n0 1.0\n");
  EXPECT_THROW(read_graph(truncated), ParseError);
}
