#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "focaler/analysis.hpp"
#include "json.hpp"
#include "test_support.hpp"

using focaler::Box;
using focaler::BoxPair;
using focaler::FocusMode;

namespace {

std::vector<BoxPair> identical_pairs(int n) {
  std::vector<BoxPair> out;
  for (int i = 0; i < n; ++i) {
    const Box b(i, 2.0 * i, 1.0 + i, 2.0);
    out.push_back({b, b});
  }
  return out;
}

std::vector<BoxPair> disjoint_pairs(int n) {
  std::vector<BoxPair> out;
  for (int i = 0; i < n; ++i) out.push_back({Box(i, 0, 1, 1), Box(i + 5.0, 3, 1, 1)});
  return out;
}

}  // namespace

TEST(IouHistogram, IdenticalPairsFillTopBin) {
  const auto pairs = identical_pairs(17);
  const auto h = focaler::iou_histogram(pairs, 10);
  EXPECT_EQ(h.n, 17u);
  EXPECT_EQ(h.counts.back(), 17u);
  EXPECT_EQ(h.mean, 1.0);
  for (double q : h.quantiles) EXPECT_EQ(q, 1.0);
}

TEST(IouHistogram, DisjointPairsFillBottomBin) {
  const auto pairs = disjoint_pairs(9);
  const auto h = focaler::iou_histogram(pairs, 4);
  EXPECT_EQ(h.counts.front(), 9u);
  EXPECT_EQ(h.mean, 0.0);
  EXPECT_EQ(h.edges, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(IouHistogram, CountsMatchGeneratorPopulations) {
  focaler::ScenarioSpec spec;
  spec.n_easy = 70;
  spec.n_hard = 30;
  spec.easy_iou_range = {0.5, 0.9};
  spec.hard_iou_range = {0.1, 0.5};
  spec.seed = 8;
  const auto pairs = focaler::generate_scenarios(spec);
  const auto h = focaler::iou_histogram(pairs, 10);
  // Bins 1..4 hold (0.1, 0.5), bins 5..8 hold (0.5, 0.9).
  std::size_t low = 0, high = 0;
  for (int b = 1; b <= 4; ++b) low += h.counts[b];
  for (int b = 5; b <= 8; ++b) high += h.counts[b];
  EXPECT_EQ(low, 30u);
  EXPECT_EQ(high, 70u);
  EXPECT_EQ(h.counts[0] + h.counts[9], 0u);
}

TEST(IouHistogram, RejectsBadInput) {
  EXPECT_THROW(focaler::iou_histogram(std::span<const BoxPair>{}, 10), focaler::InvalidInput);
  EXPECT_THROW(focaler::iou_histogram(identical_pairs(3), 1), focaler::InvalidInput);
}

TEST(SortedQuantile, LinearInterpolation) {
  const std::vector<double> v = {0.0, 1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(focaler::sorted_quantile(v, 0.5), 2.0);
  EXPECT_EQ(focaler::sorted_quantile(v, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(focaler::sorted_quantile(v, 0.1), 0.4);
  EXPECT_EQ(focaler::sorted_quantile(v, 1.0), 4.0);
}

TEST(RecommendInterval, UniformFocusHardNearThreeQuarters) {
  std::mt19937_64 e(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> vals(20000);
  for (double& v : vals) v = u(e);
  const auto h = focaler::iou_histogram_from_values(vals, 20);
  const auto rec = focaler::recommend_interval(h, FocusMode::FocusHard);
  EXPECT_EQ(rec.interval.d(), 0.0);
  EXPECT_NEAR(rec.interval.u(), 0.75, 1.0 / 20);
  EXPECT_FALSE(rec.fallback);
  EXPECT_EQ(rec.quantile_used, "q75");
  const auto easy = focaler::recommend_interval(h, FocusMode::FocusEasy);
  EXPECT_NEAR(easy.interval.d(), 0.25, 1.0 / 20);
  EXPECT_EQ(easy.interval.u(), 1.0);
}

TEST(RecommendInterval, Fallbacks) {
  const auto same = focaler::iou_histogram(identical_pairs(5), 10);
  const auto easy = focaler::recommend_interval(same, FocusMode::FocusEasy);
  EXPECT_TRUE(easy.fallback);
  EXPECT_EQ(easy.interval.d(), 0.5);
  EXPECT_EQ(easy.interval.u(), 1.0);

  const auto apart = focaler::iou_histogram(disjoint_pairs(5), 10);
  const auto hard = focaler::recommend_interval(apart, FocusMode::FocusHard);
  EXPECT_TRUE(hard.fallback);
  EXPECT_EQ(hard.interval.d(), 0.0);
  EXPECT_EQ(hard.interval.u(), 0.5);
}

TEST(FocusModeTokens, ParseAndReject) {
  EXPECT_EQ(focaler::parse_focus_mode("focus_hard"), FocusMode::FocusHard);
  EXPECT_EQ(focaler::parse_focus_mode("focus_easy"), FocusMode::FocusEasy);
  EXPECT_THROW(focaler::parse_focus_mode("hard"), focaler::InvalidInput);
}

TEST(AnalysisProperties, MassConservationAndValidity) {
  testing_support::PairSampler s(61);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(s.uniform(0, 200));
    std::vector<BoxPair> pairs;
    for (int i = 0; i < n; ++i) {
      const auto [a, g] = s.pair();
      pairs.push_back({a, g});
    }
    const std::size_t bins = 2 + static_cast<std::size_t>(s.uniform(0, 30));
    const auto h = focaler::iou_histogram(pairs, bins);
    ASSERT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), h.n);
    ASSERT_EQ(h.edges.front(), 0.0);
    ASSERT_EQ(h.edges.back(), 1.0);
    for (std::size_t i = 1; i < h.edges.size(); ++i) ASSERT_LT(h.edges[i - 1], h.edges[i]);
    for (std::size_t i = 1; i < h.quantiles.size(); ++i) ASSERT_LE(h.quantiles[i - 1], h.quantiles[i]);
    for (FocusMode m : {FocusMode::FocusHard, FocusMode::FocusEasy}) {
      const auto rec = focaler::recommend_interval(h, m);
      ASSERT_GE(rec.interval.d(), 0.0);
      ASSERT_LT(rec.interval.d(), rec.interval.u());
      ASSERT_LE(rec.interval.u(), 1.0);
    }
  }
}

TEST(AnalysisProperties, ImprovingAnchorsNeverLowersQuantiles) {
  testing_support::PairSampler s(62);
  for (int t = 0; t < 100; ++t) {
    std::vector<BoxPair> before, after;
    for (int i = 0; i < 40; ++i) {
      const auto [a, g] = s.pair();
      before.push_back({a, g});
      // Half of the pairs get the GT itself as the improved anchor.
      after.push_back({s.uniform(0, 1) < 0.5 ? g : a, g});
    }
    const auto h0 = focaler::iou_histogram(before, 10);
    const auto h1 = focaler::iou_histogram(after, 10);
    for (std::size_t i = 0; i < h0.quantiles.size(); ++i) ASSERT_GE(h1.quantiles[i], h0.quantiles[i]);
    ASSERT_GE(h1.mean, h0.mean);
  }
}

TEST(AnalysisJson, Schema) {
  const auto h = focaler::iou_histogram(identical_pairs(4), 5);
  const auto j = nlohmann::json::parse(
      focaler::analysis_json(h, focaler::recommend_interval(h, FocusMode::FocusEasy)));
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["mean"], 1.0);
  EXPECT_EQ(j["quantiles"]["q75"], 1.0);
  EXPECT_EQ(j["histogram"]["counts"].size(), 5u);
  EXPECT_EQ(j["histogram"]["edges"].size(), 6u);
  EXPECT_EQ(j["recommendation"]["d"], 0.5);
  EXPECT_EQ(j["recommendation"]["u"], 1.0);
  EXPECT_EQ(j["recommendation"]["mode"], "focus_easy");
  EXPECT_EQ(j["recommendation"]["fallback"], true);
}
