#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "focaler/io.hpp"
#include "focaler/simulator.hpp"

using focaler::Box;
using focaler::BoxPair;
using focaler::FocalerInterval;
using focaler::LossKind;

namespace {

focaler::ScenarioSpec mixed_spec() {
  focaler::ScenarioSpec spec;
  spec.n_easy = 100;
  spec.n_hard = 50;
  spec.easy_iou_range = {0.5, 0.9};
  spec.hard_iou_range = {0.1, 0.4};
  spec.gt_size_range = {1.0, 4.0};
  spec.seed = 5;
  return spec;
}

focaler::ScenarioSet basic_set(std::vector<BoxPair> pairs, LossKind kind, double lr, std::size_t steps) {
  focaler::ScenarioSet s;
  s.pairs = std::move(pairs);
  s.kind = kind;
  s.lr = lr;
  s.steps = steps;
  return s;
}

}  // namespace

TEST(GenerateScenarios, EmptySpecGivesNoPairs) {
  focaler::ScenarioSpec spec;
  EXPECT_TRUE(focaler::generate_scenarios(spec).empty());
}

TEST(GenerateScenarios, InitialIousFallInRanges) {
  const auto spec = mixed_spec();
  const auto pairs = focaler::generate_scenarios(spec);
  ASSERT_EQ(pairs.size(), 150u);
  const double hard_size_cap = 1.0 + 0.1 * 3.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double v = focaler::iou(pairs[i].anchor, pairs[i].gt);
    if (i < 100) {
      EXPECT_FALSE(pairs[i].hard);
      EXPECT_GT(v, 0.5);
      EXPECT_LT(v, 0.9);
    } else {
      EXPECT_TRUE(pairs[i].hard);
      EXPECT_GT(v, 0.1);
      EXPECT_LT(v, 0.4);
      EXPECT_LE(pairs[i].gt.w(), hard_size_cap);
      EXPECT_LE(pairs[i].gt.h(), hard_size_cap);
    }
  }
}

TEST(GenerateScenarios, DeterministicInSeed) {
  const auto a = focaler::generate_scenarios(mixed_spec());
  const auto b = focaler::generate_scenarios(mixed_spec());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].anchor, b[i].anchor);
    EXPECT_EQ(a[i].gt, b[i].gt);
  }
  auto other = mixed_spec();
  other.seed = 6;
  EXPECT_FALSE(focaler::generate_scenarios(other)[0].anchor == a[0].anchor);
}

TEST(GenerateScenarios, InfeasibleRangeNamesTheRange) {
  focaler::ScenarioSpec spec;
  spec.n_easy = 1;
  spec.easy_iou_range = {0.9999999, 0.99999995};
  try {
    focaler::generate_scenarios(spec);
    FAIL() << "expected an error";
  } catch (const focaler::InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("0.9999999"), std::string::npos);
  }
}

TEST(GenerateScenarios, RejectsInvalidSpec) {
  focaler::ScenarioSpec spec;
  spec.n_easy = 1;
  spec.easy_iou_range = {0.8, 0.5};
  EXPECT_THROW(focaler::generate_scenarios(spec), focaler::InvalidInput);
  spec.easy_iou_range = {0.5, 0.8};
  spec.gt_size_range = {0.0, 1.0};
  EXPECT_THROW(focaler::generate_scenarios(spec), focaler::InvalidInput);
}

TEST(Run, StartingAtOptimumStaysThere) {
  std::vector<BoxPair> pairs = {{Box(1, 2, 3, 4), Box(1, 2, 3, 4)}, {Box(-5, 0, 0.5, 2), Box(-5, 0, 0.5, 2)}};
  for (LossKind k : focaler::kAllLossKinds) {
    const auto r = focaler::run(basic_set(pairs, k, 0.05, 50));
    for (const auto& p : r.per_pair) {
      EXPECT_EQ(p.final_iou, 1.0) << focaler::to_string(k);
      EXPECT_LT(p.final_l1, 1e-9) << focaler::to_string(k);
      for (const auto& s : p.trace) EXPECT_EQ(s.iou, 1.0);
    }
  }
}

TEST(Run, ZeroLearningRateIsNoOp) {
  const auto pairs = focaler::generate_scenarios(mixed_spec());
  const auto r = focaler::run(basic_set(pairs, LossKind::CIoU, 0.0, 20));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(r.per_pair[i].final_anchor, pairs[i].anchor);
    EXPECT_EQ(r.per_pair[i].final_iou, focaler::iou(pairs[i].anchor, pairs[i].gt));
  }
}

TEST(Run, GiouConvergesFromReasonableStarts) {
  focaler::ScenarioSpec spec = mixed_spec();
  spec.n_easy = 50;
  spec.n_hard = 50;
  spec.hard_iou_range = {0.1, 0.5};
  const auto r = focaler::run(basic_set(focaler::generate_scenarios(spec), LossKind::GIoU, 0.02, 600));
  EXPECT_GE(r.mean_final_iou, 0.9);
  EXPECT_EQ(r.diverged, 0u);
}

TEST(Run, TracesAndMeansAreConsistent) {
  const auto pairs = focaler::generate_scenarios(mixed_spec());
  auto set = basic_set(pairs, LossKind::SIoU, 0.02, 40);
  const auto r = focaler::run(set);
  double sum = 0.0, sum_l1 = 0.0;
  for (const auto& p : r.per_pair) {
    ASSERT_EQ(p.trace.size(), 40u);
    for (const auto& s : p.trace) {
      ASSERT_GE(s.iou, 0.0);
      ASSERT_LE(s.iou, 1.0);
    }
    sum += p.final_iou;
    sum_l1 += p.final_l1;
  }
  EXPECT_NEAR(r.mean_final_iou, sum / pairs.size(), 1e-12);
  EXPECT_NEAR(r.mean_final_l1, sum_l1 / pairs.size(), 1e-12);
  const auto curve = focaler::mean_iou_curve(r);
  ASSERT_EQ(curve.size(), 41u);
  EXPECT_NEAR(curve.back(), r.mean_final_iou, 1e-12);
}

TEST(Run, ThreadCountDoesNotChangeResults) {
  const auto pairs = focaler::generate_scenarios(mixed_spec());
  auto set = basic_set(pairs, LossKind::EIoU, 0.02, 100);
  set.interval = FocalerInterval(0.1, 0.8);
  const auto r1 = focaler::run(set);
  set.threads = 4;
  const auto r4 = focaler::run(set);
  EXPECT_EQ(r1.mean_final_iou, r4.mean_final_iou);
  EXPECT_EQ(r1.mean_final_l1, r4.mean_final_l1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(r1.per_pair[i].final_anchor, r4.per_pair[i].final_anchor);
  }
}

TEST(Run, ClampsCollapsingExtents) {
  // A huge step on a shrinking width drives it below the floor.
  std::vector<BoxPair> pairs = {{Box(0, 0, 4, 1), Box(0, 0, 0.5, 1)}};
  const auto r = focaler::run(basic_set(pairs, LossKind::EIoU, 50.0, 3));
  EXPECT_GT(r.clamp_events, 0u);
  EXPECT_GE(r.per_pair[0].final_anchor.w(), focaler::kMinExtent);
}

TEST(Run, NonFiniteStateMarksPairDiverged) {
  // An absurd step overflows the first pair; the second sits at its optimum.
  std::vector<BoxPair> pairs = {{Box(0, 0, 1, 1), Box(0.3, 0.2, 1, 1)}, {Box(2, 2, 1, 1), Box(2, 2, 1, 1)}};
  const auto r = focaler::run(basic_set(pairs, LossKind::IoU, 1e308, 5));
  EXPECT_EQ(r.diverged, 1u);
  EXPECT_TRUE(r.per_pair[0].diverged);
  EXPECT_FALSE(r.per_pair[1].diverged);
  EXPECT_EQ(r.mean_final_iou, 1.0);
  EXPECT_EQ(r.mean_final_l1, 0.0);
}

TEST(Run, RejectsInvalidSets) {
  EXPECT_THROW(focaler::run(basic_set({}, LossKind::IoU, 0.1, 10)), focaler::InvalidInput);
  std::vector<BoxPair> one = {{Box(0, 0, 1, 1), Box(0, 0, 1, 1)}};
  EXPECT_THROW(focaler::run(basic_set(one, LossKind::IoU, 0.1, 0)), focaler::InvalidInput);
  EXPECT_THROW(focaler::run(basic_set(one, LossKind::IoU, -0.1, 10)), focaler::InvalidInput);
}

TEST(Compare, SingleConfigMatchesRun) {
  const auto spec = mixed_spec();
  const auto rows = focaler::compare({{LossKind::DIoU, std::nullopt}}, spec, 0.02, 50);
  ASSERT_EQ(rows.size(), 1u);
  const auto r = focaler::run(basic_set(focaler::generate_scenarios(spec), LossKind::DIoU, 0.02, 50));
  EXPECT_EQ(rows[0].mean_final_iou, r.mean_final_iou);
  EXPECT_EQ(rows[0].mean_final_l1, r.mean_final_l1);
}

TEST(Compare, DuplicateConfigsGiveIdenticalRows) {
  const focaler::RunConfig c{LossKind::SIoU, FocalerInterval(0.0, 0.7)};
  const auto rows = focaler::compare({c, c}, mixed_spec(), 0.02, 60);
  EXPECT_EQ(rows[0].mean_final_iou, rows[1].mean_final_iou);
  EXPECT_EQ(rows[0].mean_final_l1, rows[1].mean_final_l1);
  std::ostringstream a, b;
  focaler::write_trace_csv(a, rows[0].result);
  focaler::write_trace_csv(b, rows[1].result);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Compare, FocalerDoublesGradientBelowU) {
  focaler::ScenarioSpec spec;
  spec.n_hard = 60;
  spec.hard_iou_range = {0.05, 0.45};
  spec.seed = 3;
  const auto pairs = focaler::generate_scenarios(spec);
  const auto rows = focaler::compare(
      {{LossKind::IoU, std::nullopt}, {LossKind::IoU, FocalerInterval(0.0, 0.5)}}, pairs, 0.02, 30);
  const auto& plain = rows[0].result;
  const auto& focused = rows[1].result;
  for (std::size_t i = 0; i < plain.per_pair.size(); ++i) {
    // Both runs start from the same state.
    const auto& p0 = plain.per_pair[i].trace[0];
    const auto& f0 = focused.per_pair[i].trace[0];
    ASSERT_LT(p0.iou, 0.5);
    ASSERT_NEAR(f0.grad.norm() / p0.grad.norm(), 2.0, 1e-9);
    // Afterwards, compare against the plain gradient at the focused state.
    for (const auto& s : focused.per_pair[i].trace) {
      const auto ref = focaler::loss_grad(LossKind::IoU, s.anchor, pairs[i].gt);
      if (s.iou < 0.5 && ref.grad.norm() > 0.0) {
        ASSERT_NEAR(s.grad.norm() / ref.grad.norm(), 2.0, 1e-9);
      } else if (s.iou > 0.5) {
        ASSERT_EQ(s.grad.norm(), 0.0);
      }
    }
  }
}
