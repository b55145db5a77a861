#include <gtest/gtest.h>

#include <cmath>

#include "focaler/focaler.hpp"
#include "test_support.hpp"

using focaler::Box;
using focaler::FocalerInterval;
using focaler::LossKind;

TEST(FocalerInterval, Validation) {
  EXPECT_NO_THROW(FocalerInterval(0.0, 1.0));
  EXPECT_NO_THROW(FocalerInterval(0.2, 0.3));
  EXPECT_THROW(FocalerInterval(0.5, 0.5), focaler::InvalidInput);
  EXPECT_THROW(FocalerInterval(0.6, 0.5), focaler::InvalidInput);
  EXPECT_THROW(FocalerInterval(-0.1, 0.5), focaler::InvalidInput);
  EXPECT_THROW(FocalerInterval(0.1, 1.1), focaler::InvalidInput);
  EXPECT_THROW(FocalerInterval(NAN, 0.5), focaler::InvalidInput);
  EXPECT_TRUE(FocalerInterval().is_identity());
}

TEST(FocalerMap, Examples) {
  const FocalerInterval id;
  for (double x : {0.0, 0.1, 0.37, 0.999, 1.0}) EXPECT_EQ(focaler::focaler_map(x, id), x);
  EXPECT_DOUBLE_EQ(focaler::focaler_map(0.5, FocalerInterval(0.25, 0.75)), 0.5);
  EXPECT_EQ(focaler::focaler_map(0.1, FocalerInterval(0.2, 0.9)), 0.0);
  EXPECT_EQ(focaler::focaler_map(0.95, FocalerInterval(0.2, 0.9)), 1.0);
}

TEST(FocalerMap, BoundsAreInclusiveInTheLinearBranch) {
  const FocalerInterval iv(0.2, 0.6);
  EXPECT_EQ(focaler::focaler_map(0.2, iv), 0.0);
  EXPECT_DOUBLE_EQ(focaler::focaler_map(0.6, iv), 1.0);
}

TEST(FocalerMap, RejectsInvalidIou) {
  const FocalerInterval iv(0.2, 0.6);
  EXPECT_THROW(focaler::focaler_map(-0.01, iv), focaler::InvalidInput);
  EXPECT_THROW(focaler::focaler_map(1.01, iv), focaler::InvalidInput);
  EXPECT_THROW(focaler::focaler_map(NAN, iv), focaler::InvalidInput);
  EXPECT_THROW(focaler::focaler_iou_loss(INFINITY, iv), focaler::InvalidInput);
}

TEST(FocalerIouLoss, Examples) {
  for (auto iv : {FocalerInterval(), FocalerInterval(0.3, 0.7), FocalerInterval(0.0, 0.2)}) {
    EXPECT_EQ(focaler::focaler_iou_loss(1.0, iv), 0.0);
    EXPECT_EQ(focaler::focaler_iou_loss(0.0, iv), 1.0);
  }
  EXPECT_DOUBLE_EQ(focaler::focaler_iou_loss(0.5, FocalerInterval(0.25, 0.75)), 0.5);
}

TEST(FocalerLoss, Examples) {
  const Box a(3, 3, 2, 1);
  for (LossKind k : focaler::kAllLossKinds) {
    for (auto iv : {FocalerInterval(), FocalerInterval(0.3, 1.0)}) {
      EXPECT_EQ(focaler::focaler_loss(k, a, a, iv).focaler_loss, 0.0);
    }
  }

  const Box da = Box::from_corners(0, 0, 1, 1), dg = Box::from_corners(2, 2, 3, 3);
  const auto e = focaler::focaler_loss(LossKind::GIoU, da, dg, FocalerInterval(0.2, 0.8));
  EXPECT_EQ(e.iou, 0.0);
  EXPECT_EQ(e.iou_focaler, 0.0);
  EXPECT_NEAR(e.base_loss, 16.0 / 9.0, 1e-15);
  EXPECT_NEAR(e.focaler_loss, 16.0 / 9.0, 1e-15);
}

TEST(FocalerLoss, IouKindReducesToFocalerIouLoss) {
  // A 2x1 box covering a unit box: IoU = 1/2.
  const Box a = Box::from_corners(0, 0, 2, 1), g = Box::from_corners(0, 0, 1, 1);
  const FocalerInterval iv(0.25, 0.75);
  const auto e = focaler::focaler_loss(LossKind::IoU, a, g, iv);
  EXPECT_EQ(e.iou, 0.5);
  EXPECT_DOUBLE_EQ(e.focaler_loss, 0.5);
  EXPECT_NEAR(e.focaler_loss, focaler::focaler_iou_loss(0.5, iv), 1e-15);
}

TEST(MappingSlope, Examples) {
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(focaler::mapping_slope(x, FocalerInterval()), 1.0);
  EXPECT_EQ(focaler::mapping_slope(0.5, FocalerInterval(0.25, 0.75)), 2.0);
  EXPECT_EQ(focaler::mapping_slope(0.05, FocalerInterval(0.2, 0.9)), 0.0);
  EXPECT_EQ(focaler::mapping_slope(0.95, FocalerInterval(0.2, 0.9)), 0.0);
  // Kinks take the interior value.
  EXPECT_EQ(focaler::mapping_slope(0.25, FocalerInterval(0.25, 0.75)), 2.0);
  EXPECT_EQ(focaler::mapping_slope(0.75, FocalerInterval(0.25, 0.75)), 2.0);
}

TEST(FocalerProperties, IdentityOnGrid) {
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    ASSERT_EQ(focaler::focaler_map(x, FocalerInterval(0.0, 1.0)), x);
  }
}

TEST(FocalerProperties, MonotoneAndClamped) {
  testing_support::PairSampler s(31);
  for (int t = 0; t < 200; ++t) {
    const double d = s.uniform(0, 0.9);
    const FocalerInterval iv(d, s.uniform(d + 1e-3, 1.0));
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      const double y = focaler::focaler_map(x, iv);
      ASSERT_GE(y, prev);
      ASSERT_GE(y, 0.0);
      ASSERT_LE(y, 1.0);
      if (x < iv.d()) ASSERT_EQ(y, 0.0);
      if (x > iv.u()) ASSERT_EQ(y, 1.0);
      prev = y;
    }
  }
}

TEST(FocalerProperties, RaisingLowerBoundNeverRaisesMap) {
  testing_support::PairSampler s(32);
  for (int t = 0; t < 500; ++t) {
    const double u = s.uniform(0.3, 1.0);
    const double d1 = s.uniform(0.0, u - 0.01);
    const double d2 = s.uniform(d1, u - 1e-3);
    const double x = s.uniform(0.0, 1.0);
    ASSERT_LE(focaler::focaler_map(x, FocalerInterval(d2, u)),
              focaler::focaler_map(x, FocalerInterval(d1, u)) + 1e-15);
  }
}

TEST(FocalerProperties, CompositionIdentityForEveryKind) {
  testing_support::PairSampler s(33);
  for (int i = 0; i < 10000; ++i) {
    const auto [a, g] = s.pair();
    const double d = s.uniform(0.0, 0.9);
    const FocalerInterval iv(d, s.uniform(d + 1e-3, 1.0));
    const double v = focaler::iou(a, g);
    for (LossKind k : focaler::kAllLossKinds) {
      const auto e = focaler::focaler_loss(k, a, g, iv);
      ASSERT_NEAR(e.focaler_loss, focaler::loss(k, a, g) + v - focaler::focaler_map(v, iv), 1e-12);
      ASSERT_GE(e.iou_focaler, 0.0);
      ASSERT_LE(e.iou_focaler, 1.0);
    }
    ASSERT_NEAR(focaler::focaler_loss(LossKind::IoU, a, g, iv).focaler_loss,
                focaler::focaler_iou_loss(v, iv), 1e-12);
  }
}
