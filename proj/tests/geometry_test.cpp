#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dtrack/geometry.hpp"
#include "test_support.hpp"

using dtrack::BBox;
using dtrack::PairedBox;

namespace {

BBox corners(double x1, double y1, double x2, double y2) { return BBox::from_corners(x1, y1, x2, y2); }

}  // namespace

TEST(Box, CornerAndCentreForms) {
  const BBox b = BBox::from_ltwh(10, 20, 30, 40);
  EXPECT_DOUBLE_EQ(b.cx, 25);
  EXPECT_DOUBLE_EQ(b.cy, 40);
  EXPECT_DOUBLE_EQ(b.x2(), 40);
  EXPECT_DOUBLE_EQ(b.y2(), 60);
  EXPECT_DOUBLE_EQ(b.area(), 1200);
}

TEST(PairedBoxLayout, FlattenRoundTrip) {
  const PairedBox p{{1, 2, 3, 4}, {5, 6, 7, 8}};
  const auto v = p.flatten();
  EXPECT_EQ(v[0], 1);
  EXPECT_EQ(v[7], 8);
  EXPECT_EQ(PairedBox::unflatten(v), p);
}

TEST(Iou, HandValues) {
  EXPECT_DOUBLE_EQ(dtrack::iou(corners(0, 0, 2, 2), corners(0, 0, 2, 2)), 1.0);
  EXPECT_DOUBLE_EQ(dtrack::iou(corners(0, 0, 2, 2), corners(1, 1, 3, 3)), 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(dtrack::iou(corners(0, 0, 1, 1), corners(2, 2, 3, 3)), 0.0);
  // touching edges share no area
  EXPECT_DOUBLE_EQ(dtrack::iou(corners(0, 0, 1, 1), corners(1, 0, 2, 1)), 0.0);
}

TEST(Giou, HandValues) {
  EXPECT_NEAR(dtrack::giou(corners(0, 0, 2, 2), corners(1, 1, 3, 3)), 1.0 / 7.0 - 2.0 / 9.0, 1e-15);
  // disjoint unit squares three apart: hull 4x1, union 2
  EXPECT_NEAR(dtrack::giou(corners(0, 0, 1, 1), corners(3, 0, 4, 1)), -0.5, 1e-15);
}

TEST(Giou, DegenerateBoxIsZero) {
  EXPECT_EQ(dtrack::iou(corners(0, 0, 0, 5), corners(0, 0, 2, 2)), 0.0);
  EXPECT_EQ(dtrack::giou(corners(0, 0, 0, 5), corners(0, 0, 2, 2)), 0.0);
}

TEST(Iou3d, HandValues) {
  // identical prev frames (area 4), disjoint cur frames
  const PairedBox d{corners(0, 0, 2, 2), corners(0, 0, 2, 2)};
  const PairedBox g{corners(0, 0, 2, 2), corners(5, 5, 7, 7)};
  EXPECT_DOUBLE_EQ(dtrack::iou3d(d, g), 4.0 / 12.0);
  // hull: 4 + 7x7; union 12
  EXPECT_NEAR(dtrack::giou3d(d, g), 4.0 / 12.0 - (53.0 - 12.0) / 53.0, 1e-15);
}

TEST(Iou3d, HalfOverlapEachFrame) {
  const PairedBox d{corners(0, 0, 2, 2), corners(0, 0, 2, 2)};
  const PairedBox g{corners(1, 0, 3, 2), corners(1, 0, 3, 2)};
  EXPECT_DOUBLE_EQ(dtrack::iou3d(d, g), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(dtrack::giou3d(d, g), 1.0 / 3.0);
}

TEST(Iou3d, EqualsIouWhenBothFramesMatch) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const BBox a = testsupport::random_box(rng), b = testsupport::random_box(rng);
    EXPECT_NEAR(dtrack::iou3d({a, a}, {b, b}), dtrack::iou(a, b), 1e-12);
    EXPECT_NEAR(dtrack::giou3d({a, a}, {b, b}), dtrack::giou(a, b), 1e-12);
  }
}

TEST(GeometryOracle, RasterAgreement2d) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = testsupport::random_int_box(rng), b = testsupport::random_int_box(rng);
    ASSERT_NEAR(dtrack::iou(a, b), testsupport::raster_iou(a, b), 1e-3);
    ASSERT_NEAR(dtrack::giou(a, b), testsupport::raster_giou(a, b), 1e-3);
  }
}

TEST(GeometryOracle, RasterAgreement3d) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const PairedBox d{testsupport::random_int_box(rng), testsupport::random_int_box(rng)};
    const PairedBox g{testsupport::random_int_box(rng), testsupport::random_int_box(rng)};
    ASSERT_NEAR(dtrack::iou3d(d, g), testsupport::raster_iou3d(d, g), 1e-3);
    ASSERT_NEAR(dtrack::giou3d(d, g), testsupport::raster_giou3d(d, g), 1e-3);
  }
}

TEST(GeometryProperties, SymmetryRangeIdentityOrdering) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = testsupport::random_box(rng), b = testsupport::random_box(rng);
    const double o = dtrack::iou(a, b), g = dtrack::giou(a, b);
    EXPECT_EQ(o, dtrack::iou(b, a));
    EXPECT_EQ(g, dtrack::giou(b, a));
    EXPECT_GE(o, 0.0);
    EXPECT_LE(o, 1.0);
    EXPECT_GT(g, -1.0);
    EXPECT_LE(g, o);
    EXPECT_NEAR(dtrack::iou(a, a), 1.0, 1e-12);
    EXPECT_NEAR(dtrack::giou(a, a), 1.0, 1e-12);

    const PairedBox d{a, testsupport::random_box(rng)}, e{b, testsupport::random_box(rng)};
    const double o3 = dtrack::iou3d(d, e), g3 = dtrack::giou3d(d, e);
    EXPECT_EQ(o3, dtrack::iou3d(e, d));
    EXPECT_EQ(g3, dtrack::giou3d(e, d));
    EXPECT_GE(o3, 0.0);
    EXPECT_LE(o3, 1.0);
    EXPECT_GT(g3, -1.0);
    EXPECT_LE(g3, o3);
    EXPECT_NEAR(dtrack::iou3d(d, d), 1.0, 1e-12);
  }
}

TEST(Nms2d, SuppressesOverlapsKeepsOrder) {
  const std::vector<BBox> boxes{corners(0, 0, 10, 10), corners(1, 1, 11, 11), corners(20, 20, 30, 30)};
  const std::vector<double> scores{0.9, 0.8, 0.7};
  EXPECT_EQ(dtrack::nms2d(boxes, scores, 0.5), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(dtrack::nms2d(boxes, scores, 0.99), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Nms2d, TiesGoToLowerIndex) {
  const std::vector<BBox> boxes{corners(0, 0, 10, 10), corners(0, 0, 10, 10)};
  const std::vector<double> scores{0.5, 0.5};
  EXPECT_EQ(dtrack::nms2d(boxes, scores, 0.5), (std::vector<std::size_t>{0}));
}

TEST(Nms2d, ThresholdIsStrict) {
  // iou exactly 1/3
  const std::vector<BBox> boxes{corners(0, 0, 2, 2), corners(1, 0, 3, 2)};
  const std::vector<double> scores{0.9, 0.8};
  EXPECT_EQ(dtrack::nms2d(boxes, scores, 1.0 / 3.0).size(), 2u);
  EXPECT_EQ(dtrack::nms2d(boxes, scores, 0.3).size(), 1u);
}

TEST(Nms3d, UsesBothFrames) {
  // same prev box, disjoint cur boxes: iou3d = 1/3 stays under 0.6
  const std::vector<PairedBox> pairs{{corners(0, 0, 2, 2), corners(0, 0, 2, 2)},
                                     {corners(0, 0, 2, 2), corners(5, 5, 7, 7)}};
  const std::vector<double> scores{0.9, 0.8};
  EXPECT_EQ(dtrack::nms3d(pairs, scores, 0.6).size(), 2u);
  EXPECT_EQ(dtrack::nms2d(std::vector<BBox>{pairs[0].prev, pairs[1].prev}, scores, 0.6).size(), 1u);
}

TEST(Nms, LengthMismatchThrows) {
  const std::vector<BBox> boxes{corners(0, 0, 1, 1)};
  const std::vector<double> scores{0.1, 0.2};
  EXPECT_THROW(dtrack::nms2d(boxes, scores, 0.5), std::invalid_argument);
}

TEST(Nms, EmptyInput) {
  EXPECT_TRUE(dtrack::nms2d(std::vector<BBox>{}, std::vector<double>{}, 0.5).empty());
}
