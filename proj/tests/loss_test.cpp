#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dtrack/loss.hpp"

using namespace dtrack;

namespace {

const ImageSize kImage{100, 100};

std::vector<LabeledPair> some_targets() {
  return {{{{20, 20, 10, 10}, {22, 20, 10, 10}}, 1, 1},
          {{{60, 60, 20, 30}, {61, 62, 20, 30}}, 1, 1},
          {{{80, 20, 10, 20}, {80, 20, 10, 20}}, 1, 0}};
}

std::vector<Candidate> perfect_predictions(const std::vector<LabeledPair>& gts) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const double p = gts[i].label_prev ? 1.0 : 0.0, c = gts[i].label_cur ? 1.0 : 0.0;
    out.push_back({gts[i].pair, p, c, 1.0, i});
  }
  return out;
}

}  // namespace

TEST(Focal, FrozenValues) {
  EXPECT_NEAR(focal_loss(0.9, 1), 2.6340128914456573e-4, 1e-15);
  EXPECT_NEAR(focal_loss(0.5, 1), 0.04332169878499658, 1e-15);
  EXPECT_NEAR(focal_loss(0.5, 0), 0.12996509635498973, 1e-15);
}

TEST(Focal, ClampedAndNonNegative) {
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    EXPECT_GE(focal_loss(p, 1), 0.0);
    EXPECT_GE(focal_loss(p, 0), 0.0);
    EXPECT_TRUE(std::isfinite(focal_loss(p, 1)));
  }
  EXPECT_LT(focal_loss(1.0, 1), 1e-12);
  EXPECT_LT(focal_loss(0.0, 0), 1e-12);
}

TEST(FusedScore, GeometricMean) {
  EXPECT_DOUBLE_EQ(fused_score(0.25, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(fused_score(-1.0, 1.0), 0.0);
}

TEST(Loss, PerfectPredictionsAreOptimal) {
  const auto gts = some_targets();
  const auto preds = perfect_predictions(gts);
  const auto l = detection_loss(preds, gts, kImage);
  EXPECT_EQ(l.reg, 0.0);
  EXPECT_EQ(l.giou_term, 0.0);
  EXPECT_LT(l.cls, 1e-3);
  EXPECT_EQ(l.num_pos, 3u);
}

TEST(Loss, HandComputedSinglePair) {
  // fused scores 0.9 / 0.8, L1 = 2/100, giou3d = 760/840
  const std::vector<LabeledPair> gts{{{{50, 50, 20, 20}, {50, 50, 20, 20}}, 1, 1}};
  const std::vector<Candidate> preds{{{{52, 50, 20, 20}, {50, 50, 20, 20}}, 0.81, 0.64, 1.0, 0}};
  const auto l = detection_loss(preds, gts, kImage);
  EXPECT_NEAR(l.total, 0.2954658640807638, 1e-9);
  EXPECT_NEAR(l.reg, 0.02, 1e-12);
  EXPECT_NEAR(l.giou_term, 1.0 - 760.0 / 840.0, 1e-12);
}

TEST(Loss, PermutationInvariantExactly) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0), pos(10, 90), size(5, 30);
  const auto gts = some_targets();
  std::vector<Candidate> preds;
  for (std::size_t i = 0; i < 6; ++i) {
    preds.push_back({{{pos(rng), pos(rng), size(rng), size(rng)}, {pos(rng), pos(rng), size(rng), size(rng)}},
                     u(rng), u(rng), u(rng), i});
  }
  const auto base = detection_loss(preds, gts, kImage);
  auto p2 = preds;
  auto g2 = gts;
  for (int k = 0; k < 20; ++k) {
    std::shuffle(p2.begin(), p2.end(), rng);
    std::shuffle(g2.begin(), g2.end(), rng);
    const auto l = detection_loss(p2, g2, kImage);
    EXPECT_EQ(l.total, base.total);
    EXPECT_EQ(l.cls, base.cls);
    EXPECT_EQ(l.reg, base.reg);
  }
}

TEST(Loss, UnmatchedPredictionsPayBackground) {
  const std::vector<Candidate> preds{{{{50, 50, 20, 20}, {50, 50, 20, 20}}, 0.25, 0.25, 1.0, 0}};
  const auto l = detection_loss(preds, std::vector<LabeledPair>{}, kImage);
  EXPECT_EQ(l.num_pos, 0u);
  EXPECT_NEAR(l.cls, 2 * focal_loss(0.5, 0), 1e-15);
  EXPECT_NEAR(l.total, 2.0 * 2 * focal_loss(0.5, 0), 1e-15);
}

TEST(Loss, MatchingPrefersCloserPrediction) {
  const std::vector<LabeledPair> gts{{{{50, 50, 20, 20}, {50, 50, 20, 20}}, 1, 1}};
  const std::vector<Candidate> preds{{{{10, 10, 5, 5}, {10, 10, 5, 5}}, 0.5, 0.5, 0.5, 0},
                                     {{{51, 50, 20, 20}, {50, 50, 20, 20}}, 0.5, 0.5, 0.5, 1}};
  EXPECT_LT(match_cost(preds[1], gts[0], kImage), match_cost(preds[0], gts[0], kImage));
  const auto l = detection_loss(preds, gts, kImage);
  EXPECT_NEAR(l.reg, 0.01, 1e-12);
}
