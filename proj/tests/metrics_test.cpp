#include <gtest/gtest.h>

#include <cmath>

#include "dtrack/metrics.hpp"
#include "test_support.hpp"

using namespace dtrack;

TEST(Metrics, SixBoxInstance) {
  const auto [gt, res] = testsupport::six_box_instance();
  const auto r = evaluate(gt, res);
  EXPECT_EQ(r.mota, 2.0 / 3.0);
  EXPECT_EQ(r.idf1, 8.0 / 11.0);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.idsw, 1u);
  EXPECT_EQ(r.frag, 1u);
  EXPECT_EQ(r.gt_count, 6u);
  EXPECT_EQ(r.pred_count, 5u);
  EXPECT_EQ(r.idtp, 4u);
}

TEST(Metrics, RelabelingInvariance) {
  const auto [gt, res] = testsupport::six_box_instance();
  const auto base = evaluate(gt, res);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    auto g = gt;
    auto h = res;
    testsupport::relabel(g, h, rng);
    const auto r = evaluate(g, h);
    EXPECT_EQ(r.mota, base.mota);
    EXPECT_EQ(r.idf1, base.idf1);
    EXPECT_EQ(r.idsw, base.idsw);
    EXPECT_EQ(r.frag, base.frag);
  }
}

TEST(Metrics, PerfectTrackingScoresOne) {
  const auto gt = testsupport::two_track_scene();
  TrackingResult res;
  for (const auto& f : gt.frames) {
    std::vector<TrackedBox> hyps;
    for (const auto& e : f) hyps.push_back({e.id + 10, e.box, 1.0});
    res.frames.push_back(hyps);
  }
  const auto r = evaluate(gt, res);
  EXPECT_EQ(r.mota, 1.0);
  EXPECT_EQ(r.idf1, 1.0);
  EXPECT_EQ(r.idsw, 0u);
}

TEST(Metrics, GateAndFalsePositives) {
  const auto gt = testsupport::two_track_scene();
  TrackingResult res;
  for (const auto& f : gt.frames) {
    // shifted by 10 px: iou 1/3 under the 0.5 gate
    res.frames.push_back({{1, {f[0].box.cx + 10, f[0].box.cy, 20, 40}, 1.0}});
  }
  const auto r = evaluate(gt, res);
  EXPECT_EQ(r.fp, 3u);
  EXPECT_EQ(r.fn, 6u);
  EXPECT_EQ(r.mota, 1.0 - 9.0 / 6.0);
  EXPECT_EQ(evaluate(gt, res, 0.3).fp, 0u);
}

TEST(Metrics, StickyCorrespondenceAvoidsSpuriousSwitch) {
  // two hypotheses on one object; the original keeps it even when the other overlaps more
  SceneGroundTruth gt;
  gt.image = {200, 200};
  TrackingResult res;
  for (int k = 0; k < 2; ++k) {
    gt.frames.push_back({{1, {100, 100, 20, 40}, true}});
    std::vector<TrackedBox> h{{7, {102, 100, 20, 40}, 1.0}};
    if (k == 1) h.push_back({8, {100, 100, 20, 40}, 1.0});
    res.frames.push_back(h);
  }
  const auto r = evaluate(gt, res);
  EXPECT_EQ(r.idsw, 0u);
  EXPECT_EQ(r.fp, 1u);
}

TEST(Metrics, OccludedObjectsAreNotScored) {
  auto gt = testsupport::two_track_scene();
  gt.frames[1][1].visible = false;
  TrackingResult res;
  for (const auto& f : gt.frames) {
    std::vector<TrackedBox> hyps;
    for (const auto& e : f) {
      if (e.visible) hyps.push_back({e.id, e.box, 1.0});
    }
    res.frames.push_back(hyps);
  }
  const auto r = evaluate(gt, res);
  EXPECT_EQ(r.gt_count, 5u);
  EXPECT_EQ(r.mota, 1.0);
  EXPECT_EQ(r.frag, 0u);
}

TEST(Metrics, EmptyGroundTruthIsNan) {
  SceneGroundTruth gt;
  gt.frames.resize(2);
  const auto r = evaluate(gt, TrackingResult{});
  EXPECT_TRUE(std::isnan(r.mota));
  EXPECT_TRUE(std::isnan(r.idf1));
  EXPECT_EQ(to_csv_row(r), "nan,nan,0,0,0,0,0");
}

TEST(Metrics, TooManyResultFramesThrows) {
  SceneGroundTruth gt;
  gt.frames.resize(1);
  TrackingResult res;
  res.frames.resize(2);
  EXPECT_THROW(evaluate(gt, res), std::invalid_argument);
}

TEST(Metrics, Formatting) {
  const auto [gt, res] = testsupport::six_box_instance();
  const auto r = evaluate(gt, res);
  EXPECT_EQ(csv_header(), "mota,idf1,idsw,frag,fp,fn,gt_count");
  EXPECT_EQ(to_csv_row(r), "0.6666666666666666,0.7272727272727273,1,1,0,1,6");
  EXPECT_NE(to_key_value(r).find("idsw=1\n"), std::string::npos);
}
