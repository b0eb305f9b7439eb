#include <gtest/gtest.h>

#include "dtrack/kalman.hpp"

using namespace dtrack;

TEST(Kalman, InitiateHoldsMeasurement) {
  const KalmanBoxFilter kf;
  const BBox b{100, 50, 20, 40};
  const auto s = kf.initiate(b);
  EXPECT_DOUBLE_EQ(s.box().cx, 100);
  EXPECT_DOUBLE_EQ(s.box().w, 20);
  EXPECT_DOUBLE_EQ(s.mean(4), 0.0);
  EXPECT_TRUE((s.cov - s.cov.transpose()).isZero());
}

TEST(Kalman, PredictWithoutVelocityKeepsBoxAndGrowsCovariance) {
  const KalmanBoxFilter kf;
  const auto s = kf.initiate({100, 50, 20, 40});
  const auto p = kf.predict(s);
  EXPECT_DOUBLE_EQ(p.box().cx, 100);
  for (int i = 0; i < 8; ++i) EXPECT_GT(p.cov(i, i), s.cov(i, i));
}

TEST(Kalman, LearnsConstantVelocity) {
  const KalmanBoxFilter kf;
  auto s = kf.initiate({100, 50, 20, 40});
  for (int k = 1; k <= 15; ++k) {
    s = kf.predict(s);
    s = kf.update(s, {100.0 + 5 * k, 50, 20, 40});
  }
  EXPECT_NEAR(s.mean(4), 5.0, 0.2);
  const auto ahead = kf.predict(kf.predict(s));
  EXPECT_NEAR(ahead.box().cx, 100 + 5 * 17, 1.0);
  EXPECT_NEAR(ahead.box().h, 40, 1e-6);
}

TEST(Kalman, MultiStepPredictEqualsRepeatedForMean) {
  const KalmanBoxFilter kf;
  auto s = kf.initiate({100, 50, 20, 40});
  s.mean(4) = 3;
  const auto a = kf.predict(s, 3.0);
  const auto b = kf.predict(kf.predict(kf.predict(s)));
  EXPECT_NEAR(a.mean(0), b.mean(0), 1e-9);
  EXPECT_NEAR(a.mean(0), 109, 1e-9);
}

TEST(Kalman, UpdateMovesTowardMeasurementAndShrinksCovariance) {
  const KalmanBoxFilter kf;
  const auto s = kf.predict(kf.initiate({100, 50, 20, 40}));
  const auto u = kf.update(s, {110, 50, 20, 40});
  EXPECT_GT(u.box().cx, 100);
  EXPECT_LT(u.box().cx, 110);
  EXPECT_LT(u.cov(0, 0), s.cov(0, 0));
  const Eigen::SelfAdjointEigenSolver<KalmanBoxFilter::Mat8> eig(u.cov);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}
