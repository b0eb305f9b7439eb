#pragma once

#include <Eigen/Dense>

#include "dtrack/geometry.hpp"

namespace dtrack {

/// Constant-velocity Kalman filter over (cx, cy, aspect, height) and their
/// velocities, with the usual height-proportional noise model.
class KalmanBoxFilter {
 public:
  using Vec8 = Eigen::Matrix<double, 8, 1>;
  using Mat8 = Eigen::Matrix<double, 8, 8>;
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  using Mat4 = Eigen::Matrix<double, 4, 4>;

  struct State {
    Vec8 mean = Vec8::Zero();
    Mat8 cov = Mat8::Identity();

    BBox box() const {
      const double h = mean(3);
      const double w = mean(2) * h;
      return {mean(0), mean(1), w, h};
    }
  };

  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;

  static Vec4 to_measurement(const BBox& b) {
    const double h = b.h > 0.0 ? b.h : 1e-6;
    return {b.cx, b.cy, b.w / h, h};
  }

  static Mat8 transition(double dt) {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) f(i, 4 + i) = dt;
    return f;
  }

  State initiate(const BBox& b) const {
    const Vec4 m = to_measurement(b);
    State s;
    s.mean.head<4>() = m;
    s.mean.tail<4>().setZero();
    const double h = m(3);
    Vec8 std;
    std << 2 * std_weight_position * h, 2 * std_weight_position * h, 1e-2, 2 * std_weight_position * h,
        10 * std_weight_velocity * h, 10 * std_weight_velocity * h, 1e-5, 10 * std_weight_velocity * h;
    s.cov = std.array().square().matrix().asDiagonal();
    return s;
  }

  /// Advances the state by dt frames.
  State predict(const State& s, double dt = 1.0) const {
    const double h = s.mean(3);
    Vec8 std;
    std << std_weight_position * h, std_weight_position * h, 1e-2, std_weight_position * h,
        std_weight_velocity * h, std_weight_velocity * h, 1e-5, std_weight_velocity * h;
    const Mat8 q = (std.array().square() * dt).matrix().asDiagonal();
    const Mat8 f = transition(dt);
    State out;
    out.mean = f * s.mean;
    out.cov = f * s.cov * f.transpose() + q;
    return out;
  }

  State update(const State& s, const BBox& measured) const {
    const Vec4 z = to_measurement(measured);
    Eigen::Matrix<double, 4, 8> hm = Eigen::Matrix<double, 4, 8>::Zero();
    hm.leftCols<4>().setIdentity();
    const double h = s.mean(3);
    Vec4 std;
    std << std_weight_position * h, std_weight_position * h, 1e-1, std_weight_position * h;
    const Mat4 r = std.array().square().matrix().asDiagonal();
    const Mat4 innovation_cov = hm * s.cov * hm.transpose() + r;
    const Eigen::Matrix<double, 8, 4> gain = s.cov * hm.transpose() * innovation_cov.inverse();
    State out;
    out.mean = s.mean + gain * (z - hm * s.mean);
    out.cov = s.cov - gain * innovation_cov * gain.transpose();
    return out;
  }
};

}  // namespace dtrack
