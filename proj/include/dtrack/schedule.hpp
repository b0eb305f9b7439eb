#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "dtrack/geometry.hpp"

namespace dtrack {

using Rng = std::mt19937_64;

/// Coefficient on the noise term of the closed-form marginal.
///   AsPrinted:          x_t = sqrt(abar) x_0 + (1 - abar) eps
///   VariancePreserving: x_t = sqrt(abar) x_0 + sqrt(1 - abar) eps
enum class NoiseForm { AsPrinted, VariancePreserving };

class NoiseSchedule {
 public:
  NoiseSchedule(std::vector<double> alpha_bar, std::vector<double> beta)
      : alpha_bar_(std::move(alpha_bar)), beta_(std::move(beta)) {}

  int steps() const { return static_cast<int>(alpha_bar_.size()) - 1; }

  /// Cumulative signal retention for t in [0, T].
  double alpha_bar(int t) const { return alpha_bar_.at(check(t)); }

  /// Per-step variance for t in [1, T].
  double beta(int t) const {
    if (t < 1 || t > steps()) throw std::out_of_range("beta: step out of range");
    return beta_[static_cast<std::size_t>(t)];
  }

  double noise_coefficient(int t, NoiseForm form) const {
    const double ab = alpha_bar(t);
    return form == NoiseForm::AsPrinted ? 1.0 - ab : std::sqrt(1.0 - ab);
  }

 private:
  std::size_t check(int t) const {
    if (t < 0 || t > steps()) throw std::out_of_range("noise schedule: step out of range");
    return static_cast<std::size_t>(t);
  }

  std::vector<double> alpha_bar_;
  std::vector<double> beta_;  // index 0 unused
};

/// Squared-cosine schedule with offset s. Betas are clipped at `max_beta` and
/// alpha_bar is the running product of (1 - beta), so the final step retains
/// almost no signal.
inline NoiseSchedule cosine_schedule(int total_steps, double offset = 0.008,
                                     double max_beta = 0.999) {
  if (total_steps < 1) throw std::invalid_argument("cosine_schedule: T must be >= 1");
  const double T = total_steps;
  auto f = [&](double t) {
    const double c = std::cos(0.5 * std::numbers::pi * ((t / T + offset) / (1.0 + offset)));
    return c * c;
  };
  std::vector<double> alpha_bar(static_cast<std::size_t>(total_steps) + 1, 1.0);
  std::vector<double> beta(static_cast<std::size_t>(total_steps) + 1, 0.0);
  for (int t = 1; t <= total_steps; ++t) {
    const double b = std::min(1.0 - f(t) / f(t - 1), max_beta);
    beta[static_cast<std::size_t>(t)] = b;
    alpha_bar[static_cast<std::size_t>(t)] = alpha_bar[static_cast<std::size_t>(t) - 1] * (1.0 - b);
  }
  return NoiseSchedule(std::move(alpha_bar), std::move(beta));
}

/// Elementwise a*x + b*y over paired boxes.
inline std::vector<PairedBox> affine_combine(std::span<const PairedBox> x, double a,
                                             std::span<const PairedBox> y, double b) {
  if (x.size() != y.size()) throw std::invalid_argument("affine_combine: size mismatch");
  std::vector<PairedBox> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto xv = x[i].flatten();
    const auto yv = y[i].flatten();
    std::array<double, 8> r{};
    for (std::size_t k = 0; k < 8; ++k) r[k] = a * xv[k] + b * yv[k];
    out.push_back(PairedBox::unflatten(r));
  }
  return out;
}

/// n rows of i.i.d. standard-normal coordinates.
inline std::vector<PairedBox> gaussian_pairs(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<PairedBox> out(n);
  for (auto& p : out) {
    std::array<double, 8> v{};
    for (auto& c : v) c = normal(rng);
    p = PairedBox::unflatten(v);
  }
  return out;
}

/// Closed-form forward marginal at step t.
inline std::vector<PairedBox> forward_noise(std::span<const PairedBox> z0, int t,
                                            std::span<const PairedBox> noise,
                                            const NoiseSchedule& sched,
                                            NoiseForm form = NoiseForm::AsPrinted) {
  if (t < 0 || t > sched.steps()) throw std::out_of_range("forward_noise: step out of range");
  return affine_combine(z0, std::sqrt(sched.alpha_bar(t)), noise, sched.noise_coefficient(t, form));
}

/// One Markov transition q(x_t | x_{t-1}).
inline std::vector<PairedBox> single_step_noise(std::span<const PairedBox> z, int t,
                                                const NoiseSchedule& sched,
                                                std::span<const PairedBox> noise) {
  if (t < 1 || t > sched.steps()) throw std::out_of_range("single_step_noise: step out of range");
  const double b = sched.beta(t);
  return affine_combine(z, std::sqrt(1.0 - b), noise, std::sqrt(b));
}

}  // namespace dtrack
