#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtrack/geometry.hpp"
#include "dtrack/schedule.hpp"
#include "dtrack/signal_space.hpp"

namespace dtrack {

enum class PaddingStrategy { Repeat, CatGaussian, CatPoisson, CatUniform, CatFull };

inline constexpr PaddingStrategy kAllPaddingStrategies[] = {
    PaddingStrategy::Repeat, PaddingStrategy::CatGaussian, PaddingStrategy::CatPoisson,
    PaddingStrategy::CatUniform, PaddingStrategy::CatFull};

inline std::string_view to_string(PaddingStrategy s) {
  switch (s) {
    case PaddingStrategy::Repeat: return "repeat";
    case PaddingStrategy::CatGaussian: return "cat_gaussian";
    case PaddingStrategy::CatPoisson: return "cat_poisson";
    case PaddingStrategy::CatUniform: return "cat_uniform";
    case PaddingStrategy::CatFull: return "cat_full";
  }
  return "?";
}

inline PaddingStrategy parse_padding(std::string_view s) {
  for (const auto p : kAllPaddingStrategies) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown padding strategy: " + std::string(s));
}

/// Distribution parameters for the concatenated-noise strategies. All values
/// live in signal space ([-scale, scale]).
struct PaddingParams {
  double gaussian_mean = 0.0;
  double gaussian_std = 1.0;
  // Poisson counts k map to (k / lambda - 1) * scale: zero mean, std scale/sqrt(lambda).
  double poisson_lambda = 4.0;
};

enum class PerturbationSchedule { Constant, Linear, Exponential, Logarithmic };

inline constexpr PerturbationSchedule kAllPerturbationSchedules[] = {
    PerturbationSchedule::Constant, PerturbationSchedule::Linear,
    PerturbationSchedule::Exponential, PerturbationSchedule::Logarithmic};

inline std::string_view to_string(PerturbationSchedule s) {
  switch (s) {
    case PerturbationSchedule::Constant: return "constant";
    case PerturbationSchedule::Linear: return "linear";
    case PerturbationSchedule::Exponential: return "exponential";
    case PerturbationSchedule::Logarithmic: return "logarithmic";
  }
  return "?";
}

inline PerturbationSchedule parse_perturbation(std::string_view s) {
  for (const auto p : kAllPerturbationSchedules) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown perturbation schedule: " + std::string(s));
}

/// f(x) on [0, 1].
inline double perturbation_fraction(double x, PerturbationSchedule f) {
  switch (f) {
    case PerturbationSchedule::Constant: return 0.4;
    case PerturbationSchedule::Linear: return x;
    case PerturbationSchedule::Exponential: return std::expm1(x) / (std::numbers::e - 1.0);
    case PerturbationSchedule::Logarithmic: return std::log1p(x) / std::numbers::ln2;
  }
  return x;
}

/// Round half up; all proposal counts use this.
inline long round_half_up(double v) { return static_cast<long>(std::floor(v + 0.5)); }

/// t = round(1000 * f(x)) clamped to [0, max_step]. x outside [0, 1] is clamped first.
inline int perturbation_timestep(double x, PerturbationSchedule f, int max_step = 1000) {
  const double xc = std::clamp(x, 0.0, 1.0);
  const long t = round_half_up(1000.0 * perturbation_fraction(xc, f));
  return static_cast<int>(std::clamp<long>(t, 0, max_step));
}

/// Fig.-3 corruption weight derived from the schedule: 1 - sqrt(abar_t).
inline double corruption_weight(const NoiseSchedule& sched, int t) {
  return 1.0 - std::sqrt(sched.alpha_bar(t));
}

enum class ProposalOrigin { PriorDerived, Padded };

struct ProposalSet {
  std::vector<PairedBox> pairs;  // signal space
  std::vector<ProposalOrigin> origin;
  int timestep = 0;
  std::size_t n_prior = 0;       // prior-derived rows occupy [0, n_prior)
  bool fallback = false;         // priors were requested but none existed

  std::size_t size() const { return pairs.size(); }
};

namespace detail {

inline PairedBox sample_padding(PaddingStrategy strategy, const PaddingParams& params,
                                const SignalSpace& space, Rng& rng) {
  std::array<double, 8> v{};
  switch (strategy) {
    case PaddingStrategy::CatGaussian:
    case PaddingStrategy::Repeat: {  // Repeat without originals degrades to Gaussian
      std::normal_distribution<double> normal(params.gaussian_mean, params.gaussian_std);
      for (auto& c : v) c = normal(rng);
      break;
    }
    case PaddingStrategy::CatPoisson: {
      std::poisson_distribution<int> poisson(params.poisson_lambda);
      for (auto& c : v) c = (poisson(rng) / params.poisson_lambda - 1.0) * space.scale;
      break;
    }
    case PaddingStrategy::CatUniform: {
      std::uniform_real_distribution<double> uni(-space.scale, space.scale);
      for (auto& c : v) c = uni(rng);
      break;
    }
    case PaddingStrategy::CatFull: {
      const BBox full = space.full_image();
      return {full, full};
    }
  }
  return PairedBox::unflatten(v);
}

}  // namespace detail

/// Pads ground-truth pairs (signal space) up to exactly n_train rows; the
/// originals keep their positions at the front.
inline std::vector<PairedBox> pad_training_pairs(std::span<const PairedBox> gt_pairs,
                                                 std::size_t n_train, PaddingStrategy strategy,
                                                 Rng& rng, const SignalSpace& space = {},
                                                 const PaddingParams& params = {}) {
  if (gt_pairs.size() > n_train) {
    throw std::invalid_argument("pad_training_pairs: more ground-truth pairs than N_train");
  }
  std::vector<PairedBox> out(gt_pairs.begin(), gt_pairs.end());
  out.reserve(n_train);
  while (out.size() < n_train) {
    if (strategy == PaddingStrategy::Repeat && !gt_pairs.empty()) {
      out.push_back(gt_pairs[out.size() % gt_pairs.size()]);
    } else {
      out.push_back(detail::sample_padding(strategy, params, space, rng));
    }
  }
  return out;
}

/// Builds the N_test proposals for one frame pair. round(proportion * N_test)
/// rows copy the priors (prev = cur = prior) in round-robin order; the rest
/// are padded. With no priors, every row is padded and `fallback` is set when
/// priors were requested.
inline ProposalSet build_inference_proposals(std::span<const BBox> prior_boxes,
                                             std::size_t n_test, double proportion,
                                             PaddingStrategy strategy, const SignalSpace& space,
                                             Rng& rng, const PaddingParams& params = {}) {
  if (n_test < 1) throw std::invalid_argument("build_inference_proposals: N_test must be >= 1");
  if (proportion < 0.0 || proportion > 1.0) {
    throw std::invalid_argument("build_inference_proposals: proportion outside [0, 1]");
  }
  ProposalSet set;
  std::size_t n_prior = static_cast<std::size_t>(round_half_up(proportion * static_cast<double>(n_test)));
  n_prior = std::min(n_prior, n_test);
  if (prior_boxes.empty()) {
    set.fallback = n_prior > 0;
    n_prior = 0;
  }
  set.n_prior = n_prior;
  set.pairs.reserve(n_test);
  std::vector<PairedBox> priors;
  priors.reserve(prior_boxes.size());
  for (const auto& b : prior_boxes) {
    const BBox s = space.to_signal(b);
    priors.push_back({s, s});
  }
  for (std::size_t i = 0; i < n_prior; ++i) {
    set.pairs.push_back(priors[i % priors.size()]);
    set.origin.push_back(ProposalOrigin::PriorDerived);
  }
  std::size_t cycle = 0;
  while (set.pairs.size() < n_test) {
    if (strategy == PaddingStrategy::Repeat && !priors.empty()) {
      set.pairs.push_back(priors[cycle++ % priors.size()]);
    } else {
      set.pairs.push_back(detail::sample_padding(strategy, params, space, rng));
    }
    set.origin.push_back(ProposalOrigin::Padded);
  }
  return set;
}

enum class CorruptionTarget { BothFrames, CurrentOnly };

/// B <- (1 - alpha) B + alpha * B_noise, per coordinate in signal space.
inline ProposalSet corrupt_proposals(ProposalSet p, double alpha, std::span<const PairedBox> noise,
                                     CorruptionTarget target = CorruptionTarget::BothFrames) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("corrupt_proposals: alpha outside [0, 1]");
  if (noise.size() != p.pairs.size()) throw std::invalid_argument("corrupt_proposals: noise size mismatch");
  for (std::size_t i = 0; i < p.pairs.size(); ++i) {
    auto v = p.pairs[i].flatten();
    const auto n = noise[i].flatten();
    const std::size_t first = target == CorruptionTarget::CurrentOnly ? 4 : 0;
    for (std::size_t k = first; k < 8; ++k) v[k] = (1.0 - alpha) * v[k] + alpha * n[k];
    p.pairs[i] = PairedBox::unflatten(v);
  }
  return p;
}

}  // namespace dtrack
