#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtrack/ddim.hpp"
#include "dtrack/denoiser.hpp"
#include "dtrack/geometry.hpp"
#include "dtrack/proposals.hpp"
#include "dtrack/scene.hpp"
#include "dtrack/schedule.hpp"
#include "dtrack/simulator.hpp"
#include "dtrack/tracker.hpp"

namespace dtrack {

enum class Variant { Diffusion, Baseline };

inline std::string_view to_string(Variant v) { return v == Variant::Diffusion ? "diffusion" : "baseline"; }

inline Variant parse_variant(std::string_view s) {
  if (s == "diffusion") return Variant::Diffusion;
  if (s == "baseline") return Variant::Baseline;
  throw std::invalid_argument("unknown variant: " + std::string(s));
}

struct PipelineConfig {
  std::size_t n_test = 800;
  int steps = 1;
  double proportion = 0.25;
  PaddingStrategy padding = PaddingStrategy::CatGaussian;
  PerturbationSchedule perturbation = PerturbationSchedule::Linear;
  int diffusion_steps = 1000;
  NoiseForm noise_form = NoiseForm::AsPrinted;
  double signal_scale = 2.0;
  TrackerConfig tracker;
  Variant variant = Variant::Diffusion;
  double first_motion = 0.25;      // motion fraction assumed for the first pair
  // Prior-box perturbation (robustness experiments); zero disables it.
  double prior_noise_alpha = 0.0;
  double prior_noise_std = 0.03;
  std::uint64_t seed = 0;
  // Optional per-frame adjustment, called with the current frame index on a
  // copy of the config.
  std::function<void(int, PipelineConfig&)> per_frame;

  void validate() const {
    if (n_test < 1) throw std::invalid_argument("PipelineConfig: n_test must be >= 1");
    if (steps < 1) throw std::invalid_argument("PipelineConfig: steps must be >= 1");
    if (proportion < 0.0 || proportion > 1.0) throw std::invalid_argument("PipelineConfig: proportion outside [0, 1]");
    if (diffusion_steps < 1) throw std::invalid_argument("PipelineConfig: diffusion_steps must be >= 1");
    if (prior_noise_alpha < 0.0 || prior_noise_alpha > 1.0) {
      throw std::invalid_argument("PipelineConfig: prior_noise_alpha outside [0, 1]");
    }
    tracker.validate();
  }
};

struct PairOutput {
  std::vector<Candidate> candidates;  // pixel space, gated, ordered by proposal index
  std::size_t n_assoc = 0;
  int timestep = 0;
  double corruption = 0.0;
};

namespace detail {

inline std::vector<Candidate> gate_candidates(std::vector<Candidate> cands, const TrackerConfig& tc) {
  std::erase_if(cands, [&](const Candidate& c) { return !(c.assoc > tc.tau_conf); });

  std::vector<PairedBox> pairs;
  std::vector<double> scores;
  for (const auto& c : cands) {
    pairs.push_back(c.pair);
    scores.push_back(c.assoc);
  }
  std::vector<Candidate> kept;
  for (const std::size_t i : nms3d(pairs, scores, tc.tau_nms3d)) {
    if (cands[i].cls_cur > tc.tau_det) kept.push_back(cands[i]);
  }

  std::vector<BBox> boxes;
  std::vector<double> cls;
  for (const auto& c : kept) {
    boxes.push_back(c.pair.cur);
    cls.push_back(c.cls_cur);
  }
  std::vector<Candidate> out;
  for (const std::size_t i : nms2d(boxes, cls, tc.tau_nms2d)) out.push_back(kept[i]);
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.proposal_index < b.proposal_index; });
  return out;
}

}  // namespace detail

/// One frame pair: proposals from the priors, corruption, refinement and
/// gating. `motion` is the average motion fraction feeding the perturbation
/// schedule.
inline PairOutput run_pair(const FrameContext& ctx_in, std::span<const BBox> priors, const PipelineConfig& cfg,
                           const Denoiser& denoiser, const NoiseSchedule& sched, double motion, Rng& rng) {
  cfg.validate();
  FrameContext ctx = ctx_in;
  ctx.signal_scale = cfg.signal_scale;
  const SignalSpace space = ctx.space();

  const bool baseline = cfg.variant == Variant::Baseline && !priors.empty();
  ProposalSet proposals =
      baseline ? build_inference_proposals(priors, cfg.n_test, 1.0, PaddingStrategy::Repeat, space, rng)
               : build_inference_proposals(priors, cfg.n_test, cfg.proportion, cfg.padding, space, rng);

  PairOutput out;
  out.timestep = std::min(perturbation_timestep(motion, cfg.perturbation, sched.steps()), sched.steps());
  out.corruption = corruption_weight(sched, out.timestep);
  proposals.timestep = out.timestep;
  const std::vector<PairedBox> noise = gaussian_pairs(proposals.size(), rng);
  proposals = corrupt_proposals(std::move(proposals), out.corruption, noise,
                                baseline ? CorruptionTarget::CurrentOnly : CorruptionTarget::BothFrames);
  out.n_assoc = proposals.n_prior;

  ctx.conditional = baseline;
  const int steps = baseline ? 1 : cfg.steps;
  out.candidates = detail::gate_candidates(ddim_refine(proposals, steps, denoiser, ctx, sched, cfg.noise_form),
                                           cfg.tracker);
  return out;
}

struct SequenceOutput {
  TrackingResult result;
  std::vector<PairOutput> pairs;  // one per frame, the first in detection mode
};

/// Runs the tracker over a sequence. `make_context(prev, cur)` supplies what
/// the denoiser sees for a frame pair. Frame 0 is handled in detection mode
/// (prev == cur, no priors).
inline SequenceOutput run_sequence(std::size_t num_frames, const ImageSize& image,
                                   const std::function<FrameContext(int, int)>& make_context,
                                   const PipelineConfig& base, const Denoiser& denoiser) {
  base.validate();
  if (num_frames < 2) throw std::invalid_argument("run_sequence: need at least two frames");
  Rng rng(base.seed);
  Tracker tracker(base.tracker);
  SequenceOutput out;
  std::vector<TrackedBox> previous_rows;
  double motion = base.first_motion;

  for (std::size_t k = 0; k < num_frames; ++k) {
    PipelineConfig cfg = base;
    if (base.per_frame) {
      base.per_frame(static_cast<int>(k), cfg);
      cfg.validate();
    }
    const NoiseSchedule sched = cosine_schedule(cfg.diffusion_steps);
    const int cur = static_cast<int>(k);
    const int prev = k == 0 ? cur : cur - 1;
    FrameContext ctx = make_context(prev, cur);
    ctx.image = image;

    std::vector<BBox> priors = tracker.prior_boxes();
    if (cfg.prior_noise_alpha > 0.0 && !priors.empty()) {
      priors = perturb_detections({priors}, cfg.prior_noise_alpha, image, rng, cfg.prior_noise_std).front();
    }
    PairOutput pair = run_pair(ctx, priors, cfg, denoiser, sched, motion, rng);
    std::vector<TrackedBox> rows = tracker.step(pair.candidates, cur, pair.n_assoc);
    // Motion seen by the tracker drives the next pair's corruption.
    if (k > 0 && !previous_rows.empty() && !rows.empty()) {
      motion = mean_identity_motion(previous_rows, rows, [](const TrackedBox&) { return true; });
    }
    previous_rows = rows;
    out.result.frames.push_back(std::move(rows));
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

/// Ground-truth scene driving an oracle-style denoiser.
inline SequenceOutput run_sequence(const SceneGroundTruth& scene, const PipelineConfig& cfg, const Denoiser& denoiser) {
  return run_sequence(
      scene.num_frames(), scene.image,
      [&](int prev, int cur) {
        FrameContext ctx;
        ctx.frame_prev = prev;
        ctx.frame_cur = cur;
        ctx.gt_prev = scene.frames[static_cast<std::size_t>(prev)];
        ctx.gt_cur = scene.frames[static_cast<std::size_t>(cur)];
        return ctx;
      },
      cfg, denoiser);
}

/// External detections driving a detection-snapping denoiser.
inline SequenceOutput run_sequence(const DetectionStream& stream, const PipelineConfig& cfg, const Denoiser& denoiser) {
  return run_sequence(
      stream.frames.size(), stream.image,
      [&](int prev, int cur) {
        FrameContext ctx;
        ctx.frame_prev = prev;
        ctx.frame_cur = cur;
        ctx.det_prev = stream.frames[static_cast<std::size_t>(prev)];
        ctx.det_cur = stream.frames[static_cast<std::size_t>(cur)];
        return ctx;
      },
      cfg, denoiser);
}

}  // namespace dtrack
