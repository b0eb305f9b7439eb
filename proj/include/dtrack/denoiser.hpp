#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"
#include "dtrack/signal_space.hpp"

namespace dtrack {

/// A denoised paired box. Denoisers emit `pair` in signal space; the
/// refinement loop converts its final output to pixels.
struct Candidate {
  PairedBox pair;
  double cls_prev = 0.0;
  double cls_cur = 0.0;
  double assoc = 0.0;
  std::size_t proposal_index = 0;
};

/// What a concrete denoiser may look at besides the noisy boxes. Detection
/// mode is frame_prev == frame_cur with identical per-frame data.
struct FrameContext {
  int frame_prev = 0;
  int frame_cur = 1;
  ImageSize image;
  double signal_scale = 2.0;
  std::vector<GtEntry> gt_prev;
  std::vector<GtEntry> gt_cur;
  std::vector<Detection> det_prev;
  std::vector<Detection> det_cur;
  /// Conditional refinement: the prev member is a given prior and only the
  /// cur member is denoised.
  bool conditional = false;

  SignalSpace space() const { return {image, signal_scale}; }
  bool detection_mode() const { return frame_prev == frame_cur; }

  void validate() const {
    if (frame_prev != frame_cur && frame_prev != frame_cur - 1) {
      throw std::invalid_argument("FrameContext: frames must be adjacent or identical");
    }
  }
};

/// f(z_s, s, X_{t-1}, X_t): predicts clean paired boxes plus per-frame class
/// scores and an association score. One candidate per input row, in order.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::vector<Candidate> denoise(std::span<const PairedBox> noisy, int step,
                                         const FrameContext& ctx) const = 0;
};

/// Returns its input with all scores at 1.
class IdentityDenoiser final : public Denoiser {
 public:
  std::vector<Candidate> denoise(std::span<const PairedBox> noisy, int /*step*/,
                                 const FrameContext& /*ctx*/) const override {
    std::vector<Candidate> out;
    out.reserve(noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) out.push_back({noisy[i], 1.0, 1.0, 1.0, i});
    return out;
  }
};

/// Returns the same prediction whatever the input; used to check that the
/// refinement loop has that prediction as a fixed point.
class ConstantDenoiser final : public Denoiser {
 public:
  explicit ConstantDenoiser(PairedBox value) : value_(value) {}

  std::vector<Candidate> denoise(std::span<const PairedBox> noisy, int, const FrameContext&) const override {
    std::vector<Candidate> out;
    out.reserve(noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) out.push_back({value_, 1.0, 1.0, 1.0, i});
    return out;
  }

 private:
  PairedBox value_;
};

}  // namespace dtrack
