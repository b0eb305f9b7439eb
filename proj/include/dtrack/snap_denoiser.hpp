#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dtrack/denoiser.hpp"
#include "dtrack/geometry.hpp"

namespace dtrack {

/// Runs the pipeline over external detections: each member of a row snaps to
/// the detection of its frame that overlaps it most.
class DetectionSnapDenoiser final : public Denoiser {
 public:
  /// assoc = iou_weight * iou(prev_det, cur_det) + (1 - iou_weight) * min(conf_prev, conf_cur)
  explicit DetectionSnapDenoiser(double iou_weight = 0.5) : iou_weight_(iou_weight) {}

  /// Index of the detection best overlapping `b`; ties go to the higher
  /// confidence, then the lower index. Falls back to the nearest centre when
  /// nothing overlaps.
  static std::size_t snap(const BBox& b, std::span<const Detection> dets) {
    std::size_t best_i = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const double s = iou(b, dets[i].box);
      if (s > best || (s == best && dets[i].conf > dets[best_i].conf)) {
        best = s;
        best_i = i;
      }
    }
    if (best > 0.0) return best_i;
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const double d = std::hypot(b.cx - dets[i].box.cx, b.cy - dets[i].box.cy);
      if (d < closest) {
        closest = d;
        best_i = i;
      }
    }
    return best_i;
  }

  double pairing_score(const Detection& prev, const Detection& cur) const {
    return iou_weight_ * iou(prev.box, cur.box) + (1.0 - iou_weight_) * std::min(prev.conf, cur.conf);
  }

  std::vector<Candidate> denoise(std::span<const PairedBox> noisy, int /*step*/,
                                 const FrameContext& ctx) const override {
    ctx.validate();
    const SignalSpace space = ctx.space();
    std::vector<Candidate> out;
    out.reserve(noisy.size());
    for (std::size_t r = 0; r < noisy.size(); ++r) {
      Candidate c;
      c.proposal_index = r;
      c.pair = noisy[r];
      if (ctx.det_prev.empty() || ctx.det_cur.empty()) {
        out.push_back(c);
        continue;
      }
      const PairedBox px = space.to_pixels(space.clamp(noisy[r]));
      const Detection dp = ctx.conditional ? Detection{px.prev, 1.0}
                                            : ctx.det_prev[snap(px.prev, ctx.det_prev)];
      const Detection dc = ctx.det_cur[snap(px.cur, ctx.det_cur)];
      if (!ctx.conditional) c.pair.prev = space.to_signal(dp.box);
      c.pair.cur = space.to_signal(dc.box);
      c.cls_prev = dp.conf;
      c.cls_cur = dc.conf;
      c.assoc = pairing_score(dp, dc);
      out.push_back(c);
    }
    return out;
  }

 private:
  double iou_weight_;
};

}  // namespace dtrack
