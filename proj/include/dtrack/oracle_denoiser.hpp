#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dtrack/assignment.hpp"
#include "dtrack/denoiser.hpp"
#include "dtrack/geometry.hpp"

namespace dtrack {

/// Knobs of the ground-truth oracle. The score model is test instrumentation
/// standing in for a trained head, not something a network is known to do.
struct OracleConfig {
  double fidelity = 1.0;               // emitted = GT + (1 - fidelity) * clipped(input - GT)
  double residual_clip = 0.5;          // residual bound per coordinate, in GT box widths / heights
  double near_iou_floor = 0.1;         // rows below this (and centred outside every GT) are "far"
  double far_score = 0.1;              // assoc / cls ceiling for far rows; below tau_conf
  double missing_member_factor = 0.5;  // assoc multiplier when the GT is absent in one frame
  double absent_cls = 0.05;            // class score for a frame where the GT is absent
  bool set_coverage = true;            // every GT claimed by at least one row (joint mode)
};

namespace detail {

/// Ground-truth pair with per-frame presence.
struct OraclePair {
  int id = 0;
  std::optional<BBox> prev;
  std::optional<BBox> cur;
};

inline std::vector<OraclePair> oracle_pairs(const FrameContext& ctx) {
  std::vector<OraclePair> pairs;
  auto find = [&](int id) -> OraclePair& {
    for (auto& p : pairs) {
      if (p.id == id) return p;
    }
    pairs.push_back({id, std::nullopt, std::nullopt});
    return pairs.back();
  };
  for (const auto& e : ctx.gt_prev) {
    if (e.visible) find(e.id).prev = e.box;
  }
  for (const auto& e : ctx.gt_cur) {
    if (e.visible) find(e.id).cur = e.box;
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return pairs;
}

/// iou3d restricted to the frames where the ground truth is present.
inline double partial_iou3d(const PairedBox& row, const OraclePair& g) {
  double inter = 0.0, uni = 0.0;
  auto add = [&](const BBox& r, const std::optional<BBox>& b) {
    if (!b) return;
    const auto t = area_terms(r, *b);
    inter += t.inter;
    uni += t.uni;
  };
  add(row.prev, g.prev);
  add(row.cur, g.cur);
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double center_distance(const PairedBox& row, const OraclePair& g) {
  double d = 0.0;
  if (g.prev) d += std::hypot(row.prev.cx - g.prev->cx, row.prev.cy - g.prev->cy);
  if (g.cur) d += std::hypot(row.cur.cx - g.cur->cx, row.cur.cy - g.cur->cy);
  return d;
}

inline bool center_inside_any(const BBox& b, std::span<const GtEntry> gt) {
  return std::any_of(gt.begin(), gt.end(),
                     [&](const GtEntry& e) { return e.visible && e.box.contains(b.cx, b.cy); });
}

// Pixel-space target plus the leftover (1 - fidelity) share of the input's
// residual, bounded relative to the target size.
inline BBox blend(const BBox& target, const BBox& input, double fidelity, double clip) {
  auto mix = [&](double t, double in, double dim) {
    const double bound = clip * dim;
    return t + (1.0 - fidelity) * std::clamp(in - t, -bound, bound);
  };
  return {mix(target.cx, input.cx, target.w), mix(target.cy, input.cy, target.h), mix(target.w, input.w, target.w),
          mix(target.h, input.h, target.h)};
}

}  // namespace detail

/// Snaps each noisy row to the ground-truth pair that best overlaps it and
/// blends toward it with the configured fidelity.
class OracleDenoiser final : public Denoiser {
 public:
  explicit OracleDenoiser(OracleConfig cfg = {}) : cfg_(cfg) {}

  const OracleConfig& config() const { return cfg_; }

  std::vector<Candidate> denoise(std::span<const PairedBox> noisy, int /*step*/,
                                 const FrameContext& ctx) const override {
    ctx.validate();
    return ctx.conditional ? conditional(noisy, ctx) : joint(noisy, ctx);
  }

 private:
  double score_scale() const { return 0.5 + 0.5 * cfg_.fidelity; }

  std::vector<Candidate> unmatched(std::span<const PairedBox> noisy) const {
    std::vector<Candidate> out;
    out.reserve(noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      out.push_back({noisy[i], 0.0, 0.0, cfg_.far_score, i});
    }
    return out;
  }

  std::vector<Candidate> joint(std::span<const PairedBox> noisy, const FrameContext& ctx) const {
    const auto gts = detail::oracle_pairs(ctx);
    if (gts.empty()) return unmatched(noisy);
    const SignalSpace space = ctx.space();
    const std::size_t n = noisy.size();

    std::vector<PairedBox> rows(n);
    std::vector<std::size_t> target(n, 0);
    std::vector<double> best_score(n, 0.0);
    std::vector<char> near(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
      rows[r] = space.to_pixels(space.clamp(noisy[r]));
      double best = -1.0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        const double s = detail::partial_iou3d(rows[r], gts[g]);
        if (s > best) {
          best = s;
          target[r] = g;
        }
      }
      if (best <= 0.0) {
        double closest = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < gts.size(); ++g) {
          const double d = detail::center_distance(rows[r], gts[g]);
          if (d < closest) {
            closest = d;
            target[r] = g;
          }
        }
      }
      best_score[r] = std::max(best, 0.0);
      near[r] = best_score[r] >= cfg_.near_iou_floor ||
                detail::center_inside_any(rows[r].prev, ctx.gt_prev) ||
                detail::center_inside_any(rows[r].cur, ctx.gt_cur);
    }

    if (cfg_.set_coverage) cover_unclaimed(rows, gts, target, best_score, near, ctx);

    std::vector<Candidate> out;
    out.reserve(n);
    const double scale = score_scale();
    for (std::size_t r = 0; r < n; ++r) {
      const auto& g = gts[target[r]];
      const bool gp = g.prev.has_value(), gc = g.cur.has_value();
      PairedBox ep = rows[r];
      if (gp) ep.prev = detail::blend(*g.prev, rows[r].prev, cfg_.fidelity, cfg_.residual_clip);
      if (gc) ep.cur = detail::blend(*g.cur, rows[r].cur, cfg_.fidelity, cfg_.residual_clip);
      if (!gp) ep.prev = ep.cur;
      if (!gc) ep.cur = ep.prev;
      // one image, one box: both members must agree
      if (ctx.detection_mode()) ep.prev = ep.cur;
      const PairedBox e = space.to_signal(ep);

      const double quality = detail::partial_iou3d(ep, g);
      Candidate c;
      c.pair = e;
      c.proposal_index = r;
      c.assoc = scale * quality * ((gp && gc) ? 1.0 : cfg_.missing_member_factor);
      c.cls_prev = g.prev ? scale * iou(ep.prev, *g.prev) : cfg_.absent_cls;
      c.cls_cur = g.cur ? scale * iou(ep.cur, *g.cur) : cfg_.absent_cls;
      if (!near[r]) {
        c.assoc = std::min(c.assoc, cfg_.far_score);
        c.cls_prev = std::min(c.cls_prev, cfg_.far_score);
        c.cls_cur = std::min(c.cls_cur, cfg_.far_score);
      }
      out.push_back(c);
    }
    return out;
  }

  // Set-prediction behaviour: a ground truth that no near row claims takes the
  // closest spare row (far rows first, then surplus duplicates) by optimal
  // assignment on centre distance.
  void cover_unclaimed(std::span<const PairedBox> rows, const std::vector<detail::OraclePair>& gts,
                       std::vector<std::size_t>& target, const std::vector<double>& best_score,
                       std::vector<char>& near, const FrameContext& ctx) const {
    const std::size_t n = rows.size();
    std::vector<long> top_claimant(gts.size(), -1);
    for (std::size_t r = 0; r < n; ++r) {
      if (!near[r]) continue;
      long& t = top_claimant[target[r]];
      if (t < 0 || best_score[r] > best_score[static_cast<std::size_t>(t)]) t = static_cast<long>(r);
    }
    std::vector<std::size_t> unclaimed;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (top_claimant[g] < 0) unclaimed.push_back(g);
    }
    if (unclaimed.empty()) return;

    std::vector<std::size_t> spare;
    for (std::size_t r = 0; r < n; ++r) {
      if (!near[r]) spare.push_back(r);
    }
    if (spare.size() < unclaimed.size()) {
      for (std::size_t r = 0; r < n; ++r) {
        if (near[r] && top_claimant[target[r]] != static_cast<long>(r)) spare.push_back(r);
      }
    }
    if (spare.empty()) return;

    const double diag = std::hypot(ctx.image.width, ctx.image.height);
    CostMatrix cost(spare.size(), unclaimed.size());
    for (std::size_t i = 0; i < spare.size(); ++i) {
      for (std::size_t j = 0; j < unclaimed.size(); ++j) {
        cost(i, j) = detail::center_distance(rows[spare[i]], gts[unclaimed[j]]) / diag;
      }
    }
    for (const auto& [i, j] : hungarian(cost).pairs) {
      target[spare[i]] = unclaimed[j];
      near[spare[i]] = 1;
    }
  }

  std::vector<Candidate> conditional(std::span<const PairedBox> noisy, const FrameContext& ctx) const {
    std::vector<BBox> gt_cur;
    for (const auto& e : ctx.gt_cur) {
      if (e.visible) gt_cur.push_back(e.box);
    }
    if (gt_cur.empty()) return unmatched(noisy);
    const SignalSpace space = ctx.space();
    const double scale = score_scale();
    std::vector<Candidate> out;
    out.reserve(noisy.size());
    for (std::size_t r = 0; r < noisy.size(); ++r) {
      const BBox cur = space.to_pixels(space.clamp(noisy[r].cur));
      std::size_t best_g = 0;
      double best = -1.0;
      for (std::size_t g = 0; g < gt_cur.size(); ++g) {
        const double s = iou(cur, gt_cur[g]);
        if (s > best) {
          best = s;
          best_g = g;
        }
      }
      if (best <= 0.0) {
        double closest = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < gt_cur.size(); ++g) {
          const double d = std::hypot(cur.cx - gt_cur[g].cx, cur.cy - gt_cur[g].cy);
          if (d < closest) {
            closest = d;
            best_g = g;
          }
        }
      }
      const bool is_near = best >= cfg_.near_iou_floor ||
                           std::any_of(gt_cur.begin(), gt_cur.end(),
                                       [&](const BBox& b) { return b.contains(cur.cx, cur.cy); });
      Candidate c;
      c.proposal_index = r;
      c.pair.prev = noisy[r].prev;
      const BBox snapped = detail::blend(gt_cur[best_g], cur, cfg_.fidelity, cfg_.residual_clip);
      c.pair.cur = space.to_signal(snapped);
      const double quality = iou(snapped, gt_cur[best_g]);
      c.cls_prev = scale;
      c.cls_cur = scale * quality;
      c.assoc = scale * quality;
      if (!is_near) {
        c.assoc = std::min(c.assoc, cfg_.far_score);
        c.cls_cur = std::min(c.cls_cur, cfg_.far_score);
      }
      out.push_back(c);
    }
    return out;
  }

  OracleConfig cfg_;
};

}  // namespace dtrack
