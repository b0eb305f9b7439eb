#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dtrack/assignment.hpp"
#include "dtrack/denoiser.hpp"
#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"

namespace dtrack {

/// Term weights (classification, L1 regression, paired GIoU).
struct LossWeights {
  double cls = 2.0;
  double reg = 5.0;
  double giou = 2.0;
};

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
  double eps = 1e-8;
};

/// Ground-truth paired box with per-frame class labels (1 = object present).
struct LabeledPair {
  PairedBox pair;
  int label_prev = 1;
  int label_cur = 1;
};

struct LossBreakdown {
  double cls = 0.0;
  double reg = 0.0;
  double giou_term = 0.0;
  double total = 0.0;
  std::size_t num_pos = 0;
};

/// Sigmoid focal loss on a probability. p is clamped to [eps, 1 - eps].
inline double focal_loss(double p, int y, const FocalParams& fp = {}) {
  const double q = std::clamp(p, fp.eps, 1.0 - fp.eps);
  if (y == 1) return -fp.alpha * std::pow(1.0 - q, fp.gamma) * std::log(q);
  return -(1.0 - fp.alpha) * std::pow(q, fp.gamma) * std::log(1.0 - q);
}

/// Fused per-frame probability sqrt(C^i * S).
inline double fused_score(double cls, double assoc) { return std::sqrt(std::max(cls, 0.0) * std::max(assoc, 0.0)); }

/// Sum over four coordinates of |a - b|, each normalised by the matching
/// image dimension.
inline double normalized_l1(const BBox& a, const BBox& b, const ImageSize& image) {
  return std::abs(a.cx - b.cx) / image.width + std::abs(a.cy - b.cy) / image.height +
         std::abs(a.w - b.w) / image.width + std::abs(a.h - b.h) / image.height;
}

inline double pair_l1(const PairedBox& a, const PairedBox& b, const ImageSize& image) {
  return normalized_l1(a.prev, b.prev, image) + normalized_l1(a.cur, b.cur, image);
}

/// DETR-style matching cost mirroring the loss terms: focal classification
/// cost (positive minus negative branch, averaged over frames), L1, and
/// 1 - GIoU3D. Lower is better.
inline double match_cost(const Candidate& pred, const LabeledPair& gt, const ImageSize& image,
                         const LossWeights& w = {}, const FocalParams& fp = {}) {
  double cls_cost = 0.0;
  const double scores[2] = {fused_score(pred.cls_prev, pred.assoc), fused_score(pred.cls_cur, pred.assoc)};
  const int labels[2] = {gt.label_prev, gt.label_cur};
  for (int i = 0; i < 2; ++i) {
    const double pos = focal_loss(scores[i], 1, fp);
    const double neg = focal_loss(scores[i], 0, fp);
    cls_cost += labels[i] == 1 ? pos - neg : neg - pos;
  }
  cls_cost *= 0.5;
  return w.cls * cls_cost + w.reg * pair_l1(pred.pair, gt.pair, image) + w.giou * (1.0 - giou3d(pred.pair, gt.pair));
}

/// Forward evaluation of the paired detection objective. Predictions are
/// matched to ground truth by optimal assignment on match_cost; matched pairs
/// contribute all three terms, unmatched predictions contribute background
/// focal terms. The weighted sum is divided by the positive count (at least 1).
inline LossBreakdown detection_loss(std::span<const Candidate> preds, std::span<const LabeledPair> gts,
                                    const ImageSize& image, const LossWeights& w = {}, const FocalParams& fp = {}) {
  LossBreakdown out;
  CostMatrix cost(preds.size(), gts.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) cost(i, j) = match_cost(preds[i], gts[j], image, w, fp);
  }
  const MatchSet match = hungarian(cost);
  // Terms are summed in sorted order so the result does not depend on the
  // order of either input list.
  std::vector<double> cls_terms, reg_terms, giou_terms;
  for (const auto& [i, j] : match.pairs) {
    const Candidate& p = preds[i];
    const LabeledPair& g = gts[j];
    cls_terms.push_back(focal_loss(fused_score(p.cls_prev, p.assoc), g.label_prev, fp));
    cls_terms.push_back(focal_loss(fused_score(p.cls_cur, p.assoc), g.label_cur, fp));
    reg_terms.push_back(pair_l1(p.pair, g.pair, image));
    giou_terms.push_back(1.0 - giou3d(p.pair, g.pair));
  }
  for (const std::size_t i : match.unmatched_rows) {
    const Candidate& p = preds[i];
    cls_terms.push_back(focal_loss(fused_score(p.cls_prev, p.assoc), 0, fp));
    cls_terms.push_back(focal_loss(fused_score(p.cls_cur, p.assoc), 0, fp));
  }
  auto sorted_sum = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (const double x : v) s += x;
    return s;
  };
  out.cls = sorted_sum(cls_terms);
  out.reg = sorted_sum(reg_terms);
  out.giou_term = sorted_sum(giou_terms);
  out.num_pos = match.pairs.size();
  const double n_pos = static_cast<double>(std::max<std::size_t>(out.num_pos, 1));
  out.total = (w.cls * out.cls + w.reg * out.reg + w.giou * out.giou_term) / n_pos;
  return out;
}

}  // namespace dtrack
