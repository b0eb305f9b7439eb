#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace dtrack {

/// Axis-aligned box in center form. Degenerate (zero-area) boxes are legal
/// and every overlap ratio involving them is 0.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x1() const { return cx - 0.5 * w; }
  double y1() const { return cy - 0.5 * h; }
  double x2() const { return cx + 0.5 * w; }
  double y2() const { return cy + 0.5 * h; }
  double area() const { return std::max(w, 0.0) * std::max(h, 0.0); }
  double diagonal() const { return std::hypot(w, h); }

  static BBox from_corners(double x1, double y1, double x2, double y2) {
    return {0.5 * (x1 + x2), 0.5 * (y1 + y2), x2 - x1, y2 - y1};
  }
  static BBox from_ltwh(double left, double top, double w, double h) {
    return {left + 0.5 * w, top + 0.5 * h, w, h};
  }

  bool contains(double x, double y) const {
    return x >= x1() && x <= x2() && y >= y1() && y <= y2();
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// The same object's boxes in two adjacent frames; one diffusion sample.
struct PairedBox {
  BBox prev;
  BBox cur;

  std::array<double, 8> flatten() const {
    return {prev.cx, prev.cy, prev.w, prev.h, cur.cx, cur.cy, cur.w, cur.h};
  }
  static PairedBox unflatten(const std::array<double, 8>& v) {
    return {{v[0], v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7]}};
  }
  const BBox& frame(std::size_t i) const { return i == 0 ? prev : cur; }

  friend bool operator==(const PairedBox&, const PairedBox&) = default;
};

namespace detail {

inline double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

inline double enclosing_area(const BBox& a, const BBox& b) {
  const double ew = std::max(a.x2(), b.x2()) - std::min(a.x1(), b.x1());
  const double eh = std::max(a.y2(), b.y2()) - std::min(a.y1(), b.y1());
  return std::max(ew, 0.0) * std::max(eh, 0.0);
}

struct AreaTerms {
  double inter = 0.0;
  double uni = 0.0;
  double hull = 0.0;
};

inline AreaTerms area_terms(const BBox& a, const BBox& b) {
  AreaTerms t;
  if (a.area() <= 0.0 || b.area() <= 0.0) return t;
  t.inter = intersection_area(a, b);
  t.uni = a.area() + b.area() - t.inter;
  t.hull = enclosing_area(a, b);
  return t;
}

}  // namespace detail

inline double iou(const BBox& a, const BBox& b) {
  const auto t = detail::area_terms(a, b);
  return t.uni > 0.0 ? t.inter / t.uni : 0.0;
}

inline double giou(const BBox& a, const BBox& b) {
  const auto t = detail::area_terms(a, b);
  if (t.uni <= 0.0 || t.hull <= 0.0) return 0.0;
  // the hull can round to just under the union when they coincide
  return t.inter / t.uni - std::max(t.hull - t.uni, 0.0) / t.hull;
}

/// Summed-intersection over summed-union across both frames of the pair.
inline double iou3d(const PairedBox& d, const PairedBox& g) {
  const auto p = detail::area_terms(d.prev, g.prev);
  const auto c = detail::area_terms(d.cur, g.cur);
  const double uni = p.uni + c.uni;
  return uni > 0.0 ? (p.inter + c.inter) / uni : 0.0;
}

/// Paired GIoU with a single absolute value around the summed hull-minus-union
/// difference, matching the published appendix formula.
inline double giou3d(const PairedBox& d, const PairedBox& g) {
  const auto p = detail::area_terms(d.prev, g.prev);
  const auto c = detail::area_terms(d.cur, g.cur);
  const double uni = p.uni + c.uni;
  const double hull = p.hull + c.hull;
  if (uni <= 0.0 || hull <= 0.0) return 0.0;
  const double overlap = (p.inter + c.inter) / uni;
  return overlap - std::abs(hull - uni) / std::abs(hull);
}

namespace detail {

// Greedy suppression shared by the 2D and paired variants. Ties in score are
// broken by the lower original index.
template <typename Item, typename Overlap>
std::vector<std::size_t> greedy_nms(std::span<const Item> items, std::span<const double> scores,
                                    double threshold, Overlap&& overlap) {
  if (items.size() != scores.size()) {
    throw std::invalid_argument("nms: items and scores differ in length");
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> kept;
  for (const std::size_t i : order) {
    bool suppressed = false;
    for (const std::size_t k : kept) {
      if (overlap(items[k], items[i]) > threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(i);
  }
  return kept;
}

}  // namespace detail

/// Kept indices in descending score order.
inline std::vector<std::size_t> nms2d(std::span<const BBox> boxes, std::span<const double> scores,
                                      double threshold) {
  return detail::greedy_nms(boxes, scores, threshold,
                            [](const BBox& a, const BBox& b) { return iou(a, b); });
}

inline std::vector<std::size_t> nms3d(std::span<const PairedBox> pairs,
                                      std::span<const double> assoc_scores, double threshold) {
  return detail::greedy_nms(pairs, assoc_scores, threshold,
                            [](const PairedBox& a, const PairedBox& b) { return iou3d(a, b); });
}

}  // namespace dtrack
