#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"
#include "dtrack/schedule.hpp"

namespace dtrack {

enum class MotionKind { Linear, NonLinear, Crowded };

inline std::string_view to_string(MotionKind m) {
  switch (m) {
    case MotionKind::Linear: return "linear";
    case MotionKind::NonLinear: return "nonlinear";
    case MotionKind::Crowded: return "crowded";
  }
  return "?";
}

inline MotionKind parse_motion(std::string_view s) {
  if (s == "linear") return MotionKind::Linear;
  if (s == "nonlinear") return MotionKind::NonLinear;
  if (s == "crowded") return MotionKind::Crowded;
  throw std::invalid_argument("unknown motion model: " + std::string(s));
}

/// Linear: constant velocity, reflecting at the image border.
/// NonLinear: figure-eight orbits around anchors; crossover pairs share an
///   anchor and run mirrored so they pass through each other twice per cycle.
/// Crowded: linear motion confined to a region sized so that the summed box
///   area covers `density` of it. A positive density also confines NonLinear
///   anchors.
struct SceneSpec {
  int n_objects = 8;
  int duration = 20;
  ImageSize image;
  MotionKind motion = MotionKind::Linear;
  double turn_rate = 0.12;       // orbit angular speed, rad / frame
  double crossover_rate = 0.5;   // fraction of objects in crossing pairs
  double density = 0.0;          // 0 = use the whole image
  double occlusion_rate = 0.0;   // per object, chance of one occlusion span
  double min_width = 80.0;
  double max_width = 160.0;
  double min_aspect = 1.5;       // height / width
  double max_aspect = 2.5;
  double min_speed = 2.0;        // px / frame (linear)
  double max_speed = 10.0;
  double orbit_radius = 120.0;   // px (non-linear)
  std::uint64_t seed = 0;

  double mean_area() const {
    const double w = 0.5 * (min_width + max_width);
    return w * w * 0.5 * (min_aspect + max_aspect);
  }

  void validate() const {
    for (const double r : {crossover_rate, occlusion_rate}) {
      if (r < 0.0 || r > 1.0) throw std::invalid_argument("SceneSpec: rate outside [0, 1]");
    }
    if (n_objects < 0) throw std::invalid_argument("SceneSpec: n_objects must be >= 0");
    if (duration < 2) throw std::invalid_argument("SceneSpec: duration must be >= 2");
    if (image.width <= 0.0 || image.height <= 0.0) throw std::invalid_argument("SceneSpec: empty image");
    if (min_width <= 0.0 || max_width < min_width || min_aspect <= 0.0 || max_aspect < min_aspect) {
      throw std::invalid_argument("SceneSpec: bad box-size range");
    }
    if (max_width > image.width || max_width * max_aspect > image.height) {
      throw std::invalid_argument("SceneSpec: boxes larger than the image");
    }
    if (min_speed < 0.0 || max_speed < min_speed) throw std::invalid_argument("SceneSpec: bad speed range");
    if (density < 0.0 || density > 1.0) throw std::invalid_argument("SceneSpec: density outside [0, 1]");
    if (motion == MotionKind::Crowded && density <= 0.0) {
      throw std::invalid_argument("SceneSpec: crowded motion needs a positive density");
    }
  }
};

namespace detail {

/// Axis-aligned region (pixel corners) the object centres live in.
struct Region {
  double x1, y1, x2, y2;
};

inline Region scene_region(const SceneSpec& spec) {
  const Region full{0.0, 0.0, spec.image.width, spec.image.height};
  if (spec.density <= 0.0 || spec.n_objects == 0) return full;
  const double area = spec.n_objects * spec.mean_area() / spec.density;
  const double image_area = spec.image.width * spec.image.height;
  if (area >= image_area) return full;
  // Same aspect as the image.
  const double k = std::sqrt(area / image_area);
  const double w = spec.image.width * k;
  const double h = spec.image.height * k;
  if (w < spec.max_width || h < spec.max_width * spec.max_aspect) {
    throw std::invalid_argument("SceneSpec: density too high, boxes cannot fit in the region");
  }
  const double cx = spec.image.width / 2, cy = spec.image.height / 2;
  return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

// Reflects a 1D position into [lo, hi], flipping the velocity on each bounce.
inline void reflect(double& p, double& v, double lo, double hi) {
  if (hi <= lo) {
    p = lo;
    return;
  }
  for (int guard = 0; guard < 64 && (p < lo || p > hi); ++guard) {
    if (p < lo) {
      p = 2 * lo - p;
      v = -v;
    } else {
      p = 2 * hi - p;
      v = -v;
    }
  }
  p = std::clamp(p, lo, hi);
}

inline BBox keep_inside(BBox b, const ImageSize& image) {
  b.cx = std::clamp(b.cx, b.w / 2, image.width - b.w / 2);
  b.cy = std::clamp(b.cy, b.h / 2, image.height - b.h / 2);
  return b;
}

}  // namespace detail

/// Deterministic in the seed.
inline SceneGroundTruth generate(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const detail::Region region = detail::scene_region(spec);
  const auto n = static_cast<std::size_t>(spec.n_objects);
  const auto frames = static_cast<std::size_t>(spec.duration);

  SceneGroundTruth scene;
  scene.image = spec.image;
  scene.frames.assign(frames, {});

  std::vector<double> widths(n), heights(n);
  for (std::size_t i = 0; i < n; ++i) {
    widths[i] = uniform(spec.min_width, spec.max_width);
    heights[i] = widths[i] * uniform(spec.min_aspect, spec.max_aspect);
  }

  // centres[i][k]
  std::vector<std::vector<std::pair<double, double>>> centres(n, std::vector<std::pair<double, double>>(frames));
  if (spec.motion == MotionKind::NonLinear) {
    const std::size_t crossing = 2 * static_cast<std::size_t>(std::floor(spec.crossover_rate * n / 2.0));
    std::size_t i = 0;
    while (i < n) {
      const bool pair = i + 2 <= crossing;
      const double rx = spec.orbit_radius * uniform(0.8, 1.2);
      const double ry = 0.5 * spec.orbit_radius * uniform(0.8, 1.2);
      const double margin_x = rx + spec.max_width / 2;
      const double margin_y = ry + spec.max_width * spec.max_aspect / 2;
      const double ax = uniform(std::min(region.x1 + margin_x, spec.image.width / 2),
                                std::max(region.x2 - margin_x, spec.image.width / 2));
      const double ay = uniform(std::min(region.y1 + margin_y, spec.image.height / 2),
                                std::max(region.y2 - margin_y, spec.image.height / 2));
      const double rate = spec.turn_rate * uniform(0.8, 1.2);
      const double phase = uniform(0.0, 2 * std::numbers::pi);
      const int members = pair ? 2 : 1;
      for (int m = 0; m < members; ++m) {
        const double mirror = m == 0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < frames; ++k) {
          const double a = rate * static_cast<double>(k) + phase;
          centres[i][k] = {ax + mirror * rx * std::sin(a), ay + ry * std::sin(2 * a)};
        }
        ++i;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double hw = widths[i] / 2, hh = heights[i] / 2;
      const double lo_x = std::max(region.x1, hw), hi_x = std::min(region.x2, spec.image.width - hw);
      const double lo_y = std::max(region.y1, hh), hi_y = std::min(region.y2, spec.image.height - hh);
      double x = uniform(lo_x, hi_x), y = uniform(lo_y, hi_y);
      const double speed = uniform(spec.min_speed, spec.max_speed);
      const double heading = uniform(0.0, 2 * std::numbers::pi);
      double vx = speed * std::cos(heading), vy = speed * std::sin(heading);
      for (std::size_t k = 0; k < frames; ++k) {
        centres[i][k] = {x, y};
        x += vx;
        y += vy;
        detail::reflect(x, vx, lo_x, hi_x);
        detail::reflect(y, vy, lo_y, hi_y);
      }
    }
  }

  std::vector<std::vector<char>> visible(n, std::vector<char>(frames, 1));
  if (spec.occlusion_rate > 0.0 && frames > 2) {
    for (std::size_t i = 0; i < n; ++i) {
      if (unit(rng) >= spec.occlusion_rate) continue;
      const auto len = static_cast<std::size_t>(1 + std::min<std::size_t>(rng() % 3, frames - 2));
      const std::size_t start = 1 + static_cast<std::size_t>(rng() % (frames - len));
      for (std::size_t k = start; k < std::min(frames, start + len); ++k) visible[i][k] = 0;
    }
  }

  for (std::size_t k = 0; k < frames; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const BBox b = detail::keep_inside({centres[i][k].first, centres[i][k].second, widths[i], heights[i]}, spec.image);
      scene.frames[k].push_back({static_cast<int>(i) + 1, b, visible[i][k] != 0});
    }
  }
  return scene;
}

namespace detail {

inline BBox to_unit(const BBox& b, const ImageSize& im) {
  return {b.cx / im.width, b.cy / im.height, b.w / im.width, b.h / im.height};
}
inline BBox from_unit(const BBox& b, const ImageSize& im) {
  return {b.cx * im.width, b.cy * im.height, b.w * im.width, b.h * im.height};
}

}  // namespace detail

/// B <- (1 - alpha) B + alpha * B_noise per coordinate in [0, 1]-normalised
/// image space, with B_noise drawn from N(B, noise_std^2). Widths and heights
/// are kept positive.
inline std::vector<std::vector<BBox>> perturb_detections(const std::vector<std::vector<BBox>>& frames, double alpha,
                                                         const ImageSize& image, Rng& rng,
                                                         double noise_std = 0.03) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("perturb_detections: alpha outside [0, 1]");
  std::normal_distribution<double> normal(0.0, noise_std);
  std::vector<std::vector<BBox>> out = frames;
  for (auto& frame : out) {
    for (auto& box : frame) {
      const BBox u = detail::to_unit(box, image);
      const BBox noise{u.cx + normal(rng), u.cy + normal(rng), u.w + normal(rng), u.h + normal(rng)};
      if (alpha == 0.0) continue;
      BBox mixed{(1 - alpha) * u.cx + alpha * noise.cx, (1 - alpha) * u.cy + alpha * noise.cy,
                 (1 - alpha) * u.w + alpha * noise.w, (1 - alpha) * u.h + alpha * noise.h};
      mixed.w = std::max(mixed.w, 1e-3);
      mixed.h = std::max(mixed.h, 1e-3);
      box = detail::from_unit(mixed, image);
    }
  }
  return out;
}

/// Mean centre displacement between two identity-labelled frames over the
/// identities visible in both, each normalised by the earlier box diagonal,
/// clamped to [0, 1]. Zero when nothing is co-visible.
template <typename Row, typename Visible>
double mean_identity_motion(const std::vector<Row>& before, const std::vector<Row>& after, Visible&& visible) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& a : before) {
    if (!visible(a)) continue;
    for (const auto& b : after) {
      if (b.id != a.id || !visible(b)) continue;
      const double diag = a.box.diagonal();
      if (diag <= 0.0) continue;
      sum += std::hypot(b.box.cx - a.box.cx, b.box.cy - a.box.cy) / diag;
      ++count;
      break;
    }
  }
  return count == 0 ? 0.0 : std::clamp(sum / static_cast<double>(count), 0.0, 1.0);
}

/// Motion between frames k - 1 and k of a scene.
inline double average_motion(const SceneGroundTruth& gt, std::size_t k) {
  if (k == 0 || k >= gt.frames.size()) throw std::out_of_range("average_motion: frames k-1 and k must exist");
  return mean_identity_motion(gt.frames[k - 1], gt.frames[k], [](const GtEntry& e) { return e.visible; });
}

}  // namespace dtrack
