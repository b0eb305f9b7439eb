#pragma once

#include <algorithm>

#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"

namespace dtrack {

/// Maps pixel boxes into the diffusion signal range [-scale, scale]: each
/// coordinate is divided by the matching image dimension, then sent through
/// (2n - 1) * scale.
struct SignalSpace {
  ImageSize image;
  double scale = 2.0;

  BBox to_signal(const BBox& b) const {
    return {enc(b.cx, image.width), enc(b.cy, image.height), enc(b.w, image.width),
            enc(b.h, image.height)};
  }

  BBox to_pixels(const BBox& s) const {
    return {dec(s.cx, image.width), dec(s.cy, image.height),
            std::max(dec(s.w, image.width), 0.0), std::max(dec(s.h, image.height), 0.0)};
  }

  PairedBox to_signal(const PairedBox& p) const { return {to_signal(p.prev), to_signal(p.cur)}; }
  PairedBox to_pixels(const PairedBox& p) const { return {to_pixels(p.prev), to_pixels(p.cur)}; }

  double clamp(double v) const { return std::clamp(v, -scale, scale); }

  BBox clamp(const BBox& s) const { return {clamp(s.cx), clamp(s.cy), clamp(s.w), clamp(s.h)}; }
  PairedBox clamp(const PairedBox& p) const { return {clamp(p.prev), clamp(p.cur)}; }

  /// Signal-space box whose pixel form covers the whole image.
  BBox full_image() const { return to_signal(BBox{image.width / 2, image.height / 2, image.width, image.height}); }

 private:
  double enc(double v, double dim) const { return (2.0 * v / dim - 1.0) * scale; }
  double dec(double v, double dim) const { return (v / scale + 1.0) * 0.5 * dim; }
};

}  // namespace dtrack
