#pragma once

#include <cstddef>
#include <vector>

#include "dtrack/geometry.hpp"

namespace dtrack {

struct ImageSize {
  double width = 1920.0;
  double height = 1080.0;
};

/// Identity-labelled ground-truth box. Occluded objects stay in the frame
/// with `visible == false` rather than being removed.
struct GtEntry {
  int id = 0;
  BBox box;
  bool visible = true;
};

/// Frames are 0-based internally; MOTChallenge files are 1-based.
struct SceneGroundTruth {
  ImageSize image;
  std::vector<std::vector<GtEntry>> frames;

  std::size_t num_frames() const { return frames.size(); }
};

struct Detection {
  BBox box;
  double conf = 1.0;
};

struct DetectionStream {
  ImageSize image;
  std::vector<std::vector<Detection>> frames;
};

struct TrackedBox {
  int id = 0;
  BBox box;
  double score = 1.0;
};

struct TrackingResult {
  std::vector<std::vector<TrackedBox>> frames;
};

/// Visible boxes of one ground-truth frame.
inline std::vector<BBox> visible_boxes(const std::vector<GtEntry>& frame) {
  std::vector<BBox> out;
  for (const auto& e : frame) {
    if (e.visible) out.push_back(e.box);
  }
  return out;
}

}  // namespace dtrack
