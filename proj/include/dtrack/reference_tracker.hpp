#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"

namespace dtrack {

/// Plain IoU tracker: each frame, existing tracks and detections are paired
/// greedily in order of decreasing IoU above a threshold. No motion model.
class GreedyIouTracker {
 public:
  explicit GreedyIouTracker(double iou_threshold = 0.3, int max_age = 30)
      : threshold_(iou_threshold), max_age_(max_age) {
    if (iou_threshold < 0.0 || iou_threshold > 1.0) throw std::invalid_argument("GreedyIouTracker: bad threshold");
  }

  std::vector<TrackedBox> step(std::span<const Detection> dets) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      for (std::size_t d = 0; d < dets.size(); ++d) {
        const double o = iou(tracks_[t].box, dets[d].box);
        if (o >= threshold_) pairs.emplace_back(o, t, d);
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<char> track_used(tracks_.size(), 0), det_used(dets.size(), 0);
    std::vector<TrackedBox> out;
    for (const auto& [o, t, d] : pairs) {
      if (track_used[t] || det_used[d]) continue;
      track_used[t] = det_used[d] = 1;
      tracks_[t].box = dets[d].box;
      tracks_[t].age = 0;
      out.push_back({tracks_[t].id, dets[d].box, dets[d].conf});
    }
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      if (!track_used[t]) ++tracks_[t].age;
    }
    std::erase_if(tracks_, [&](const Entry& e) { return e.age > max_age_; });
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (det_used[d]) continue;
      tracks_.push_back({next_id_, dets[d].box, 0});
      out.push_back({next_id_++, dets[d].box, dets[d].conf});
    }
    std::sort(out.begin(), out.end(), [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
    return out;
  }

  TrackingResult run(const DetectionStream& stream) {
    TrackingResult result;
    for (const auto& frame : stream.frames) result.frames.push_back(step(frame));
    return result;
  }

 private:
  struct Entry {
    int id;
    BBox box;
    int age;
  };

  double threshold_;
  int max_age_;
  std::vector<Entry> tracks_;
  int next_id_ = 1;
};

}  // namespace dtrack
