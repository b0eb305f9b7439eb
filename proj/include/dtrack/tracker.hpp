#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dtrack/assignment.hpp"
#include "dtrack/denoiser.hpp"
#include "dtrack/geometry.hpp"
#include "dtrack/kalman.hpp"
#include "dtrack/scene.hpp"

namespace dtrack {

struct TrackerConfig {
  double tau_conf = 0.25;   // association score gate
  double tau_det = 0.7;     // detection score gate
  double tau_nms3d = 0.6;
  double tau_nms2d = 0.7;
  double init_score = 0.7;  // new-track threshold; defaults to tau_det
  int max_lost_age = 30;
  double iou_match_threshold = 0.3;

  void validate() const {
    for (const double r : {tau_conf, tau_det, tau_nms3d, tau_nms2d, init_score, iou_match_threshold}) {
      if (r < 0.0 || r > 1.0) throw std::invalid_argument("TrackerConfig: ratio outside [0, 1]");
    }
    if (max_lost_age < 0) throw std::invalid_argument("TrackerConfig: max_lost_age must be >= 0");
  }
};

enum class TrackStatus { Activated, Lost };

struct Track {
  int id = 0;
  TrackStatus status = TrackStatus::Activated;
  BBox last_box;
  std::vector<std::pair<int, BBox>> history;
  KalmanBoxFilter::State kalman;
  int kalman_frame = 0;  // frame the Kalman state refers to
  int lost_age = 0;
  double score = 0.0;
};

/// Output of candidate splitting. `pre[i]` and `cur[i]` are the two members
/// of the same association pair.
struct SplitCandidates {
  std::vector<BBox> pre;
  std::vector<BBox> cur;
  std::vector<double> cur_scores;
  std::vector<Candidate> fresh;
};

/// Rows with assoc > tau_conf are kept. Proposal indices below `n_assoc`
/// (the prior-derived slots) feed association; the rest are new-object
/// discoveries.
inline SplitCandidates split_candidates(std::span<const Candidate> cands, std::size_t n_assoc,
                                        const TrackerConfig& cfg) {
  SplitCandidates out;
  for (const auto& c : cands) {
    if (!(c.assoc > cfg.tau_conf)) continue;
    if (c.proposal_index < n_assoc) {
      out.pre.push_back(c.pair.prev);
      out.cur.push_back(c.pair.cur);
      out.cur_scores.push_back(c.cls_cur);
    } else {
      out.fresh.push_back(c);
    }
  }
  return out;
}

/// IoU assignment: minimises sum(1 - IoU) over pairs with IoU >= min_iou.
inline MatchSet iou_match(std::span<const BBox> a, std::span<const BBox> b, double min_iou) {
  CostMatrix cost(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) cost(i, j) = 1.0 - iou(a[i], b[j]);
  }
  return assign_with_limit(cost, 1.0 - min_iou);
}

/// Drops new candidates whose cur box overlaps some association box by more
/// than tau_nms2d (strictly).
inline std::vector<Candidate> filter_duplicates(std::span<const Candidate> fresh, std::span<const BBox> cur,
                                                const TrackerConfig& cfg) {
  std::vector<Candidate> out;
  for (const auto& c : fresh) {
    const bool dup = std::any_of(cur.begin(), cur.end(), [&](const BBox& b) { return iou(c.pair.cur, b) > cfg.tau_nms2d; });
    if (!dup) out.push_back(c);
  }
  return out;
}

/// Constant-velocity prediction of lost tracks up to `frame`.
inline void predict_lost(std::span<Track> lost, int frame, const KalmanBoxFilter& kf = {}) {
  for (auto& t : lost) {
    const int dt = frame - t.kalman_frame;
    if (dt <= 0) continue;
    t.kalman = kf.predict(t.kalman, dt);
    t.kalman_frame = frame;
    t.last_box = t.kalman.box();
  }
}

/// Track lifecycle over candidates from consecutive frame pairs.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Track>& activated() const { return activated_; }
  const std::vector<Track>& lost() const { return lost_; }
  int last_frame() const { return last_frame_; }

  /// Boxes of the activated tracks in id order; the next pair's priors.
  std::vector<BBox> prior_boxes() const {
    std::vector<BBox> out;
    for (const auto& t : activated_) out.push_back(t.last_box);
    return out;
  }

  /// One pass of the lifecycle for frame `frame`. `n_assoc` is the number of
  /// prior-derived proposal slots used to build `cands`.
  std::vector<TrackedBox> step(std::span<const Candidate> cands, int frame, std::size_t n_assoc) {
    if (frame <= last_frame_) throw std::invalid_argument("Tracker::step: frame index must increase");
    last_frame_ = frame;

    const SplitCandidates split = split_candidates(cands, n_assoc, cfg_);

    // Activated tracks against the prev members of association pairs.
    std::vector<BBox> active_boxes;
    for (const auto& t : activated_) active_boxes.push_back(t.last_box);
    const MatchSet active_match = iou_match(active_boxes, split.pre, cfg_.iou_match_threshold);
    std::vector<Track> still_active, act_remain;
    std::vector<char> matched(activated_.size(), 0);
    for (const auto& [ti, di] : active_match.pairs) {
      Track& t = activated_[ti];
      advance(t, split.cur[di], split.cur_scores[di], frame);
      matched[ti] = 1;
    }
    for (std::size_t i = 0; i < activated_.size(); ++i) {
      (matched[i] ? still_active : act_remain).push_back(std::move(activated_[i]));
    }

    const std::vector<Candidate> fresh = filter_duplicates(split.fresh, split.cur, cfg_);

    predict_lost(lost_, frame, kf_);
    std::vector<BBox> lost_boxes, fresh_boxes;
    for (const auto& t : lost_) lost_boxes.push_back(t.last_box);
    for (const auto& c : fresh) fresh_boxes.push_back(c.pair.cur);
    const MatchSet lost_match = iou_match(lost_boxes, fresh_boxes, cfg_.iou_match_threshold);
    std::vector<Track> reactivated, lost_remain;
    std::vector<char> lost_matched(lost_.size(), 0);
    for (const auto& [ti, di] : lost_match.pairs) {
      Track& t = lost_[ti];
      advance(t, fresh[di].pair.cur, fresh[di].cls_cur, frame);
      t.status = TrackStatus::Activated;
      t.lost_age = 0;
      lost_matched[ti] = 1;
    }
    for (std::size_t i = 0; i < lost_.size(); ++i) {
      (lost_matched[i] ? reactivated : lost_remain).push_back(std::move(lost_[i]));
    }

    // activated <- (activated \ act_remain) u (lost \ lost_remain)
    // lost      <- act_remain u lost_remain
    activated_ = std::move(still_active);
    for (auto& t : reactivated) activated_.push_back(std::move(t));
    lost_.clear();
    for (auto& t : act_remain) {
      t.status = TrackStatus::Lost;
      t.lost_age = 1;
      t.kalman = kf_.predict(t.kalman, frame - t.kalman_frame);
      t.kalman_frame = frame;
      t.last_box = t.kalman.box();
      lost_.push_back(std::move(t));
    }
    for (auto& t : lost_remain) {
      if (++t.lost_age <= cfg_.max_lost_age) lost_.push_back(std::move(t));
    }

    for (const std::size_t di : lost_match.unmatched_cols) {
      const Candidate& c = fresh[di];
      if (c.cls_cur > cfg_.init_score) activated_.push_back(start_track(c.pair.cur, c.cls_cur, frame));
    }

    auto by_id = [](const Track& a, const Track& b) { return a.id < b.id; };
    std::sort(activated_.begin(), activated_.end(), by_id);
    std::sort(lost_.begin(), lost_.end(), by_id);

    std::vector<TrackedBox> out;
    for (const auto& t : activated_) out.push_back({t.id, t.last_box, t.score});
    return out;
  }

 private:
  void advance(Track& t, const BBox& box, double score, int frame) {
    t.kalman = kf_.update(kf_.predict(t.kalman, frame - t.kalman_frame), box);
    t.kalman_frame = frame;
    t.last_box = box;
    t.score = score;
    t.history.emplace_back(frame, box);
  }

  Track start_track(const BBox& box, double score, int frame) {
    Track t;
    t.id = next_id_++;
    t.status = TrackStatus::Activated;
    t.last_box = box;
    t.kalman = kf_.initiate(box);
    t.kalman_frame = frame;
    t.score = score;
    t.history.emplace_back(frame, box);
    return t;
  }

  TrackerConfig cfg_;
  KalmanBoxFilter kf_;
  std::vector<Track> activated_;
  std::vector<Track> lost_;
  int next_id_ = 1;
  int last_frame_ = std::numeric_limits<int>::min();
};

}  // namespace dtrack
