#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dtrack/assignment.hpp"
#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"

namespace dtrack {

struct MetricsReport {
  double mota = std::numeric_limits<double>::quiet_NaN();  // NaN when there is no ground truth
  double idf1 = std::numeric_limits<double>::quiet_NaN();
  std::size_t idsw = 0;
  std::size_t frag = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t matches = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;
  std::size_t idtp = 0;
};

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// CLEAR-MOT and IDF1. Only visible ground-truth entries are evaluated; a
/// prediction covering an occluded object counts as a false positive.
inline MetricsReport evaluate(const SceneGroundTruth& gt, const TrackingResult& result, double iou_gate = 0.5) {
  if (result.frames.size() > gt.frames.size()) {
    throw std::invalid_argument("evaluate: result has more frames than the ground truth");
  }
  MetricsReport rep;
  std::map<int, int> last_match;                          // gt id -> hyp id
  std::map<int, std::vector<char>> tracked_runs;          // gt id -> matched flag per present frame
  std::map<std::pair<int, int>, std::size_t> overlap;     // (gt id, hyp id) -> frames matched at the gate
  std::map<int, std::size_t> gt_len, hyp_len;
  const double big = 1e9;

  for (std::size_t k = 0; k < gt.frames.size(); ++k) {
    std::vector<const GtEntry*> objs;
    for (const auto& e : gt.frames[k]) {
      if (e.visible) objs.push_back(&e);
    }
    static const std::vector<TrackedBox> kEmpty;
    const auto& hyps = k < result.frames.size() ? result.frames[k] : kEmpty;
    rep.gt_count += objs.size();
    rep.pred_count += hyps.size();
    for (const auto* o : objs) ++gt_len[o->id];
    for (const auto& h : hyps) ++hyp_len[h.id];

    for (const auto* o : objs) {
      for (const auto& h : hyps) {
        if (iou(o->box, h.box) >= iou_gate) ++overlap[{o->id, h.id}];
      }
    }

    std::vector<long> gt_to_hyp(objs.size(), -1);
    std::vector<char> hyp_used(hyps.size(), 0);
    // Keep last frame's correspondences while they still pass the gate.
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const auto it = last_match.find(objs[i]->id);
      if (it == last_match.end()) continue;
      for (std::size_t j = 0; j < hyps.size(); ++j) {
        if (!hyp_used[j] && hyps[j].id == it->second && iou(objs[i]->box, hyps[j].box) >= iou_gate) {
          gt_to_hyp[i] = static_cast<long>(j);
          hyp_used[j] = 1;
          break;
        }
      }
    }
    std::vector<std::size_t> free_gt, free_hyp;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (gt_to_hyp[i] < 0) free_gt.push_back(i);
    }
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (!hyp_used[j]) free_hyp.push_back(j);
    }
    if (!free_gt.empty() && !free_hyp.empty()) {
      CostMatrix cost(free_gt.size(), free_hyp.size());
      for (std::size_t a = 0; a < free_gt.size(); ++a) {
        for (std::size_t b = 0; b < free_hyp.size(); ++b) {
          const double o = iou(objs[free_gt[a]]->box, hyps[free_hyp[b]].box);
          cost(a, b) = o >= iou_gate ? 1.0 - o : big;
        }
      }
      for (const auto& [a, b] : hungarian(cost).pairs) {
        if (cost(a, b) >= big) continue;
        const std::size_t i = free_gt[a], j = free_hyp[b];
        gt_to_hyp[i] = static_cast<long>(j);
        hyp_used[j] = 1;
        const auto it = last_match.find(objs[i]->id);
        if (it != last_match.end() && it->second != hyps[j].id) ++rep.idsw;
      }
    }

    for (std::size_t i = 0; i < objs.size(); ++i) {
      const bool matched = gt_to_hyp[i] >= 0;
      tracked_runs[objs[i]->id].push_back(matched ? 1 : 0);
      if (matched) {
        ++rep.matches;
        last_match[objs[i]->id] = hyps[static_cast<std::size_t>(gt_to_hyp[i])].id;
      } else {
        ++rep.fn;
      }
    }
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (!hyp_used[j]) ++rep.fp;
    }
  }

  for (const auto& [id, flags] : tracked_runs) {
    std::size_t runs = 0;
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (flags[k] && (k == 0 || !flags[k - 1])) ++runs;
    }
    if (runs > 1) rep.frag += runs - 1;
  }

  if (rep.gt_count > 0) {
    // integer numerator keeps exact fractions exact
    const auto errors = static_cast<long long>(rep.fn + rep.fp + rep.idsw);
    rep.mota = static_cast<double>(static_cast<long long>(rep.gt_count) - errors) / static_cast<double>(rep.gt_count);
  }

  // Identity matching of whole trajectories maximising shared detections.
  std::vector<int> gt_ids, hyp_ids;
  for (const auto& [id, n] : gt_len) gt_ids.push_back(id);
  for (const auto& [id, n] : hyp_len) hyp_ids.push_back(id);
  if (!gt_ids.empty() && !hyp_ids.empty()) {
    CostMatrix cost(gt_ids.size(), hyp_ids.size());
    for (std::size_t a = 0; a < gt_ids.size(); ++a) {
      for (std::size_t b = 0; b < hyp_ids.size(); ++b) {
        const auto it = overlap.find({gt_ids[a], hyp_ids[b]});
        cost(a, b) = it == overlap.end() ? 0.0 : -static_cast<double>(it->second);
      }
    }
    for (const auto& [a, b] : hungarian(cost).pairs) rep.idtp += static_cast<std::size_t>(-cost(a, b));
  }
  const std::size_t denom = rep.gt_count + rep.pred_count;
  if (denom > 0) rep.idf1 = 2.0 * static_cast<double>(rep.idtp) / static_cast<double>(denom);
  return rep;
}

/// `key=value` lines.
inline std::string to_key_value(const MetricsReport& r) {
  std::ostringstream os;
  os << "mota=" << detail::format_number(r.mota) << '\n'
     << "idf1=" << detail::format_number(r.idf1) << '\n'
     << "idsw=" << r.idsw << '\n'
     << "frag=" << r.frag << '\n'
     << "fp=" << r.fp << '\n'
     << "fn=" << r.fn << '\n'
     << "gt_count=" << r.gt_count << '\n'
     << "pred_count=" << r.pred_count << '\n';
  return os.str();
}

inline std::string csv_header() { return "mota,idf1,idsw,frag,fp,fn,gt_count"; }

inline std::string to_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os << detail::format_number(r.mota) << ',' << detail::format_number(r.idf1) << ',' << r.idsw << ',' << r.frag
     << ',' << r.fp << ',' << r.fn << ',' << r.gt_count;
  return os.str();
}

}  // namespace dtrack
