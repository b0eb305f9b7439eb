#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dtrack/geometry.hpp"
#include "dtrack/scene.hpp"

namespace dtrack {

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One MOTChallenge row. Frames are 1-based as in the file.
struct MotRow {
  int frame = 0;
  int id = -1;
  BBox box;
  double conf = 1.0;
  double cls = -1.0;
  double visibility = -1.0;
};

namespace detail {

inline double parse_field(std::string_view s, const std::string& path, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(path, line, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Rows sorted by (frame, id). Blank lines are skipped.
inline std::vector<MotRow> parse_motchallenge(std::istream& in, const std::string& path = "<stream>") {
  std::vector<MotRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> f;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(detail::parse_field(rest.substr(0, comma), path, lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() < 6) throw ParseError(path, lineno, "expected at least 6 columns, got " + std::to_string(f.size()));
    MotRow r;
    r.frame = static_cast<int>(f[0]);
    if (r.frame != f[0] || r.frame < 1) throw ParseError(path, lineno, "frame must be a positive integer");
    r.id = static_cast<int>(f[1]);
    if (r.id != f[1]) throw ParseError(path, lineno, "id must be an integer");
    if (f[4] < 0.0 || f[5] < 0.0) throw ParseError(path, lineno, "negative box size");
    r.box = BBox::from_ltwh(f[2], f[3], f[4], f[5]);
    if (f.size() > 6) r.conf = f[6];
    if (f.size() > 7) r.cls = f[7];
    if (f.size() > 8) r.visibility = f[8];
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const MotRow& a, const MotRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return rows;
}

inline std::vector<MotRow> parse_motchallenge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_motchallenge(in, path);
}

inline std::size_t frame_count(const std::vector<MotRow>& rows) {
  int last = 0;
  for (const auto& r : rows) last = std::max(last, r.frame);
  return static_cast<std::size_t>(last);
}

/// Rows to a 0-based detection stream of at least `num_frames` frames.
inline DetectionStream to_detections(const std::vector<MotRow>& rows, const ImageSize& image,
                                     std::size_t num_frames = 0) {
  DetectionStream s;
  s.image = image;
  s.frames.resize(std::max(num_frames, frame_count(rows)));
  for (const auto& r : rows) s.frames[static_cast<std::size_t>(r.frame - 1)].push_back({r.box, r.conf});
  return s;
}

/// Rows to ground truth. Visibility 0 marks an occluded entry; rows whose
/// consider flag (the conf column) is 0 are dropped.
inline SceneGroundTruth to_ground_truth(const std::vector<MotRow>& rows, const ImageSize& image,
                                        std::size_t num_frames = 0) {
  SceneGroundTruth gt;
  gt.image = image;
  gt.frames.resize(std::max(num_frames, frame_count(rows)));
  for (const auto& r : rows) {
    if (r.conf == 0.0) continue;
    gt.frames[static_cast<std::size_t>(r.frame - 1)].push_back({r.id, r.box, r.visibility != 0.0});
  }
  return gt;
}

inline TrackingResult to_result(const std::vector<MotRow>& rows, std::size_t num_frames = 0) {
  TrackingResult res;
  res.frames.resize(std::max(num_frames, frame_count(rows)));
  for (const auto& r : rows) res.frames[static_cast<std::size_t>(r.frame - 1)].push_back({r.id, r.box, r.conf});
  return res;
}

namespace detail {

inline void write_ltwh(std::ostream& os, const BBox& b) {
  os << shortest(b.x1()) << ',' << shortest(b.y1()) << ',' << shortest(b.w) << ',' << shortest(b.h);
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace detail

/// `frame,id,left,top,w,h,conf,-1,-1,-1`, ordered by (frame, id).
inline void write_results(const TrackingResult& result, std::ostream& os) {
  for (std::size_t k = 0; k < result.frames.size(); ++k) {
    auto rows = result.frames[k];
    std::sort(rows.begin(), rows.end(), [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
    for (const auto& r : rows) {
      os << k + 1 << ',' << r.id << ',';
      detail::write_ltwh(os, r.box);
      os << ',' << detail::shortest(r.score) << ",-1,-1,-1\n";
    }
  }
}

inline void write_results(const TrackingResult& result, const std::string& path) {
  auto out = detail::open_for_write(path);
  write_results(result, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// `frame,id,left,top,w,h,1,1,visibility`.
inline void write_gt(const SceneGroundTruth& gt, std::ostream& os) {
  for (std::size_t k = 0; k < gt.frames.size(); ++k) {
    auto rows = gt.frames[k];
    std::sort(rows.begin(), rows.end(), [](const GtEntry& a, const GtEntry& b) { return a.id < b.id; });
    for (const auto& e : rows) {
      os << k + 1 << ',' << e.id << ',';
      detail::write_ltwh(os, e.box);
      os << ",1,1," << (e.visible ? 1 : 0) << '\n';
    }
  }
}

inline void write_gt(const SceneGroundTruth& gt, const std::string& path) {
  auto out = detail::open_for_write(path);
  write_gt(gt, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// `frame,-1,left,top,w,h,conf,-1,-1,-1`.
inline void write_detections(const DetectionStream& s, std::ostream& os) {
  for (std::size_t k = 0; k < s.frames.size(); ++k) {
    for (const auto& d : s.frames[k]) {
      os << k + 1 << ",-1,";
      detail::write_ltwh(os, d.box);
      os << ',' << detail::shortest(d.conf) << ",-1,-1,-1\n";
    }
  }
}

}  // namespace dtrack
