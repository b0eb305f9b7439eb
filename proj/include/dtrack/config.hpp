#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dtrack/loss.hpp"
#include "dtrack/metrics.hpp"
#include "dtrack/oracle_denoiser.hpp"
#include "dtrack/pipeline.hpp"
#include "dtrack/simulator.hpp"

namespace dtrack {

/// Flat sectioned settings (`section.key`). Layers are applied in order
/// defaults < config file < command line; every key must exist in the
/// defaults, so typos fail loudly.
class Settings {
 public:
  static constexpr const char* kSeedEnv = "DTRACK_SEED";

  /// Built-in defaults. DTRACK_SEED, when set, replaces the default seed.
  static Settings defaults() {
    Settings s;
    auto& t = s.tree_;
    const PipelineConfig p;
    t.put("pipeline.n_test", p.n_test);
    t.put("pipeline.steps", p.steps);
    t.put("pipeline.proportion", p.proportion);
    t.put("pipeline.padding", std::string(to_string(p.padding)));
    t.put("pipeline.perturbation", std::string(to_string(p.perturbation)));
    t.put("pipeline.diffusion_steps", p.diffusion_steps);
    t.put("pipeline.noise_form", std::string("as_printed"));
    t.put("pipeline.signal_scale", p.signal_scale);
    t.put("pipeline.variant", std::string(to_string(p.variant)));
    t.put("pipeline.first_motion", p.first_motion);
    t.put("pipeline.prior_noise_alpha", p.prior_noise_alpha);
    t.put("pipeline.prior_noise_std", p.prior_noise_std);
    t.put("pipeline.n_train", 500);

    const TrackerConfig tc;
    t.put("tracker.tau_conf", tc.tau_conf);
    t.put("tracker.tau_det", tc.tau_det);
    t.put("tracker.tau_nms3d", tc.tau_nms3d);
    t.put("tracker.tau_nms2d", tc.tau_nms2d);
    t.put("tracker.init_score", tc.init_score);
    t.put("tracker.max_lost_age", tc.max_lost_age);
    t.put("tracker.iou_match_threshold", tc.iou_match_threshold);

    const LossWeights lw;
    t.put("loss.cls", lw.cls);
    t.put("loss.reg", lw.reg);
    t.put("loss.giou", lw.giou);

    const OracleConfig oc;
    t.put("denoiser.kind", std::string("oracle"));
    t.put("denoiser.fidelity", oc.fidelity);
    t.put("denoiser.residual_clip", oc.residual_clip);
    t.put("denoiser.near_iou_floor", oc.near_iou_floor);
    t.put("denoiser.far_score", oc.far_score);
    t.put("denoiser.set_coverage", oc.set_coverage);
    t.put("denoiser.snap_iou_weight", 0.5);

    const SceneSpec sc;
    t.put("scene.n_objects", sc.n_objects);
    t.put("scene.duration", sc.duration);
    t.put("scene.width", sc.image.width);
    t.put("scene.height", sc.image.height);
    t.put("scene.motion", std::string(to_string(sc.motion)));
    t.put("scene.turn_rate", sc.turn_rate);
    t.put("scene.crossover_rate", sc.crossover_rate);
    t.put("scene.density", sc.density);
    t.put("scene.occlusion_rate", sc.occlusion_rate);
    t.put("scene.min_width", sc.min_width);
    t.put("scene.max_width", sc.max_width);
    t.put("scene.min_aspect", sc.min_aspect);
    t.put("scene.max_aspect", sc.max_aspect);
    t.put("scene.min_speed", sc.min_speed);
    t.put("scene.max_speed", sc.max_speed);
    t.put("scene.orbit_radius", sc.orbit_radius);

    t.put("eval.iou_gate", 0.5);

    std::uint64_t seed = 0;
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
      try {
        seed = std::stoull(env);
      } catch (const std::exception&) {
        throw std::invalid_argument(std::string(kSeedEnv) + " is not an unsigned integer: " + env);
      }
    }
    t.put("run.seed", seed);
    t.put("run.seeds", 1);
    return s;
  }

  void merge_file(const std::string& path) {
    boost::property_tree::ptree file;
    try {
      boost::property_tree::ini_parser::read_ini(path, file);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw std::runtime_error(e.what());
    }
    merge(file);
  }

  void merge_stream(std::istream& in) {
    boost::property_tree::ptree file;
    try {
      boost::property_tree::ini_parser::read_ini(in, file);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw std::runtime_error(e.what());
    }
    merge(file);
  }

  /// Sets one `section.key`.
  void set(const std::string& key, const std::string& value) {
    if (!tree_.get_child_optional(key)) throw std::invalid_argument("unknown setting: " + key);
    tree_.put(key, value);
  }

  template <typename T>
  T get(const std::string& key) const {
    try {
      return tree_.get<T>(key);
    } catch (const boost::property_tree::ptree_error&) {
      throw std::invalid_argument("bad value for setting " + key + ": '" + tree_.get<std::string>(key, "") + "'");
    }
  }

  std::map<std::string, std::string> flat() const {
    std::map<std::string, std::string> out;
    for (const auto& [section, body] : tree_) {
      for (const auto& [key, node] : body) out[section + "." + key] = node.data();
    }
    return out;
  }

  /// INI text that reproduces these settings when merged.
  std::string to_ini() const {
    std::ostringstream os;
    boost::property_tree::ini_parser::write_ini(os, tree_);
    return os.str();
  }

 private:
  void merge(const boost::property_tree::ptree& other) {
    for (const auto& [section, body] : other) {
      if (body.empty() && !body.data().empty()) {
        throw std::invalid_argument("setting outside a section: " + section);
      }
      for (const auto& [key, node] : body) set(section + "." + key, node.data());
    }
  }

  boost::property_tree::ptree tree_;
};

inline PipelineConfig pipeline_config(const Settings& s) {
  PipelineConfig p;
  p.n_test = s.get<std::size_t>("pipeline.n_test");
  p.steps = s.get<int>("pipeline.steps");
  p.proportion = s.get<double>("pipeline.proportion");
  p.padding = parse_padding(s.get<std::string>("pipeline.padding"));
  p.perturbation = parse_perturbation(s.get<std::string>("pipeline.perturbation"));
  p.diffusion_steps = s.get<int>("pipeline.diffusion_steps");
  const auto form = s.get<std::string>("pipeline.noise_form");
  if (form == "as_printed") {
    p.noise_form = NoiseForm::AsPrinted;
  } else if (form == "variance_preserving") {
    p.noise_form = NoiseForm::VariancePreserving;
  } else {
    throw std::invalid_argument("unknown noise form: " + form);
  }
  p.signal_scale = s.get<double>("pipeline.signal_scale");
  p.variant = parse_variant(s.get<std::string>("pipeline.variant"));
  p.first_motion = s.get<double>("pipeline.first_motion");
  p.prior_noise_alpha = s.get<double>("pipeline.prior_noise_alpha");
  p.prior_noise_std = s.get<double>("pipeline.prior_noise_std");
  p.tracker.tau_conf = s.get<double>("tracker.tau_conf");
  p.tracker.tau_det = s.get<double>("tracker.tau_det");
  p.tracker.tau_nms3d = s.get<double>("tracker.tau_nms3d");
  p.tracker.tau_nms2d = s.get<double>("tracker.tau_nms2d");
  p.tracker.init_score = s.get<double>("tracker.init_score");
  p.tracker.max_lost_age = s.get<int>("tracker.max_lost_age");
  p.tracker.iou_match_threshold = s.get<double>("tracker.iou_match_threshold");
  p.seed = s.get<std::uint64_t>("run.seed");
  p.validate();
  return p;
}

inline OracleConfig oracle_config(const Settings& s) {
  OracleConfig o;
  o.fidelity = s.get<double>("denoiser.fidelity");
  o.residual_clip = s.get<double>("denoiser.residual_clip");
  o.near_iou_floor = s.get<double>("denoiser.near_iou_floor");
  o.far_score = s.get<double>("denoiser.far_score");
  o.set_coverage = s.get<bool>("denoiser.set_coverage");
  if (o.fidelity < 0.0 || o.fidelity > 1.0) throw std::invalid_argument("denoiser.fidelity outside [0, 1]");
  return o;
}

inline SceneSpec scene_spec(const Settings& s) {
  SceneSpec sc;
  sc.n_objects = s.get<int>("scene.n_objects");
  sc.duration = s.get<int>("scene.duration");
  sc.image = {s.get<double>("scene.width"), s.get<double>("scene.height")};
  sc.motion = parse_motion(s.get<std::string>("scene.motion"));
  sc.turn_rate = s.get<double>("scene.turn_rate");
  sc.crossover_rate = s.get<double>("scene.crossover_rate");
  sc.density = s.get<double>("scene.density");
  sc.occlusion_rate = s.get<double>("scene.occlusion_rate");
  sc.min_width = s.get<double>("scene.min_width");
  sc.max_width = s.get<double>("scene.max_width");
  sc.min_aspect = s.get<double>("scene.min_aspect");
  sc.max_aspect = s.get<double>("scene.max_aspect");
  sc.min_speed = s.get<double>("scene.min_speed");
  sc.max_speed = s.get<double>("scene.max_speed");
  sc.orbit_radius = s.get<double>("scene.orbit_radius");
  sc.seed = s.get<std::uint64_t>("run.seed");
  sc.validate();
  return sc;
}

}  // namespace dtrack
