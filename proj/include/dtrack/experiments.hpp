#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dtrack/metrics.hpp"
#include "dtrack/oracle_denoiser.hpp"
#include "dtrack/pipeline.hpp"
#include "dtrack/reference_tracker.hpp"
#include "dtrack/simulator.hpp"

namespace dtrack {

/// Scene, pipeline and oracle settings shared by every cell of an
/// experiment. Seed s of `seeds` runs scene and pipeline with base seed + s.
struct ExperimentSetup {
  SceneSpec scene;
  PipelineConfig pipeline;
  OracleConfig oracle;
  int seeds = 1;
  double iou_gate = 0.5;
};

struct SeedAverage {
  double mota = 0.0;
  double idf1 = 0.0;
  std::size_t idsw = 0;  // summed over seeds
  std::size_t frag = 0;
};

namespace detail {

inline void accumulate(SeedAverage& acc, const MetricsReport& r, int seeds) {
  acc.mota += r.mota / seeds;
  acc.idf1 += r.idf1 / seeds;
  acc.idsw += r.idsw;
  acc.frag += r.frag;
}

inline SceneSpec seeded(SceneSpec s, std::uint64_t seed) {
  s.seed = seed;
  return s;
}

}  // namespace detail

/// Tracks one generated scene with the oracle and scores it.
inline MetricsReport track_and_evaluate(const SceneGroundTruth& scene, const PipelineConfig& cfg,
                                        const OracleConfig& oracle, double iou_gate = 0.5) {
  const OracleDenoiser denoiser(oracle);
  return evaluate(scene, run_sequence(scene, cfg, denoiser).result, iou_gate);
}

inline SeedAverage run_seeds(const ExperimentSetup& setup, const PipelineConfig& cfg) {
  SeedAverage acc;
  for (int s = 0; s < setup.seeds; ++s) {
    const std::uint64_t seed = setup.pipeline.seed + static_cast<std::uint64_t>(s);
    const SceneGroundTruth scene = generate(detail::seeded(setup.scene, seed));
    PipelineConfig c = cfg;
    c.seed = seed;
    detail::accumulate(acc, track_and_evaluate(scene, c, setup.oracle, setup.iou_gate), setup.seeds);
  }
  return acc;
}

struct AblationRow {
  double proportion = 0.0;
  PaddingStrategy padding = PaddingStrategy::CatGaussian;
  PerturbationSchedule perturbation = PerturbationSchedule::Linear;
  SeedAverage metrics;
};

/// One row per element of proportions x paddings x schedules.
inline std::vector<AblationRow> ablate(const ExperimentSetup& setup, const std::vector<double>& proportions,
                                       const std::vector<PaddingStrategy>& paddings,
                                       const std::vector<PerturbationSchedule>& schedules) {
  std::vector<AblationRow> rows;
  for (const double p : proportions) {
    for (const auto pad : paddings) {
      for (const auto sch : schedules) {
        PipelineConfig cfg = setup.pipeline;
        cfg.proportion = p;
        cfg.padding = pad;
        cfg.perturbation = sch;
        rows.push_back({p, pad, sch, run_seeds(setup, cfg)});
      }
    }
  }
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
  os << "proportion,padding,perturbation,mota,idf1,idsw,frag\n";
  for (const auto& r : rows) {
    os << detail::format_number(r.proportion) << ',' << to_string(r.padding) << ',' << to_string(r.perturbation)
       << ',' << detail::format_number(r.metrics.mota) << ',' << detail::format_number(r.metrics.idf1) << ','
       << r.metrics.idsw << ',' << r.metrics.frag << '\n';
  }
}

struct SweepRow {
  std::size_t n_test = 0;
  int steps = 0;
  SeedAverage metrics;
  double ms_per_pair = 0.0;  // wall clock
};

/// Boxes x steps grid.
inline std::vector<SweepRow> sweep(const ExperimentSetup& setup, const std::vector<std::size_t>& n_tests,
                                   const std::vector<int>& steps) {
  std::vector<SweepRow> rows;
  for (const std::size_t n : n_tests) {
    for (const int s : steps) {
      PipelineConfig cfg = setup.pipeline;
      cfg.n_test = n;
      cfg.steps = s;
      const auto t0 = std::chrono::steady_clock::now();
      SweepRow row{n, s, run_seeds(setup, cfg), 0.0};
      const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
      row.ms_per_pair = dt.count() / (setup.seeds * std::max(setup.scene.duration, 1));
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool with_latency = true) {
  os << "n_test,steps,mota,idf1,idsw" << (with_latency ? ",ms_per_pair" : "") << '\n';
  for (const auto& r : rows) {
    os << r.n_test << ',' << r.steps << ',' << detail::format_number(r.metrics.mota) << ','
       << detail::format_number(r.metrics.idf1) << ',' << r.metrics.idsw;
    if (with_latency) os << ',' << detail::format_number(r.ms_per_pair);
    os << '\n';
  }
}

struct RobustnessRow {
  double alpha = 0.0;
  SeedAverage diffusion;
  SeedAverage reference;
};

/// Visible ground-truth boxes perturbed at `alpha`, as a detection stream.
inline DetectionStream perturbed_detections(const SceneGroundTruth& scene, double alpha, double noise_std,
                                            std::uint64_t seed) {
  std::vector<std::vector<BBox>> frames;
  for (const auto& f : scene.frames) frames.push_back(visible_boxes(f));
  Rng rng(seed);
  const auto noisy = perturb_detections(frames, alpha, scene.image, rng, noise_std);
  DetectionStream s;
  s.image = scene.image;
  for (const auto& f : noisy) {
    std::vector<Detection> dets;
    for (const auto& b : f) dets.push_back({b, 1.0});
    s.frames.push_back(std::move(dets));
  }
  return s;
}

/// MOTA against prior-box perturbation strength, for the diffusion pipeline
/// (priors perturbed before proposal construction) and the greedy IoU tracker
/// fed the same kind of perturbed boxes.
inline std::vector<RobustnessRow> robustness(const ExperimentSetup& setup, const std::vector<double>& alphas) {
  std::vector<RobustnessRow> rows;
  for (const double a : alphas) {
    RobustnessRow row;
    row.alpha = a;
    PipelineConfig cfg = setup.pipeline;
    cfg.prior_noise_alpha = a;
    row.diffusion = run_seeds(setup, cfg);
    for (int s = 0; s < setup.seeds; ++s) {
      const std::uint64_t seed = setup.pipeline.seed + static_cast<std::uint64_t>(s);
      const SceneGroundTruth scene = generate(detail::seeded(setup.scene, seed));
      GreedyIouTracker ref(setup.pipeline.tracker.iou_match_threshold, setup.pipeline.tracker.max_lost_age);
      const TrackingResult res = ref.run(perturbed_detections(scene, a, cfg.prior_noise_std, seed));
      detail::accumulate(row.reference, evaluate(scene, res, setup.iou_gate), setup.seeds);
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<RobustnessRow>& rows) {
  os << "alpha,diffusion_mota,diffusion_idf1,reference_mota,reference_idf1\n";
  for (const auto& r : rows) {
    os << detail::format_number(r.alpha) << ',' << detail::format_number(r.diffusion.mota) << ','
       << detail::format_number(r.diffusion.idf1) << ',' << detail::format_number(r.reference.mota) << ','
       << detail::format_number(r.reference.idf1) << '\n';
  }
}

}  // namespace dtrack
