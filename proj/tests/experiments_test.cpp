#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "dtrack/config.hpp"
#include "dtrack/experiments.hpp"
#include "dtrack/manifest.hpp"

using namespace dtrack;

namespace {

ExperimentSetup small_setup() {
  ExperimentSetup s;
  s.scene.n_objects = 4;
  s.scene.duration = 6;
  s.pipeline.n_test = 60;
  s.oracle.fidelity = 0.9;
  s.seeds = 2;
  return s;
}

ExperimentSetup setup_from(const Settings& st) {
  ExperimentSetup s;
  s.scene = scene_spec(st);
  s.pipeline = pipeline_config(st);
  s.oracle = oracle_config(st);
  s.seeds = st.get<int>("run.seeds");
  s.iou_gate = st.get<double>("eval.iou_gate");
  return s;
}

}  // namespace

TEST(Ablate, OneRowPerCombination) {
  const auto rows = ablate(small_setup(), {0.25, 0.5},
                           {PaddingStrategy::Repeat, PaddingStrategy::CatGaussian, PaddingStrategy::CatUniform},
                           {PerturbationSchedule::Linear, PerturbationSchedule::Constant});
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].proportion, 0.25);
  EXPECT_EQ(rows[0].padding, PaddingStrategy::Repeat);
  EXPECT_EQ(rows[1].perturbation, PerturbationSchedule::Constant);
  EXPECT_EQ(rows[11].proportion, 0.5);
  for (const auto& r : rows) {
    EXPECT_LE(r.metrics.mota, 1.0);
    EXPECT_GE(r.metrics.idf1, 0.0);
  }
  std::ostringstream os;
  write_csv(os, rows);
  const std::string csv = os.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(Sweep, GridAndLatency) {
  const auto rows = sweep(small_setup(), {20, 60}, {1, 2});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3].n_test, 60u);
  EXPECT_EQ(rows[3].steps, 2);
  for (const auto& r : rows) EXPECT_GT(r.ms_per_pair, 0.0);
  std::ostringstream os;
  write_csv(os, rows, false);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "n_test,steps,mota,idf1,idsw");
}

TEST(Robustness, ZeroAlphaMatchesPlainTracking) {
  auto setup = small_setup();
  setup.seeds = 1;
  const auto rows = robustness(setup, {0.0});
  ASSERT_EQ(rows.size(), 1u);
  const auto scene = generate(detail::seeded(setup.scene, setup.pipeline.seed));
  const auto plain = track_and_evaluate(scene, setup.pipeline, setup.oracle);
  EXPECT_EQ(rows[0].diffusion.mota, plain.mota);
  EXPECT_EQ(rows[0].diffusion.idsw, plain.idsw);
  // unperturbed boxes on a sparse linear scene: the greedy tracker is exact
  EXPECT_EQ(rows[0].reference.mota, 1.0);
}

TEST(Robustness, PerturbedDetectionsKeepVisibleCount) {
  SceneSpec spec;
  spec.occlusion_rate = 1.0;
  const auto scene = generate(spec);
  const auto stream = perturbed_detections(scene, 0.3, 0.03, 1);
  ASSERT_EQ(stream.frames.size(), scene.frames.size());
  for (std::size_t k = 0; k < scene.frames.size(); ++k) EXPECT_EQ(stream.frames[k].size(), visible_boxes(scene.frames[k]).size());
}

TEST(Reproducibility, ManifestRerunGivesIdenticalCsv) {
  auto settings = Settings::defaults();
  settings.set("scene.n_objects", "4");
  settings.set("scene.duration", "6");
  settings.set("pipeline.n_test", "50");
  settings.set("denoiser.fidelity", "0.85");
  settings.set("run.seed", "3");

  std::ostringstream first;
  write_csv(first, ablate(setup_from(settings), {0.25}, {PaddingStrategy::CatGaussian}, {PerturbationSchedule::Linear}));

  RunManifest m;
  m.command = "ablate";
  m.config = settings.flat();
  m.seed = settings.get<std::uint64_t>("run.seed");
  const auto restored_manifest = RunManifest::from_json(nlohmann::json::parse(m.to_json().dump()));
  auto restored = Settings::defaults();
  for (const auto& [k, v] : restored_manifest.config) restored.set(k, v);

  std::ostringstream second;
  write_csv(second, ablate(setup_from(restored), {0.25}, {PaddingStrategy::CatGaussian}, {PerturbationSchedule::Linear}));
  EXPECT_EQ(first.str(), second.str());
}
