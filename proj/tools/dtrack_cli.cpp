// dtrack command line: simulate, track, eval, ablate, sweep, robustness.
//
// Exit codes: 0 ok, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dtrack/dtrack.hpp"

namespace {

using dtrack::Settings;

constexpr int kUsage = 1;
constexpr int kDataError = 2;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags that map one-to-one onto a setting key; only flags the user actually
// passed are applied, so the config file keeps its place in the precedence.
struct SettingFlags {
  std::map<std::string, std::string> values;                  // key -> value
  std::vector<std::pair<CLI::Option*, std::string>> options;  // option, key
  std::vector<std::string> assignments;                       // --set key=value
  std::string config_path;
  std::string manifest_path;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options.emplace_back(app->add_option(flag, values[key], help), key);
  }

  void add_common(CLI::App* app) {
    app->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    app->add_option("--manifest", manifest_path, "re-use the settings recorded in a run manifest")
        ->check(CLI::ExistingFile);
    app->add_option("--set", assignments, "override any setting: section.key=value");
    add(app, "--seed", "run.seed", "random seed");
  }

  Settings resolve() const {
    Settings s = Settings::defaults();
    if (!manifest_path.empty()) {
      for (const auto& [k, v] : dtrack::read_manifest(manifest_path).config) s.set(k, v);
    }
    if (!config_path.empty()) s.merge_file(config_path);
    for (const auto& [opt, key] : options) {
      if (opt->count() > 0) s.set(key, values.at(key));
    }
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects section.key=value, got " + a);
      s.set(a.substr(0, eq), a.substr(eq + 1));
    }
    return s;
  }
};

void add_scene_flags(SettingFlags& f, CLI::App* app) {
  f.add(app, "--objects", "scene.n_objects", "number of objects");
  f.add(app, "--frames", "scene.duration", "number of frames");
  f.add(app, "--motion", "scene.motion", "linear | nonlinear | crowded");
  f.add(app, "--density", "scene.density", "box-area density of the occupied region");
  f.add(app, "--occlusion", "scene.occlusion_rate", "per-object occlusion chance");
  f.add(app, "--turn-rate", "scene.turn_rate", "orbit angular speed (non-linear)");
  f.add(app, "--crossover", "scene.crossover_rate", "fraction of objects in crossing pairs");
}

void add_image_flags(SettingFlags& f, CLI::App* app) {
  f.add(app, "--width", "scene.width", "image width in pixels");
  f.add(app, "--height", "scene.height", "image height in pixels");
}

void add_pipeline_flags(SettingFlags& f, CLI::App* app) {
  f.add(app, "--n-test", "pipeline.n_test", "proposals per frame pair");
  f.add(app, "--steps", "pipeline.steps", "DDIM sampling steps");
  f.add(app, "--proportion", "pipeline.proportion", "share of proposals taken from prior boxes");
  f.add(app, "--padding", "pipeline.padding", "repeat | cat_gaussian | cat_poisson | cat_uniform | cat_full");
  f.add(app, "--perturbation", "pipeline.perturbation", "constant | linear | exponential | logarithmic");
  f.add(app, "--variant", "pipeline.variant", "diffusion | baseline");
  f.add(app, "--fidelity", "denoiser.fidelity", "oracle fidelity in [0, 1]");
  f.add(app, "--seeds", "run.seeds", "number of seeds averaged by experiments");
}

dtrack::ImageSize image_of(const Settings& s) { return {s.get<double>("scene.width"), s.get<double>("scene.height")}; }

dtrack::ExperimentSetup setup_of(const Settings& s) {
  dtrack::ExperimentSetup e;
  e.scene = dtrack::scene_spec(s);
  e.pipeline = dtrack::pipeline_config(s);
  e.oracle = dtrack::oracle_config(s);
  e.seeds = s.get<int>("run.seeds");
  e.iou_gate = s.get<double>("eval.iou_gate");
  if (e.seeds < 1) throw std::invalid_argument("run.seeds must be >= 1");
  return e;
}

void emit_manifest(const std::string& command, const Settings& s, const std::vector<std::string>& inputs,
                   const std::string& output) {
  dtrack::RunManifest m;
  m.command = command;
  m.config = s.flat();
  m.seed = s.get<std::uint64_t>("run.seed");
  m.inputs = inputs;
  m.outputs = {output};
  m.timestamp = dtrack::utc_timestamp();
  dtrack::write_manifest(m, output + ".manifest.json");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, T (*parse)(std::string_view)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + text);
  return out;
}

double parse_double(std::string_view s) { return std::stod(std::string(s)); }
std::size_t parse_size(std::string_view s) { return std::stoul(std::string(s)); }
int parse_int(std::string_view s) { return std::stoi(std::string(s)); }
dtrack::PaddingStrategy parse_pad(std::string_view s) { return dtrack::parse_padding(s); }
dtrack::PerturbationSchedule parse_sched(std::string_view s) { return dtrack::parse_perturbation(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paired-box diffusion tracker with oracle and detection denoisers"};
  app.require_subcommand(1);

  std::string out_path, scene_path, det_path, gt_path, results_path, csv_path;
  std::string proportions = "0,0.25,0.5,0.75,1";
  std::string paddings = "repeat,cat_gaussian,cat_poisson,cat_uniform,cat_full";
  std::string schedules = "constant,linear,exponential,logarithmic";
  std::string n_tests = "100,300,500,800";
  std::string step_list = "1,2,4";
  std::string alphas = "0,0.1,0.2,0.3,0.4,0.5";

  SettingFlags simulate_flags, track_flags, eval_flags, ablate_flags, sweep_flags, robust_flags;

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scene as a MOTChallenge GT file");
  simulate_flags.add_common(simulate);
  add_scene_flags(simulate_flags, simulate);
  add_image_flags(simulate_flags, simulate);
  simulate->add_option("-o,--out", out_path, "output GT file")->required();

  auto* track = app.add_subcommand("track", "track a scene (oracle denoiser) or a detection file (snap denoiser)");
  track_flags.add_common(track);
  add_pipeline_flags(track_flags, track);
  add_image_flags(track_flags, track);
  auto* scene_opt = track->add_option("--scene", scene_path, "MOTChallenge GT file")->check(CLI::ExistingFile);
  auto* det_opt = track->add_option("--det", det_path, "MOTChallenge detection file")->check(CLI::ExistingFile);
  scene_opt->excludes(det_opt);
  track->add_option("-o,--out", out_path, "output results file")->required();

  auto* eval = app.add_subcommand("eval", "score a results file against ground truth");
  eval_flags.add_common(eval);
  add_image_flags(eval_flags, eval);
  eval->add_option("--gt", gt_path, "MOTChallenge GT file")->required()->check(CLI::ExistingFile);
  eval->add_option("--results", results_path, "MOTChallenge results file")->required()->check(CLI::ExistingFile);
  eval->add_option("--csv", csv_path, "also write the report as a CSV row");
  eval_flags.add(eval, "--iou-gate", "eval.iou_gate", "IoU needed for a match");

  auto* ablate = app.add_subcommand("ablate", "proportion x padding x perturbation grid on simulated scenes");
  ablate_flags.add_common(ablate);
  add_scene_flags(ablate_flags, ablate);
  add_pipeline_flags(ablate_flags, ablate);
  ablate->add_option("--proportions", proportions, "comma-separated prior proportions");
  ablate->add_option("--paddings", paddings, "comma-separated padding strategies");
  ablate->add_option("--schedules", schedules, "comma-separated perturbation schedules");
  ablate->add_option("-o,--out", out_path, "output CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "boxes x steps grid with latency");
  sweep_flags.add_common(sweep);
  add_scene_flags(sweep_flags, sweep);
  add_pipeline_flags(sweep_flags, sweep);
  sweep->add_option("--n-tests", n_tests, "comma-separated proposal counts");
  sweep->add_option("--step-list", step_list, "comma-separated DDIM step counts");
  sweep->add_option("-o,--out", out_path, "output CSV")->required();

  auto* robust = app.add_subcommand("robustness", "MOTA against prior-box perturbation, diffusion vs greedy IoU");
  robust_flags.add_common(robust);
  add_scene_flags(robust_flags, robust);
  add_pipeline_flags(robust_flags, robust);
  robust_flags.add(robust, "--noise-std", "pipeline.prior_noise_std", "std of the perturbation noise box");
  robust->add_option("--alphas", alphas, "comma-separated perturbation strengths");
  robust->add_option("-o,--out", out_path, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (simulate->parsed()) {
      const Settings s = simulate_flags.resolve();
      const dtrack::SceneGroundTruth scene = dtrack::generate(dtrack::scene_spec(s));
      dtrack::write_gt(scene, out_path);
      emit_manifest("simulate", s, {}, out_path);
      std::cout << "wrote " << scene.num_frames() << " frames to " << out_path << '\n';
    } else if (track->parsed()) {
      if (scene_path.empty() == det_path.empty()) throw std::invalid_argument("track needs exactly one of --scene, --det");
      const Settings s = track_flags.resolve();
      const dtrack::PipelineConfig cfg = dtrack::pipeline_config(s);
      const dtrack::ImageSize image = image_of(s);
      dtrack::TrackingResult result;
      if (!scene_path.empty()) {
        const auto gt = dtrack::to_ground_truth(dtrack::parse_motchallenge(scene_path), image);
        if (gt.num_frames() < 2) throw DataError(scene_path + ": need at least two frames");
        const dtrack::OracleDenoiser denoiser(dtrack::oracle_config(s));
        result = dtrack::run_sequence(gt, cfg, denoiser).result;
      } else {
        const auto dets = dtrack::to_detections(dtrack::parse_motchallenge(det_path), image);
        if (dets.frames.size() < 2) throw DataError(det_path + ": need at least two frames");
        const dtrack::DetectionSnapDenoiser denoiser(s.get<double>("denoiser.snap_iou_weight"));
        result = dtrack::run_sequence(dets, cfg, denoiser).result;
      }
      dtrack::write_results(result, out_path);
      emit_manifest("track", s, {scene_path.empty() ? det_path : scene_path}, out_path);
      std::cout << "wrote " << result.frames.size() << " frames to " << out_path << '\n';
    } else if (eval->parsed()) {
      const Settings s = eval_flags.resolve();
      const auto gt = dtrack::to_ground_truth(dtrack::parse_motchallenge(gt_path), image_of(s));
      const auto res = dtrack::to_result(dtrack::parse_motchallenge(results_path), gt.num_frames());
      const dtrack::MetricsReport rep = dtrack::evaluate(gt, res, s.get<double>("eval.iou_gate"));
      std::cout << dtrack::to_key_value(rep);
      if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        out << dtrack::csv_header() << '\n' << dtrack::to_csv_row(rep) << '\n';
        emit_manifest("eval", s, {gt_path, results_path}, csv_path);
      }
    } else if (ablate->parsed()) {
      const Settings s = ablate_flags.resolve();
      const auto rows = dtrack::ablate(setup_of(s), parse_list(proportions, parse_double),
                                       parse_list(paddings, parse_pad), parse_list(schedules, parse_sched));
      auto out = open_out(out_path);
      dtrack::write_csv(out, rows);
      emit_manifest("ablate", s, {}, out_path);
    } else if (sweep->parsed()) {
      const Settings s = sweep_flags.resolve();
      const auto rows = dtrack::sweep(setup_of(s), parse_list(n_tests, parse_size), parse_list(step_list, parse_int));
      auto out = open_out(out_path);
      dtrack::write_csv(out, rows);
      emit_manifest("sweep", s, {}, out_path);
    } else if (robust->parsed()) {
      const Settings s = robust_flags.resolve();
      const auto rows = dtrack::robustness(setup_of(s), parse_list(alphas, parse_double));
      auto out = open_out(out_path);
      dtrack::write_csv(out, rows);
      emit_manifest("robustness", s, {}, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
