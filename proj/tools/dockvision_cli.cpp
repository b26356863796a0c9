// dockvision: adaptive-color docking-station landmark tools.
//
//   dockvision simulate  [--scene s.json] --out frame.png [--truth gt.json]
//   dockvision detect    [--config c.json] [--out-dir dir] image...
//   dockvision color     [--config c.json] image
//   dockvision pose      [--config c.json] (--corners u,v,... | --image f.png)
//   dockvision benchmark [--config c.json] [--sweep s.json] --csv out.csv
//   dockvision agree     [--config c.json] [--scene s.json] [--pairs N]
//
// Exit codes: 0 success, 1 partial failure, 2 config error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "dockvision/benchmark.hpp"
#include "dockvision/config.hpp"
#include "dockvision/error.hpp"
#include "dockvision/image_io.hpp"
#include "dockvision/pipeline.hpp"
#include "dockvision/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dockvision;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct ConfigFlags {
  std::string config_path;
  std::string policy;
  std::vector<double> offset;
  std::optional<double> window;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "pipeline config (JSON)");
    cmd->add_option("--policy", policy, "marker color policy: ternary | complement");
    cmd->add_option("--offset", offset, "color correction offset r,g,b")->delimiter(',')->expected(3);
    cmd->add_option("--window", window, "rolling average window in seconds");
  }

  PipelineConfig load() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
    if (!policy.empty()) c.policy = parse_policy(policy);
    if (!offset.empty()) c.color_correction_offset = {offset[0], offset[1], offset[2]};
    if (window) c.rolling_window_s = *window;
    c.validate();
    return c;
  }
};

SceneSpec load_scene(const std::string& path) {
  return path.empty() ? SceneSpec{} : scene_spec_from_json(read_json_file(path));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_simulate(const std::string& scene_path, const std::optional<std::uint64_t>& seed,
                 const std::optional<double>& hue, const std::optional<double>& noise,
                 const std::string& out, const std::string& truth_path) {
  SceneSpec spec = load_scene(scene_path);
  if (seed) spec.seed = *seed;
  if (hue) spec.background_color.h = wrap_hue(*hue);
  if (noise) spec.noise_sigma = *noise;
  const auto [frame, truth] = render(spec);
  write_png(out, frame);
  if (!truth_path.empty()) write_text(truth_path, dump(to_json(truth)));
  return kExitOk;
}

int cmd_detect(const PipelineConfig& config, const std::vector<std::string>& images,
               const std::string& out_dir, bool overlay) {
  AuvPipeline pipeline(config);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const fs::path path(images[i]);
    const double timestamp = static_cast<double>(i) / config.frame_rate_hz;
    try {
      const Frame frame = read_frame(path, timestamp);
      const FrameResult result = pipeline.process(frame);
      json doc = to_json(result);
      doc["image"] = path.filename().string();
      if (out_dir.empty()) {
        std::cout << dump(doc);
      } else {
        const fs::path dir(out_dir);
        write_text(dir / (path.stem().string() + ".json"), dump(doc));
        if (overlay)
          write_overlay(dir / (path.stem().string() + "_overlay.png"), frame, result.mask.pass,
                        result.landmarks.blobs, result.landmarks.detection);
      }
    } catch (const ImageIoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_color(const PipelineConfig& config, const std::string& image) {
  DockStationPipeline station(config);
  const auto out = station.process(read_frame(image));
  json doc = {{"image", fs::path(image).filename().string()},
              {"policy", std::string(to_string(config.policy))},
              {"background", to_json(out.background)},
              {"pure_background", to_json(out.pure_background)},
              {"marker_color", {{"hsv", to_json(out.marker_color)}, {"rgb", to_json(out.led_command)}}},
              {"background_coverage", fixed(out.coverage)}};
  std::cout << dump(doc);
  return kExitOk;
}

int cmd_pose(const PipelineConfig& config, const std::vector<double>& corners,
             const std::string& image) {
  CornerPixels pixels;
  if (!corners.empty()) {
    if (corners.size() != 8) throw ConfigError("--corners needs 8 numbers: TL, TR, BL, BR as u,v");
    for (int i = 0; i < 4; ++i) pixels[i] = {corners[2 * i], corners[2 * i + 1]};
  } else if (!image.empty()) {
    AuvPipeline pipeline(config);
    const auto result = pipeline.process(read_frame(image));
    if (!result.landmarks.detection) {
      std::cout << dump({{"pose", nullptr}, {"error", "no landmarks detected"}});
      return kExitPartial;
    }
    pixels = corner_pixels(*result.landmarks.detection);
  } else {
    throw ConfigError("pose needs --corners or --image");
  }
  try {
    const auto pose = solve_pnp(pixels, config.geometry, config.intrinsics);
    std::cout << dump({{"pose", to_json(pose)}});
    return kExitOk;
  } catch (const PoseError& e) {
    std::cout << dump({{"pose", nullptr}, {"error", e.what()}});
    return kExitPartial;
  }
}

int cmd_benchmark(const PipelineConfig& config, const std::string& sweep_path,
                  std::optional<int> frames, std::optional<int> threads, const std::string& detection,
                  const std::string& csv_path, const std::string& summary_path) {
  json doc = sweep_path.empty() ? json::object() : read_json_file(sweep_path);
  if (frames) doc["frames_per_hue"] = *frames;
  if (threads) doc["threads"] = *threads;
  if (!detection.empty()) doc["detection"] = detection;
  const SweepSpec sweep = sweep_spec_from_json(doc);

  const auto result = run_benchmark(sweep, config);
  std::ostringstream csv;
  write_csv(csv, result.records);
  write_text(csv_path, csv.str());

  json ratios = json::array();
  for (const auto& n : noise_ratios(result.records, sweep.static_tuned_hues)) {
    ratios.push_back({{"static_filter", n.static_filter},
                      {"frames", n.frames},
                      {"adaptive_median", fixed(n.adaptive_median, 8)},
                      {"static_median", fixed(n.static_median, 8)},
                      {"ratio", std::isfinite(n.ratio) ? json(fixed(n.ratio, 4)) : json(nullptr)}});
  }
  json summary = {{"sweep", to_json(sweep)}, {"filters", to_json(result.summary)}, {"noise_ratios", ratios}};
  if (summary_path.empty())
    std::cout << dump(summary);
  else
    write_text(summary_path, dump(summary));
  return kExitOk;
}

int cmd_agree(const PipelineConfig& config, const std::string& scene_path, int pairs,
              std::uint64_t seed, const std::optional<double>& noise) {
  SceneSpec scene = load_scene(scene_path);
  if (noise) scene.noise_sigma = *noise;
  std::cout << dump(to_json(run_agreement(scene, config, pairs, seed)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Frames are several MB each; keep them on the heap instead of fresh
  // mmap regions so the per-frame page faults go away.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif

  CLI::App app{"Adaptive-color docking-station landmark detection"};
  app.require_subcommand(1);

  std::string scene_path, out_path, truth_path;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_hue, sim_noise;
  auto* simulate = app.add_subcommand("simulate", "render a synthetic scene to PNG");
  simulate->add_option("--scene", scene_path, "scene spec (JSON)");
  simulate->add_option("--seed", sim_seed, "noise seed");
  simulate->add_option("--hue", sim_hue, "background hue in degrees");
  simulate->add_option("--noise", sim_noise, "per-channel noise sigma");
  simulate->add_option("-o,--out", out_path, "output PNG")->required();
  simulate->add_option("--truth", truth_path, "ground truth sidecar (JSON)");

  ConfigFlags detect_flags;
  std::vector<std::string> images;
  std::string out_dir;
  bool no_overlay = false;
  auto* detect = app.add_subcommand("detect", "detect landmarks in an image sequence");
  detect_flags.attach(detect);
  detect->add_option("images", images, "input images, in time order")->required();
  detect->add_option("-o,--out-dir", out_dir, "write <stem>.json and <stem>_overlay.png here");
  detect->add_flag("--no-overlay", no_overlay, "skip overlay PNGs");

  ConfigFlags color_flags;
  std::string color_image;
  auto* color = app.add_subcommand("color", "report background and marker color for an image");
  color_flags.attach(color);
  color->add_option("image", color_image, "input image")->required();

  ConfigFlags pose_flags;
  std::vector<double> corners;
  std::string pose_image;
  auto* pose = app.add_subcommand("pose", "estimate the docking-station pose");
  pose_flags.attach(pose);
  pose->add_option("--corners", corners, "TL,TR,BL,BR pixel coordinates as u,v pairs")->delimiter(',');
  pose->add_option("--image", pose_image, "detect the corners in this image instead");

  ConfigFlags bench_flags;
  std::string sweep_path, csv_path, summary_path, detection_mode;
  std::optional<int> bench_frames, bench_threads;
  auto* benchmark = app.add_subcommand("benchmark", "adaptive vs static filter sweep");
  bench_flags.attach(benchmark);
  benchmark->add_option("--sweep", sweep_path, "sweep spec (JSON)");
  benchmark->add_option("--frames", bench_frames, "frames per hue");
  benchmark->add_option("--threads", bench_threads, "worker threads (0 = all cores)");
  benchmark->add_option("--detection", detection_mode, "none | adaptive | all");
  benchmark->add_option("--csv", csv_path, "per-frame records")->required();
  benchmark->add_option("--summary", summary_path, "summary JSON (stdout if omitted)");

  ConfigFlags agree_flags;
  std::string agree_scene;
  int pairs = 100;
  std::uint64_t agree_seed = 1;
  std::optional<double> agree_noise;
  auto* agree = app.add_subcommand("agree", "docking-station vs vehicle marker color agreement");
  agree_flags.attach(agree);
  agree->add_option("--scene", agree_scene, "scene spec (JSON)");
  agree->add_option("--pairs", pairs, "number of seed pairs");
  agree->add_option("--seed", agree_seed, "first seed");
  agree->add_option("--noise", agree_noise, "per-channel noise sigma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(scene_path, sim_seed, sim_hue, sim_noise, out_path, truth_path);
    if (*detect) return cmd_detect(detect_flags.load(), images, out_dir, !no_overlay);
    if (*color) return cmd_color(color_flags.load(), color_image);
    if (*pose) return cmd_pose(pose_flags.load(), corners, pose_image);
    if (*benchmark)
      return cmd_benchmark(bench_flags.load(), sweep_path, bench_frames, bench_threads, detection_mode,
                           csv_path, summary_path);
    if (*agree) return cmd_agree(agree_flags.load(), agree_scene, pairs, agree_seed, agree_noise);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}
