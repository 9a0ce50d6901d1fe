// Command-line front end: detect, match, stitch, simulate, evaluate.
//
// Exit codes: 0 success, 2 I/O, 3 configuration, 4 partial stitch (the
// stitched prefix is still written), 5 no consensus or overlap.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dronemap/features.hpp"
#include "dronemap/flightsim.hpp"
#include "dronemap/image_io.hpp"
#include "dronemap/interchange.hpp"
#include "dronemap/matching.hpp"
#include "dronemap/stitcher.hpp"
#include "dronemap/transform.hpp"
#include "viz.hpp"

namespace fs = std::filesystem;
using namespace dronemap;

namespace {

enum Exit : int { kOk = 0, kIo = 2, kConfig = 3, kPartial = 4, kNoConsensus = 5 };

bool g_color = true;

void log_line(const char* tag, const char* ansi, const std::string& msg) {
  if (g_color) {
    std::cerr << "\033[" << ansi << "m" << tag << "\033[0m " << msg << "\n";
  } else {
    std::cerr << tag << " " << msg << "\n";
  }
}
void info(const std::string& msg) { log_line("[info]", "36", msg); }
void warn(const std::string& msg) { log_line("[warn]", "33", msg); }
void fail(const std::string& msg) { log_line("[error]", "31", msg); }

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::IoError:
    case Errc::UnsupportedFormat:
    case Errc::CorruptFile: return kIo;
    case Errc::InvalidConfig:
    case Errc::FilterTooLarge:
    case Errc::SceneTooSmall: return kConfig;
    case Errc::InsufficientMatches:
    case Errc::NoConsensus:
    case Errc::NoOverlap:
    case Errc::DirectionMismatch:
    case Errc::ExcessiveDrift: return kNoConsensus;
    default: return kConfig;
  }
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool viz = false;
};

RunConfig load_config(const Common& common) {
  RunConfig config = common.config_path.empty() ? RunConfig{} : config_from_json(read_json(common.config_path));
  if (common.seed) config.set_seed(*common.seed);
  config.validate();
  return config;
}

fs::path prepare_out(const Common& common) {
  const fs::path out(common.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::IoError, "cannot create output directory '" + out.string() + "'");
  return out;
}

bool is_json_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", common.seed, "Seed for every random stream");
  cmd->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  cmd->add_flag("--viz", common.viz, "Also write an annotated visualization");
}

// ---- detect ---------------------------------------------------------------

int cmd_detect(const Common& common, const std::string& image_path) {
  const RunConfig config = load_config(common);
  const RgbImage img = load_image(image_path);
  const auto features = extract_features(to_grayscale(img), config.detector);
  const fs::path out = prepare_out(common);
  write_json(keypoints_to_json(features), out / "keypoints.json");
  if (common.viz) save_image(viz::draw_keypoints(img, features), out / "keypoints.png");
  info(std::to_string(features.size()) + " keypoints -> " + (out / "keypoints.json").string());
  return kOk;
}

// ---- match ----------------------------------------------------------------

struct Side {
  std::vector<Feature> features;
  std::optional<RgbImage> image;
};

Side load_side(const std::string& path, const RunConfig& config) {
  Side s;
  if (is_json_path(path)) {
    s.features = keypoints_from_json(read_json(path));
  } else {
    s.image = load_image(path);
    s.features = extract_features(to_grayscale(*s.image), config.detector);
  }
  return s;
}

int cmd_match(const Common& common, const std::string& query_path, const std::string& train_path) {
  const RunConfig config = load_config(common);
  const Side query = load_side(query_path, config);
  const Side train = load_side(train_path, config);
  const fs::path out = prepare_out(common);
  write_json(keypoints_to_json(query.features), out / "keypoints_query.json");
  write_json(keypoints_to_json(train.features), out / "keypoints_train.json");

  std::vector<Match> matches;
  if (!query.features.empty() && !train.features.empty()) {
    matches = match_descriptors(query.features, train.features, config.matcher);
  } else {
    warn("one side has no keypoints; nothing to match");
  }
  write_json(matches_to_json(matches), out / "matches.json");
  if (common.viz) {
    if (query.image && train.image) {
      save_image(viz::draw_matches(*query.image, query.features, *train.image, train.features, matches),
                 out / "matches.png");
    } else {
      warn("--viz needs image inputs on both sides; skipped");
    }
  }
  info(std::to_string(matches.size()) + " matches -> " + (out / "matches.json").string());
  return kOk;
}

// ---- stitch ---------------------------------------------------------------

int finish_stitch(const Common& common, const SequenceResult& result) {
  const fs::path out = prepare_out(common);
  save_image(result.composite.image, out / "mosaic.png");
  write_json(report_to_json(result.report), out / "report.json");
  if (common.viz) save_image(viz::draw_layout(result.composite.image, result.composite.layout), out / "layout.png");
  info(std::to_string(result.report.pairs.size()) + " pairs stitched, mosaic " +
       std::to_string(result.report.width) + "x" + std::to_string(result.report.height));
  if (result.report.ok()) return kOk;
  for (const auto& f : result.report.failures) {
    fail(f.stage + " pair (" + std::to_string(f.first) + ", " + std::to_string(f.second) + "): " + f.message);
  }
  // Nothing stitched at all means the very first pair found no consensus.
  if (result.report.pairs.empty()) return exit_code_for(result.report.failures.front().code);
  return kPartial;
}

int cmd_stitch(const Common& common, const std::vector<std::string>& frames_in, const std::string& plan_path,
               const std::string& direction) {
  const RunConfig config = load_config(common);
  const StitchParams params = config.stitch_params();
  if (!plan_path.empty()) {
    if (!frames_in.empty()) throw Error(Errc::InvalidConfig, "pass either --plan or frame paths, not both");
    const MosaicPlan plan = plan_from_json(read_json(plan_path));
    const fs::path base = fs::path(plan_path).parent_path();
    std::vector<RgbImage> frames;
    for (const auto& ref : plan.frame_refs) {
      const fs::path p(ref);
      frames.push_back(load_image(p.is_absolute() ? p : base / p));
    }
    return finish_stitch(common, build_mosaic(plan, frames, params));
  }
  if (frames_in.empty()) throw Error(Errc::InvalidConfig, "stitch needs --plan or at least one frame");
  std::vector<RgbImage> frames;
  for (const auto& p : frames_in) frames.push_back(load_image(p));
  return finish_stitch(common, stitch_sequence(frames, parse_direction(direction), params));
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string scene_path;
  std::string camera = "front";
  std::optional<int> columns, rows;
  std::optional<double> overlap_x, overlap_y, jitter, drift;
  int scene_margin = 64;
};

int cmd_simulate(const Common& common, const SimulateArgs& args) {
  RunConfig config = load_config(common);
  if (args.camera == "front") {
    config.camera = CameraConfig::front();
  } else if (args.camera == "bottom") {
    config.camera = CameraConfig::bottom();
  } else if (args.camera != "config") {
    throw Error(Errc::InvalidConfig, "--camera must be front, bottom or config");
  }
  if (args.columns) config.flight.columns = *args.columns;
  if (args.rows) config.flight.rows = *args.rows;
  if (args.overlap_x) config.flight.overlap_x = *args.overlap_x;
  if (args.overlap_y) config.flight.overlap_y = *args.overlap_y;
  if (args.jitter) config.flight.jitter_sigma = *args.jitter;
  if (args.drift) config.flight.brightness_drift = *args.drift;
  config.validate();

  const fs::path out = prepare_out(common);
  RgbImage scene;
  if (args.scene_path.empty()) {
    const SceneExtent need = required_scene_extent(config.camera, config.flight);
    scene = procedural_scene(need.width + 2 * args.scene_margin, need.height + 2 * args.scene_margin,
                             config.flight.rng_seed);
    save_image(scene, out / "scene.png");
  } else {
    scene = load_image(args.scene_path);
  }

  Flight flight = generate_flight(scene, config.camera, config.flight);
  fs::create_directories(out / "frames");
  for (std::size_t i = 0; i < flight.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu.png", i);
    save_image(flight.frames[i], out / "frames" / name);
  }
  for (auto& ref : flight.plan.frame_refs) ref = (fs::path("frames") / ref).generic_string();
  write_json(plan_to_json(flight.plan), out / "plan.json");
  write_json(poses_to_json(flight.poses), out / "poses.json");
  info(std::to_string(flight.frames.size()) + " frames -> " + (out / "frames").string());
  return kOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string mosaic, scene, poses, report, plan;
  int seam_margin = 3;
  int frame_width = 0, frame_height = 0;
};

int cmd_evaluate(const Common& common, const EvaluateArgs& args) {
  load_config(common);
  const RgbImage mosaic = load_image(args.mosaic);
  const RgbImage scene = load_image(args.scene);
  const auto poses = poses_from_json(read_json(args.poses));
  std::optional<MosaicPlan> plan;
  std::optional<StitchReport> report;
  if (!args.plan.empty()) plan = plan_from_json(read_json(args.plan));
  if (!args.report.empty()) report = report_from_json(read_json(args.report));

  EvalParams params;
  params.seam_margin = args.seam_margin;
  params.frame_width = args.frame_width;
  params.frame_height = args.frame_height;
  const Metrics m = evaluate_mosaic(mosaic, scene, poses, plan ? &*plan : nullptr, report ? &*report : nullptr, params);
  const fs::path out = prepare_out(common);
  const Json j = metrics_to_json(m);
  write_json(j, out / "metrics.json");
  std::cout << dump_json(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drone survey mosaicking: feature detection, matching and crop-and-concat stitching"};
  app.require_subcommand(1);
  bool no_color = false;
  app.add_flag("--no-color", no_color, "Plain log output (also honoured via NO_COLOR)");

  Common common;

  std::string detect_image;
  auto* detect = app.add_subcommand("detect", "Detect and describe keypoints in one image");
  detect->add_option("image", detect_image, "Input image")->required();
  add_common(detect, common);

  std::string match_query, match_train;
  auto* match = app.add_subcommand("match", "Match keypoints of two images (or keypoint JSON files)");
  match->add_option("query", match_query, "Query image or keypoints JSON")->required();
  match->add_option("train", match_train, "Train image or keypoints JSON")->required();
  add_common(match, common);

  std::vector<std::string> stitch_frames;
  std::string stitch_plan, stitch_direction = "BottomToTop";
  auto* stitch = app.add_subcommand("stitch", "Stitch a frame sequence or a grid plan");
  stitch->add_option("frames", stitch_frames, "Frames in stitching order");
  stitch->add_option("--plan", stitch_plan, "Grid plan JSON (frame paths relative to it)");
  stitch->add_option("--direction", stitch_direction, "Sequence direction")
      ->check(CLI::IsMember({"BottomToTop", "TopToBottom", "LeftToRight", "RightToLeft"}))
      ->capture_default_str();
  add_common(stitch, common);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic serpentine survey flight");
  simulate->add_option("scene", sim.scene_path, "Scene image (default: a procedural scene, written as scene.png)");
  simulate->add_option("--camera", sim.camera, "front (640x480), bottom (176x144) or config")->capture_default_str();
  simulate->add_option("--columns", sim.columns);
  simulate->add_option("--rows", sim.rows);
  simulate->add_option("--overlap-x", sim.overlap_x);
  simulate->add_option("--overlap-y", sim.overlap_y);
  simulate->add_option("--jitter", sim.jitter, "Pose jitter sigma in pixels");
  simulate->add_option("--drift", sim.drift, "Brightness added per frame");
  simulate->add_option("--scene-margin", sim.scene_margin, "Border around the flight in the procedural scene")
      ->capture_default_str();
  add_common(simulate, common);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a mosaic against the ground-truth scene");
  evaluate->add_option("mosaic", ev.mosaic)->required();
  evaluate->add_option("scene", ev.scene)->required();
  evaluate->add_option("poses", ev.poses)->required();
  evaluate->add_option("--report", ev.report, "Stitch report; anchors the mosaic and yields seam errors");
  evaluate->add_option("--plan", ev.plan, "Grid plan, when the report comes from a plan");
  evaluate->add_option("--seam-margin", ev.seam_margin)->capture_default_str();
  evaluate->add_option("--frame-width", ev.frame_width, "Frame extent when no report is given");
  evaluate->add_option("--frame-height", ev.frame_height);
  add_common(evaluate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  g_color = !no_color && std::getenv("NO_COLOR") == nullptr;

  try {
    if (*detect) return cmd_detect(common, detect_image);
    if (*match) return cmd_match(common, match_query, match_train);
    if (*stitch) return cmd_stitch(common, stitch_frames, stitch_plan, stitch_direction);
    if (*simulate) return cmd_simulate(common, sim);
    if (*evaluate) return cmd_evaluate(common, ev);
  } catch (const Error& e) {
    fail(e.what());
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    fail(e.what());
    return kIo;
  }
  return kConfig;
}
