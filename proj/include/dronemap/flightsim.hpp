#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dronemap/image.hpp"
#include "dronemap/stitcher.hpp"

namespace dronemap {

// Nadir camera producing axis-aligned crops of the scene. The field of view
// (45 x 35 degrees for the bottom camera, 75 x 60 for the front one) is
// metadata only; ground resolution is fixed at one scene pixel per frame pixel.
struct CameraConfig {
  int frame_width = 640;
  int frame_height = 480;

  static CameraConfig front() { return {640, 480}; }
  static CameraConfig bottom() { return {176, 144}; }
  void validate() const;
};

struct FlightConfig {
  int columns = 4;
  int rows = 4;
  double overlap_x = 0.3;  // fraction of frame width shared by neighbouring columns
  double overlap_y = 0.3;  // fraction of frame height shared along a leg
  double jitter_sigma = 0.0;
  double brightness_drift = 0.0;  // gray levels added per frame, in flight order
  std::uint64_t rng_seed = 1;
  StitchDirection first_leg = StitchDirection::BottomToTop;

  void validate() const;
};

struct GroundTruthPose {
  int index = 0;
  int x = 0;  // top-left of the frame in scene coordinates
  int y = 0;

  friend bool operator==(const GroundTruthPose&, const GroundTruthPose&) = default;
};

struct Flight {
  std::vector<RgbImage> frames;  // flight order
  std::vector<GroundTruthPose> poses;
  MosaicPlan plan;  // frame_refs name the flight-order frames as frame_NNN.png

  // Frames rearranged row-major, aligned with plan.frame_refs.
  std::vector<RgbImage> frames_in_plan_order() const;
};

struct SceneExtent {
  int width = 0;
  int height = 0;
};

// Extent covered by the nominal grid: frame * (1 + (n - 1) * (1 - overlap)) per axis.
SceneExtent nominal_grid_extent(const CameraConfig& cam, const FlightConfig& flight);

// Grid extent plus a 3-sigma jitter margin on every side.
SceneExtent required_scene_extent(const CameraConfig& cam, const FlightConfig& flight);

// Serpentine flight: columns left to right, the first leg flown along
// flight.first_leg and each following leg reversed. The grid is centered in
// the scene; poses get i.i.d. Gaussian jitter, are rounded half away from
// zero and clamped to the scene. Frame i has i * brightness_drift added.
Flight generate_flight(const RgbImage& scene, const CameraConfig& cam, const FlightConfig& flight);

// Deterministic textured scene: multi-octave color value noise plus scattered
// Gaussian blobs, so that every region has distinctive blob features.
RgbImage procedural_scene(int width, int height, std::uint64_t seed);

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::array<double, 3> rmse_per_channel{};
  std::array<double, 3> mae_per_channel{};
  double interior_mae = 0.0;  // MAE away from seams
  double coverage = 0.0;      // share of the frames' union footprint covered by the mosaic
  std::vector<double> seam_errors;
  int anchor_x = 0;  // scene position of the mosaic's top-left pixel
  int anchor_y = 0;
};

struct EvalParams {
  int seam_margin = 3;  // pixels on either side of a seam excluded from interior_mae
  int anchor_search_radius = 16;
  // Frame extent for the coverage footprint; a report's layout overrides it.
  int frame_width = 0;
  int frame_height = 0;
};

// Scores a mosaic against the scene. With a report, the mosaic is anchored by
// the layout position of the first flown frame and its true pose, seam pixels
// come from the layout, and every reported pair yields a seam error: the
// difference between placed and true relative frame offsets (the worst row
// for column joins). Without a report the anchor is searched around the
// poses' top-left corner and no seam errors are produced. plan maps layout
// frame ids (grid cells) to flight indices; without it ids are flight indices.
Metrics evaluate_mosaic(const RgbImage& mosaic, const RgbImage& scene, std::span<const GroundTruthPose> poses,
                        const MosaicPlan* plan, const StitchReport* report, const EvalParams& params = {});

}  // namespace dronemap
