#pragma once

// JSON interchange for keypoints, matches, estimates, plans, reports, poses,
// metrics and run configuration. Reals are written in shortest round-trip
// form, so repeated runs produce byte-identical files.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dronemap/features.hpp"
#include "dronemap/flightsim.hpp"
#include "dronemap/matching.hpp"
#include "dronemap/stitcher.hpp"
#include "dronemap/transform.hpp"

namespace dronemap {

using Json = nlohmann::ordered_json;

Json keypoints_to_json(std::span<const Feature> features);
std::vector<Feature> keypoints_from_json(const Json& j);

Json matches_to_json(std::span<const Match> matches);
std::vector<Match> matches_from_json(const Json& j);

Json estimate_to_json(const TransformEstimate& e);

Json plan_to_json(const MosaicPlan& plan);
MosaicPlan plan_from_json(const Json& j);

Json report_to_json(const StitchReport& report);
StitchReport report_from_json(const Json& j);

Json poses_to_json(std::span<const GroundTruthPose> poses);
std::vector<GroundTruthPose> poses_from_json(const Json& j);

Json metrics_to_json(const Metrics& m);

// Every parameter group with its defaults; load_run_config overlays a file on top.
struct RunConfig {
  DetectorParams detector;
  MatchParams matcher;
  RansacParams ransac;
  int max_perpendicular_drift = 16;
  double detection_band = 1.5;
  bool feather = false;
  CameraConfig camera;
  FlightConfig flight;

  StitchParams stitch_params() const;
  void set_seed(std::uint64_t seed);
  void validate() const;
};

Json config_to_json(const RunConfig& config);
// Unknown keys and ill-typed values raise InvalidConfig.
RunConfig config_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);
std::string dump_json(const Json& j);

}  // namespace dronemap
