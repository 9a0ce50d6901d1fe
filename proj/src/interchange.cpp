#include "dronemap/interchange.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace dronemap {
namespace {

Json rect_json(const Rect& r) { return Json::array({r.x, r.y, r.w, r.h}); }

Rect rect_from(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(Errc::CorruptFile, "rect must be [x, y, w, h]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

// Runs a parse step, mapping JSON library errors onto CorruptFile.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptFile, std::string(what) + ": " + e.what());
  }
}

Errc errc_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(Errc::InvalidConfig); ++k) {
    if (name == errc_name(static_cast<Errc>(k))) return static_cast<Errc>(k);
  }
  throw Error(Errc::CorruptFile, "unknown error code '" + name + "'");
}

}  // namespace

Json keypoints_to_json(std::span<const Feature> features) {
  Json out = Json::array();
  for (const auto& f : features) {
    Json k;
    k["x"] = f.point.x;
    k["y"] = f.point.y;
    k["scale"] = f.point.scale;
    k["response"] = f.point.response;
    k["laplacian_sign"] = f.point.laplacian_sign;
    k["descriptor"] = f.descriptor.values;
    out.push_back(std::move(k));
  }
  return out;
}

std::vector<Feature> keypoints_from_json(const Json& j) {
  return guarded("keypoints", [&] {
    std::vector<Feature> out;
    for (const auto& k : j) {
      Feature f;
      f.point.x = k.at("x").get<double>();
      f.point.y = k.at("y").get<double>();
      f.point.scale = k.at("scale").get<double>();
      f.point.response = k.at("response").get<double>();
      f.point.laplacian_sign = k.at("laplacian_sign").get<int>();
      const auto& d = k.at("descriptor");
      if (d.size() != kDescriptorSize) throw Error(Errc::CorruptFile, "descriptor must have 64 components");
      for (int i = 0; i < kDescriptorSize; ++i) f.descriptor.values[i] = d[i].get<double>();
      out.push_back(f);
    }
    return out;
  });
}

Json matches_to_json(std::span<const Match> matches) {
  Json out = Json::array();
  for (const auto& m : matches) {
    out.push_back(Json{{"query_index", m.query_index}, {"train_index", m.train_index}, {"distance", m.distance},
                       {"ratio", m.ratio}});
  }
  return out;
}

std::vector<Match> matches_from_json(const Json& j) {
  return guarded("matches", [&] {
    std::vector<Match> out;
    for (const auto& m : j) {
      out.push_back({m.at("query_index").get<std::size_t>(), m.at("train_index").get<std::size_t>(),
                     m.at("distance").get<double>(), m.at("ratio").get<double>()});
    }
    return out;
  });
}

Json estimate_to_json(const TransformEstimate& e) {
  return Json{{"tx", e.translation.tx},
              {"ty", e.translation.ty},
              {"inliers", e.inlier_indices},
              {"inlier_rms", e.inlier_rms}};
}

Json plan_to_json(const MosaicPlan& plan) {
  return Json{{"columns", plan.columns},
              {"rows", plan.rows},
              {"traversal", plan.serpentine ? "serpentine" : "parallel"},
              {"leg_direction", direction_name(plan.leg_direction)},
              {"frames", plan.frame_refs}};
}

MosaicPlan plan_from_json(const Json& j) {
  MosaicPlan plan = guarded("plan", [&] {
    MosaicPlan p;
    p.columns = j.at("columns").get<int>();
    p.rows = j.at("rows").get<int>();
    const auto traversal = j.value("traversal", std::string("serpentine"));
    if (traversal != "serpentine" && traversal != "parallel") {
      throw Error(Errc::InvalidConfig, "plan traversal must be 'serpentine' or 'parallel'");
    }
    p.serpentine = traversal == "serpentine";
    p.leg_direction = parse_direction(j.value("leg_direction", std::string("BottomToTop")));
    p.frame_refs = j.at("frames").get<std::vector<std::string>>();
    return p;
  });
  plan.validate();
  return plan;
}

Json report_to_json(const StitchReport& report) {
  Json pairs = Json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back(Json{{"pair", {p.first, p.second}},
                         {"stage", p.stage},
                         {"column", p.column},
                         {"matches", p.matches},
                         {"inliers", p.inliers},
                         {"inlier_rms", p.inlier_rms},
                         {"tx", p.tx},
                         {"ty", p.ty},
                         {"seam", p.seam}});
  }
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back(Json{{"pair", {f.first, f.second}},
                            {"stage", f.stage},
                            {"column", f.column},
                            {"error", errc_name(f.code)},
                            {"message", f.message}});
  }
  Json placements = Json::array();
  for (const auto& piece : report.layout) {
    placements.push_back(Json{{"frame", piece.frame},
                              {"frame_width", piece.frame_width},
                              {"frame_height", piece.frame_height},
                              {"footprint", rect_json(piece.footprint)},
                              {"turns", piece.turns},
                              {"visible", rect_json(piece.visible)}});
  }
  return Json{{"pairs", std::move(pairs)},
              {"overall", {{"width", report.width}, {"height", report.height}, {"failures", std::move(failures)}}},
              {"placements", std::move(placements)}};
}

StitchReport report_from_json(const Json& j) {
  return guarded("report", [&] {
    StitchReport r;
    for (const auto& p : j.at("pairs")) {
      PairReport e;
      e.first = p.at("pair").at(0).get<int>();
      e.second = p.at("pair").at(1).get<int>();
      e.stage = p.at("stage").get<std::string>();
      e.column = p.at("column").get<int>();
      e.matches = p.at("matches").get<std::size_t>();
      e.inliers = p.at("inliers").get<std::size_t>();
      e.inlier_rms = p.at("inlier_rms").get<double>();
      e.tx = p.at("tx").get<double>();
      e.ty = p.at("ty").get<double>();
      e.seam = p.at("seam").get<int>();
      r.pairs.push_back(e);
    }
    const auto& overall = j.at("overall");
    r.width = overall.at("width").get<int>();
    r.height = overall.at("height").get<int>();
    for (const auto& f : overall.at("failures")) {
      r.failures.push_back({f.at("stage").get<std::string>(), f.at("column").get<int>(), f.at("pair").at(0).get<int>(),
                            f.at("pair").at(1).get<int>(), errc_from_name(f.at("error").get<std::string>()),
                            f.at("message").get<std::string>()});
    }
    for (const auto& p : j.value("placements", Json::array())) {
      FramePiece piece;
      piece.frame = p.at("frame").get<int>();
      piece.frame_width = p.at("frame_width").get<int>();
      piece.frame_height = p.at("frame_height").get<int>();
      piece.footprint = rect_from(p.at("footprint"));
      piece.turns = p.at("turns").get<int>();
      piece.visible = rect_from(p.at("visible"));
      r.layout.push_back(piece);
    }
    return r;
  });
}

Json poses_to_json(std::span<const GroundTruthPose> poses) {
  Json out = Json::array();
  for (const auto& p : poses) out.push_back(Json{{"index", p.index}, {"x", p.x}, {"y", p.y}});
  return out;
}

std::vector<GroundTruthPose> poses_from_json(const Json& j) {
  return guarded("poses", [&] {
    std::vector<GroundTruthPose> out;
    for (const auto& p : j) out.push_back({p.at("index").get<int>(), p.at("x").get<int>(), p.at("y").get<int>()});
    return out;
  });
}

Json metrics_to_json(const Metrics& m) {
  return Json{{"rmse", m.rmse},
              {"mae", m.mae},
              {"coverage", m.coverage},
              {"seam_errors", m.seam_errors},
              {"interior_mae", m.interior_mae},
              {"rmse_per_channel", m.rmse_per_channel},
              {"mae_per_channel", m.mae_per_channel},
              {"anchor", {m.anchor_x, m.anchor_y}}};
}

StitchParams RunConfig::stitch_params() const {
  StitchParams p;
  p.detector = detector;
  p.matcher = matcher;
  p.ransac = ransac;
  p.max_perpendicular_drift = max_perpendicular_drift;
  p.detection_band = detection_band;
  p.feather = feather;
  return p;
}

void RunConfig::set_seed(std::uint64_t seed) {
  ransac.rng_seed = seed;
  flight.rng_seed = seed;
}

void RunConfig::validate() const {
  stitch_params().validate();
  camera.validate();
  flight.validate();
}

Json config_to_json(const RunConfig& c) {
  return Json{
      {"detector",
       {{"octaves", c.detector.octaves},
        {"layers_per_octave", c.detector.layers_per_octave},
        {"initial_filter_size", c.detector.initial_filter_size},
        {"response_threshold", c.detector.response_threshold},
        {"sampling_step", c.detector.sampling_step}}},
      {"matcher",
       {{"ratio_threshold", c.matcher.ratio_threshold},
        {"use_laplacian_prefilter", c.matcher.use_laplacian_prefilter},
        {"cross_check", c.matcher.cross_check}}},
      {"ransac",
       {{"iterations", c.ransac.iterations},
        {"inlier_tolerance", c.ransac.inlier_tolerance},
        {"min_matches", c.ransac.min_matches},
        {"min_inlier_fraction", c.ransac.min_inlier_fraction},
        {"rng_seed", c.ransac.rng_seed}}},
      {"stitcher",
       {{"max_perpendicular_drift", c.max_perpendicular_drift},
        {"detection_band", c.detection_band},
        {"feather", c.feather}}},
      {"camera", {{"frame_width", c.camera.frame_width}, {"frame_height", c.camera.frame_height}}},
      {"flight",
       {{"columns", c.flight.columns},
        {"rows", c.flight.rows},
        {"overlap_x", c.flight.overlap_x},
        {"overlap_y", c.flight.overlap_y},
        {"jitter_sigma", c.flight.jitter_sigma},
        {"brightness_drift", c.flight.brightness_drift},
        {"rng_seed", c.flight.rng_seed},
        {"first_leg", direction_name(c.flight.first_leg)}}},
  };
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  using Setter = std::function<void(const Json&)>;
  const std::map<std::string, std::map<std::string, Setter>> fields{
      {"detector",
       {{"octaves", [&](const Json& v) { c.detector.octaves = v.get<int>(); }},
        {"layers_per_octave", [&](const Json& v) { c.detector.layers_per_octave = v.get<int>(); }},
        {"initial_filter_size", [&](const Json& v) { c.detector.initial_filter_size = v.get<int>(); }},
        {"response_threshold", [&](const Json& v) { c.detector.response_threshold = v.get<double>(); }},
        {"sampling_step", [&](const Json& v) { c.detector.sampling_step = v.get<int>(); }}}},
      {"matcher",
       {{"ratio_threshold", [&](const Json& v) { c.matcher.ratio_threshold = v.get<double>(); }},
        {"use_laplacian_prefilter", [&](const Json& v) { c.matcher.use_laplacian_prefilter = v.get<bool>(); }},
        {"cross_check", [&](const Json& v) { c.matcher.cross_check = v.get<bool>(); }}}},
      {"ransac",
       {{"iterations", [&](const Json& v) { c.ransac.iterations = v.get<int>(); }},
        {"inlier_tolerance", [&](const Json& v) { c.ransac.inlier_tolerance = v.get<double>(); }},
        {"min_matches", [&](const Json& v) { c.ransac.min_matches = v.get<std::size_t>(); }},
        {"min_inlier_fraction", [&](const Json& v) { c.ransac.min_inlier_fraction = v.get<double>(); }},
        {"rng_seed", [&](const Json& v) { c.ransac.rng_seed = v.get<std::uint64_t>(); }}}},
      {"stitcher",
       {{"max_perpendicular_drift", [&](const Json& v) { c.max_perpendicular_drift = v.get<int>(); }},
        {"detection_band", [&](const Json& v) { c.detection_band = v.get<double>(); }},
        {"feather", [&](const Json& v) { c.feather = v.get<bool>(); }}}},
      {"camera",
       {{"frame_width", [&](const Json& v) { c.camera.frame_width = v.get<int>(); }},
        {"frame_height", [&](const Json& v) { c.camera.frame_height = v.get<int>(); }}}},
      {"flight",
       {{"columns", [&](const Json& v) { c.flight.columns = v.get<int>(); }},
        {"rows", [&](const Json& v) { c.flight.rows = v.get<int>(); }},
        {"overlap_x", [&](const Json& v) { c.flight.overlap_x = v.get<double>(); }},
        {"overlap_y", [&](const Json& v) { c.flight.overlap_y = v.get<double>(); }},
        {"jitter_sigma", [&](const Json& v) { c.flight.jitter_sigma = v.get<double>(); }},
        {"brightness_drift", [&](const Json& v) { c.flight.brightness_drift = v.get<double>(); }},
        {"rng_seed", [&](const Json& v) { c.flight.rng_seed = v.get<std::uint64_t>(); }},
        {"first_leg", [&](const Json& v) { c.flight.first_leg = parse_direction(v.get<std::string>()); }}}},
  };

  if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
  for (const auto& [group, values] : j.items()) {
    const auto g = fields.find(group);
    if (g == fields.end()) throw Error(Errc::InvalidConfig, "unknown config group '" + group + "'");
    if (!values.is_object()) throw Error(Errc::InvalidConfig, "config group '" + group + "' must be an object");
    for (const auto& [key, value] : values.items()) {
      const auto f = g->second.find(key);
      if (f == g->second.end()) throw Error(Errc::InvalidConfig, "unknown config key '" + group + "." + key + "'");
      try {
        f->second(value);
      } catch (const nlohmann::json::exception&) {
        throw Error(Errc::InvalidConfig, "config key '" + group + "." + key + "' has the wrong type");
      }
    }
  }
  c.validate();
  return c;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::CorruptFile, path.string() + ": " + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create '" + path.string() + "'");
  out << dump_json(j);
  if (!out) throw Error(Errc::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace dronemap
