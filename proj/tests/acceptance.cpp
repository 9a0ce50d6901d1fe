// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every tolerance and runtime limit is a constant in this file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dronemap/features.hpp"
#include "dronemap/flightsim.hpp"
#include "dronemap/image_io.hpp"
#include "dronemap/interchange.hpp"
#include "dronemap/matching.hpp"
#include "dronemap/random.hpp"
#include "dronemap/stitcher.hpp"
#include "dronemap/transform.hpp"
#include "oracles.hpp"

using namespace dronemap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("dronemap_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// PNG encoding of an image, through the same writer the CLI uses.
std::string png_bytes(const RgbImage& img, const std::string& name) {
  const fs::path p = scratch_dir() / (name + ".png");
  save_image(img, p);
  return file_bytes(p);
}

// ---- 1. integral image -----------------------------------------------------

constexpr int kBoxTrials = 1000;

Outcome box_sum_exactness() {
  SplitMix64 rng(1);
  int exact = 0;
  for (int t = 0; t < kBoxTrials; ++t) {
    const int w = 1 + static_cast<int>(rng.below(96)), h = 1 + static_cast<int>(rng.below(96));
    const GrayImage img = oracle::random_integer_image(w, h, rng);
    const IntegralImage ii(img);
    const int x = static_cast<int>(rng.below(w)), y = static_cast<int>(rng.below(h));
    const int rw = 1 + static_cast<int>(rng.below(w - x)), rh = 1 + static_cast<int>(rng.below(h - y));
    if (ii.box_sum(x, y, rw, rh) == oracle::naive_box_sum(img, x, y, rw, rh)) ++exact;
  }
  return {exact == kBoxTrials, fmt("%d/%d exact", exact, kBoxTrials)};
}

// ---- 2. detector fidelity --------------------------------------------------

constexpr int kBlobImages = 20;
constexpr double kBlobCenterTolerance = 1.5;  // px
constexpr int kArgmaxTolerance = 1;           // samples
// The smallest middle layer of the ladder (filter 15) puts a floor under the
// detectable blob size: below sigma ~2.2 the response peaks at filter 9, which
// has no lower neighbour to be a 3x3x3 maximum against. Blobs are drawn from
// the detectable range with some headroom.
constexpr double kMinBlobSigma = 2.5;
constexpr double kMaxBlobSigma = 5.0;

Outcome detector_fidelity() {
  SplitMix64 rng(2);
  const int sizes[] = {9, 15, 21, 27, 39, 51};
  int located = 0, argmax_ok = 0;
  double worst_center = 0.0;
  int worst_argmax = 0;
  for (int k = 0; k < kBlobImages; ++k) {
    const double sigma = rng.uniform(kMinBlobSigma, kMaxBlobSigma);
    const double cx = rng.uniform(60.0, 68.0), cy = rng.uniform(60.0, 68.0);
    const double amplitude = (rng.below(2) ? 1.0 : -1.0) * rng.uniform(80.0, 180.0);
    const GrayImage img = oracle::gaussian_blob(128, 128, cx, cy, sigma, amplitude, 128.0 - amplitude / 2.0);
    const IntegralImage ii(img);

    const auto points = detect_interest_points(ii, DetectorParams{});
    if (!points.empty()) {
      const double d = std::hypot(points.front().x - cx, points.front().y - cy);
      worst_center = std::max(worst_center, d);
      if (d <= kBlobCenterTolerance) ++located;
    } else {
      worst_center = std::numeric_limits<double>::infinity();
    }

    // Filter whose Gaussian-equivalent scale is nearest the blob's.
    const int L = *std::min_element(std::begin(sizes), std::end(sizes), [&](int a, int b) {
      return std::abs(1.2 * a / 9.0 - sigma) < std::abs(1.2 * b / 9.0 - sigma);
    });
    const HessianResponseMap m = hessian_response(ii, L);
    const int x0 = static_cast<int>(cx) - 6, y0 = static_cast<int>(cy) - 6;
    const int x1 = x0 + 12, y1 = y0 + 12;
    int bi = x0, bj = y0;
    double best = -std::numeric_limits<double>::infinity();
    for (int j = y0; j <= y1; ++j) {
      for (int i = x0; i <= x1; ++i) {
        if (m.valid(i, j) && m.response(i, j) > best) {
          best = m.response(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const auto [ex, ey] = oracle::exact_hessian_argmax(img, 1.2 * L / 9.0, x0, y0, x1, y1);
    const int off = std::max(std::abs(bi - ex), std::abs(bj - ey));
    worst_argmax = std::max(worst_argmax, off);
    if (off <= kArgmaxTolerance) ++argmax_ok;
  }
  return {located == kBlobImages && argmax_ok == kBlobImages,
          fmt("center %d/%d (worst %.3f px), argmax %d/%d (worst %d)", located, kBlobImages, worst_center, argmax_ok,
              kBlobImages, worst_argmax)};
}

// ---- 3. translation equivariance ------------------------------------------

constexpr double kCorrespondenceTolerance = 0.5;  // px
constexpr double kMinCorrespondence = 0.90;
constexpr double kMinMatchCorrectness = 0.90;
constexpr double kEquivarianceRatio = 0.8;
// Points this close to a border see different content in the two images:
// half the largest filter in the ladder plus one coarse sampling step.
constexpr double kInteriorMargin = 110.0;

GrayImage integer_gray(const RgbImage& img) {
  GrayImage g = to_grayscale(img);
  for (double& v : g.pixels()) v = std::round(v);
  return g;
}

Outcome translation_equivariance() {
  struct Shift {
    int tx, ty;
    std::uint64_t seed;
  };
  const Shift shifts[] = {{24, 16, 31}, {-13, 7, 32}, {5, -29, 33}};
  const int W = 720, H = 560;
  std::size_t interior = 0, corresponded = 0, matches_total = 0, matches_correct = 0;
  for (const auto& s : shifts) {
    const GrayImage big = integer_gray(procedural_scene(W + 80, H + 80, s.seed));
    // b is a with its content moved by (tx, ty): b(x + tx, y + ty) = a(x, y).
    const GrayImage a = crop(big, Rect{40, 40, W, H});
    const GrayImage b = crop(big, Rect{40 - s.tx, 40 - s.ty, W, H});
    const auto fa = extract_features(a, DetectorParams{});
    const auto fb = extract_features(b, DetectorParams{});

    auto inside = [&](double x, double y) {
      return x >= kInteriorMargin && y >= kInteriorMargin && x <= W - kInteriorMargin && y <= H - kInteriorMargin;
    };
    auto near = [&](const InterestPoint& p, const InterestPoint& q) {
      return std::abs(q.x - (p.x + s.tx)) <= kCorrespondenceTolerance &&
             std::abs(q.y - (p.y + s.ty)) <= kCorrespondenceTolerance;
    };
    for (std::size_t i = 0; i < fa.size(); ++i) {
      const auto& p = fa[i].point;
      if (!inside(p.x, p.y) || !inside(p.x + s.tx, p.y + s.ty)) continue;
      ++interior;
      // One-to-one: exactly one partner in b, and that partner has exactly one in a.
      std::size_t hits = 0, partner = 0;
      for (std::size_t j = 0; j < fb.size(); ++j) {
        if (near(p, fb[j].point)) {
          ++hits;
          partner = j;
        }
      }
      if (hits != 1) continue;
      std::size_t back = 0;
      for (const auto& f : fa) {
        if (near(f.point, fb[partner].point)) ++back;
      }
      if (back == 1) ++corresponded;
    }

    MatchParams mp;
    mp.ratio_threshold = kEquivarianceRatio;
    for (const auto& m : match_descriptors(fa, fb, mp)) {
      ++matches_total;
      if (near(fa[m.query_index].point, fb[m.train_index].point)) ++matches_correct;
    }
  }
  const double corr = interior ? static_cast<double>(corresponded) / interior : 0.0;
  const double correct = matches_total ? static_cast<double>(matches_correct) / matches_total : 0.0;
  return {interior > 0 && corr >= kMinCorrespondence && correct >= kMinMatchCorrectness,
          fmt("correspondence %.3f (%zu/%zu), match correctness %.3f (%zu/%zu)", corr, corresponded, interior, correct,
              matches_correct, matches_total)};
}

// ---- 4. robust estimation --------------------------------------------------

constexpr int kRansacTrials = 100;
constexpr double kOutlierShare = 0.30;
constexpr int kMatchesPerSet = 100;
constexpr double kInlierNoise = 0.5;          // px, per coordinate
constexpr double kTranslationTolerance = 1.0;  // px
constexpr double kNoiselessTolerance = 1e-9;   // px, for real-valued coordinates

struct MatchSet {
  std::vector<Point2D> a, b;
  std::vector<Match> matches;
  Translation2D truth;
};

MatchSet make_set(SplitMix64& rng, double noise, bool integer_coords) {
  MatchSet s;
  s.truth = integer_coords ? Translation2D{std::round(rng.uniform(-300, 300)), std::round(rng.uniform(-300, 300))}
                           : Translation2D{rng.uniform(-300, 300), rng.uniform(-300, 300)};
  const int outliers = static_cast<int>(std::lround(kOutlierShare * kMatchesPerSet));
  for (int k = 0; k < kMatchesPerSet; ++k) {
    Point2D pb{rng.uniform(0, 640), rng.uniform(0, 480)};
    if (integer_coords) pb = {std::round(pb.x), std::round(pb.y)};
    Point2D pa;
    if (k < kMatchesPerSet - outliers) {
      pa = {pb.x + s.truth.tx + noise * rng.normal(), pb.y + s.truth.ty + noise * rng.normal()};
    } else {
      pa = {rng.uniform(-300, 940), rng.uniform(-300, 780)};
      if (integer_coords) pa = {std::round(pa.x), std::round(pa.y)};
    }
    s.a.push_back(pa);
    s.b.push_back(pb);
    s.matches.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>(k), 0.0, 0.0});
  }
  return s;
}

struct RansacRun {
  int noisy_ok = 0, noiseless_ok = 0, integer_exact = 0;
  double worst_noisy = 0.0, worst_noiseless = 0.0;
  std::string json;  // every estimate, for the determinism check
};

RansacRun run_ransac_trials() {
  RansacRun r;
  Json all = Json::array();
  for (int t = 0; t < kRansacTrials; ++t) {
    SplitMix64 rng(4000 + t);
    RansacParams params;
    params.rng_seed = 400 + t;
    for (int kind = 0; kind < 3; ++kind) {
      const MatchSet s = make_set(rng, kind == 0 ? kInlierNoise : 0.0, kind == 2);
      try {
        const TransformEstimate e = estimate_translation(s.a, s.b, s.matches, params);
        const double err = std::hypot(e.translation.tx - s.truth.tx, e.translation.ty - s.truth.ty);
        if (kind == 0) {
          r.worst_noisy = std::max(r.worst_noisy, err);
          if (err <= kTranslationTolerance) ++r.noisy_ok;
        } else if (kind == 1) {
          r.worst_noiseless = std::max(r.worst_noiseless, err);
          if (err <= kNoiselessTolerance) ++r.noiseless_ok;
        } else if (e.translation == s.truth) {
          ++r.integer_exact;
        }
        all.push_back(estimate_to_json(e));
      } catch (const Error& e) {
        all.push_back(e.what());
        if (kind == 0) r.worst_noisy = std::numeric_limits<double>::infinity();
      }
    }
  }
  r.json = dump_json(all);
  return r;
}

Outcome robust_estimation(const RansacRun& r) {
  return {r.noisy_ok == kRansacTrials && r.noiseless_ok == kRansacTrials && r.integer_exact == kRansacTrials,
          fmt("noisy %d/%d within %.1f px (worst %.3f), noiseless %d/%d (worst %.1e), integer bit-exact %d/%d",
              r.noisy_ok, kRansacTrials, kTranslationTolerance, r.worst_noisy, r.noiseless_ok, kRansacTrials,
              r.worst_noiseless, r.integer_exact, kRansacTrials)};
}

// ---- 5. pairwise stitch ----------------------------------------------------

constexpr double kPairOverlap = 0.40;

struct PairRun {
  bool vertical_exact = false, horizontal_exact = false;
  std::string vertical_png, horizontal_png, reports_json;
};

PairRun run_pairs() {
  PairRun out;
  Json reports = Json::array();
  const RgbImage scene = procedural_scene(1400, 1100, 5);
  for (int axis = 0; axis < 2; ++axis) {
    FlightConfig fc;
    fc.columns = axis == 0 ? 1 : 2;
    fc.rows = axis == 0 ? 2 : 1;
    fc.overlap_x = kPairOverlap;
    fc.overlap_y = kPairOverlap;
    const Flight flight = generate_flight(scene, CameraConfig{}, fc);
    const StitchDirection dir = axis == 0 ? StitchDirection::BottomToTop : StitchDirection::LeftToRight;
    try {
      const PairResult r = stitch_pair(flight.frames[0], flight.frames[1], dir, StitchParams{});
      const auto& p0 = flight.poses[0];
      const auto& p1 = flight.poses[1];
      const int x0 = std::min(p0.x, p1.x), y0 = std::min(p0.y, p1.y);
      const Rect truth{x0, y0, std::max(p0.x, p1.x) + 640 - x0, std::max(p0.y, p1.y) + 480 - y0};
      const bool exact = r.image == crop(scene, truth);
      StitchReport rep;
      rep.pairs.push_back(r.report);
      rep.width = r.image.width();
      rep.height = r.image.height();
      reports.push_back(report_to_json(rep));
      (axis == 0 ? out.vertical_exact : out.horizontal_exact) = exact;
      (axis == 0 ? out.vertical_png : out.horizontal_png) = png_bytes(r.image, axis == 0 ? "pair_v" : "pair_h");
    } catch (const Error& e) {
      reports.push_back(e.what());
    }
  }
  out.reports_json = dump_json(reports);
  return out;
}

Outcome pairwise_exactness(const PairRun& r) {
  return {r.vertical_exact && r.horizontal_exact,
          fmt("vertical %s, horizontal %s", r.vertical_exact ? "identical" : "DIFFERS",
              r.horizontal_exact ? "identical" : "DIFFERS")};
}

// ---- 6 and 7. end-to-end mosaic and purity ---------------------------------

constexpr double kJitterSigma = 3.0;
constexpr std::uint64_t kFlightSeed = 7;
constexpr int kSceneMargin = 64;
constexpr double kMaxInteriorMae = 5.0;  // gray levels
constexpr double kMinCoverage = 0.98;
constexpr double kMaxSeamError = 2.0;  // px

struct MosaicRun {
  bool ok = false;
  bool identical = false;  // only meaningful without jitter
  Metrics metrics;
  long long unowned = 0, multiply_owned = 0, mismatched = 0;
  std::string png, report_json, metrics_json;
  std::string error;
};

MosaicRun run_mosaic(double jitter) {
  MosaicRun out;
  FlightConfig fc;
  fc.jitter_sigma = jitter;
  fc.rng_seed = kFlightSeed;
  const CameraConfig cam;
  const SceneExtent need = required_scene_extent(cam, fc);
  const RgbImage scene = procedural_scene(need.width + 2 * kSceneMargin, need.height + 2 * kSceneMargin, kFlightSeed);
  const Flight flight = generate_flight(scene, cam, fc);
  const auto frames = flight.frames_in_plan_order();
  StitchParams params;
  params.ransac.rng_seed = kFlightSeed;
  const SequenceResult r = build_mosaic(flight.plan, frames, params);
  if (!r.report.ok()) {
    out.error = r.report.failures.front().message;
    return out;
  }
  out.ok = true;
  const RgbImage& img = r.composite.image;

  // Provenance: each pixel has exactly one owning frame and carries that frame's pixel.
  std::vector<int> owners(static_cast<std::size_t>(img.width()) * img.height(), 0);
  for (const auto& piece : r.composite.layout) {
    for (int v = piece.visible.y; v < piece.visible.y + piece.visible.h; ++v) {
      for (int u = piece.visible.x; u < piece.visible.x + piece.visible.w; ++u) {
        ++owners[static_cast<std::size_t>(v) * img.width() + u];
        const SourcePixel s = source_pixel(piece, u, v);
        if (img(u, v) != frames[piece.frame](s.x, s.y)) ++out.mismatched;
      }
    }
  }
  for (int n : owners) {
    if (n == 0) ++out.unowned;
    if (n > 1) ++out.multiply_owned;
  }

  StitchReport report = r.report;
  report.layout = r.composite.layout;
  out.metrics = evaluate_mosaic(img, scene, flight.poses, &flight.plan, &report);
  if (jitter == 0.0) {
    int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = 0, y1 = 0;
    for (const auto& p : flight.poses) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x + cam.frame_width);
      y1 = std::max(y1, p.y + cam.frame_height);
    }
    out.identical = img == crop(scene, Rect{x0, y0, x1 - x0, y1 - y0});
  }
  out.png = png_bytes(img, jitter == 0.0 ? "mosaic_still" : "mosaic_jitter");
  out.report_json = dump_json(report_to_json(report));
  out.metrics_json = dump_json(metrics_to_json(out.metrics));
  return out;
}

Outcome end_to_end(const MosaicRun& still, const MosaicRun& jittered) {
  if (!still.ok || !jittered.ok) {
    return {false, "stitch failed: " + (still.ok ? jittered.error : still.error)};
  }
  const Metrics& m = jittered.metrics;
  const double worst_seam = m.seam_errors.empty() ? 0.0 : *std::max_element(m.seam_errors.begin(), m.seam_errors.end());
  const bool pass = still.identical && m.interior_mae <= kMaxInteriorMae && m.coverage >= kMinCoverage &&
                    worst_seam <= kMaxSeamError && m.seam_errors.size() == 15;
  return {pass, fmt("zero-jitter %s; sigma %.0f: interior MAE %.3f, coverage %.4f, worst seam %.3f px over %zu seams",
                    still.identical ? "identical" : "DIFFERS", kJitterSigma, m.interior_mae, m.coverage, worst_seam,
                    m.seam_errors.size())};
}

Outcome purity(const MosaicRun& still, const MosaicRun& jittered) {
  if (!still.ok || !jittered.ok) return {false, "no mosaic to inspect"};
  const long long filler = still.unowned + still.multiply_owned + still.mismatched + jittered.unowned +
                           jittered.multiply_owned + jittered.mismatched;
  return {filler == 0, fmt("%lld unowned, %lld multiply owned, %lld not from their frame", still.unowned +
                           jittered.unowned, still.multiply_owned + jittered.multiply_owned,
                           still.mismatched + jittered.mismatched)};
}

// ---- 8. determinism --------------------------------------------------------

Outcome determinism(const RansacRun& r1, const PairRun& p1, const MosaicRun& s1, const MosaicRun& j1) {
  const RansacRun r2 = run_ransac_trials();
  const PairRun p2 = run_pairs();
  const MosaicRun s2 = run_mosaic(0.0);
  const MosaicRun j2 = run_mosaic(kJitterSigma);
  int differing = 0;
  auto same = [&](const std::string& a, const std::string& b) {
    if (a.empty() || a != b) ++differing;
  };
  same(r1.json, r2.json);
  same(p1.reports_json, p2.reports_json);
  same(p1.vertical_png, p2.vertical_png);
  same(p1.horizontal_png, p2.horizontal_png);
  for (const auto& [first, again] : {std::pair{&s1, &s2}, std::pair{&j1, &j2}}) {
    same(first->png, again->png);
    same(first->report_json, again->report_json);
    same(first->metrics_json, again->metrics_json);
  }
  return {differing == 0, fmt("%d of 10 artifacts differ between repeats", differing)};
}

// ---- driver ----------------------------------------------------------------

bool report(int number, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = elapsed < limit_s;
  const bool pass = o.pass && in_time;
  std::printf("%s criterion %d: %s | %s | %.2f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", number, name,
              o.detail.c_str(), elapsed, limit_s, in_time ? "" : ", EXCEEDED");
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  bool all = true;
  all &= report(1, "box_sum exact on integer images", 5, box_sum_exactness);
  all &= report(2, "detector fidelity on Gaussian blobs", 30, detector_fidelity);
  all &= report(3, "translation equivariance", 30, translation_equivariance);

  RansacRun ransac;
  all &= report(4, "robust translation with 30% outliers", 10, [&] {
    ransac = run_ransac_trials();
    return robust_estimation(ransac);
  });
  PairRun pairs;
  all &= report(5, "pairwise stitch equals ground-truth union", 10, [&] {
    pairs = run_pairs();
    return pairwise_exactness(pairs);
  });
  MosaicRun still, jittered;
  all &= report(6, "4x4 mosaic end to end", 120, [&] {
    still = run_mosaic(0.0);
    jittered = run_mosaic(kJitterSigma);
    return end_to_end(still, jittered);
  });
  // Inspects the mosaics built for criterion 6.
  all &= report(7, "no filler pixels", 10, [&] { return purity(still, jittered); });
  // Reruns criteria 4 to 6, so its budget is the sum of theirs.
  all &= report(8, "byte-identical repeats", 140, [&] { return determinism(ransac, pairs, still, jittered); });

  fs::remove_all(scratch_dir());
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
