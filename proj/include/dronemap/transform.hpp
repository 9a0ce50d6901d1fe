#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dronemap/features.hpp"
#include "dronemap/matching.hpp"

namespace dronemap {

// Position of frame B's origin in frame A's coordinates: p_a = p_b + t.
struct Translation2D {
  double tx = 0.0;
  double ty = 0.0;

  friend bool operator==(const Translation2D&, const Translation2D&) = default;
};

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

struct RansacParams {
  int iterations = 200;
  double inlier_tolerance = 2.0;
  std::size_t min_matches = 4;
  double min_inlier_fraction = 0.25;
  std::uint64_t rng_seed = 0x5EED;

  void validate() const;
};

struct TransformEstimate {
  Translation2D translation;
  std::vector<std::size_t> inlier_indices;  // indices into the match list, ascending
  double inlier_rms = 0.0;
};

// Per-match norm of (p_a - p_b) - t.
std::vector<double> displacement_residuals(std::span<const Point2D> points_a, std::span<const Point2D> points_b,
                                           std::span<const Match> matches, const Translation2D& t);

// One-point RANSAC for a pure translation. Sample k draws match index
// SplitMix64(rng_seed).below(|matches|). The best hypothesis has the most
// inliers, then the lower inlier RMS, then the earlier sample. It is refined
// to the mean inlier displacement and the inlier set recomputed once.
TransformEstimate estimate_translation(std::span<const Point2D> points_a, std::span<const Point2D> points_b,
                                       std::span<const Match> matches, const RansacParams& params);

std::vector<Point2D> feature_positions(std::span<const Feature> features);

}  // namespace dronemap
