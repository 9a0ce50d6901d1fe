#include "dronemap/transform.hpp"

#include <cmath>
#include <string>

#include "dronemap/random.hpp"

namespace dronemap {

void RansacParams::validate() const {
  if (iterations < 1) throw Error(Errc::InvalidConfig, "ransac.iterations must be >= 1");
  if (!(inlier_tolerance > 0.0)) throw Error(Errc::InvalidConfig, "ransac.inlier_tolerance must be > 0");
  if (min_matches < 1) throw Error(Errc::InvalidConfig, "ransac.min_matches must be >= 1");
  if (!(min_inlier_fraction >= 0.0 && min_inlier_fraction <= 1.0)) {
    throw Error(Errc::InvalidConfig, "ransac.min_inlier_fraction must be in [0, 1]");
  }
}

namespace {

Point2D displacement(std::span<const Point2D> a, std::span<const Point2D> b, const Match& m) {
  if (m.query_index >= a.size() || m.train_index >= b.size()) {
    throw Error(Errc::IndexOutOfRange, "match refers to a point outside the point lists");
  }
  return {a[m.query_index].x - b[m.train_index].x, a[m.query_index].y - b[m.train_index].y};
}

struct Consensus {
  Translation2D hypothesis;
  std::vector<std::size_t> inliers;
  double rms = 0.0;
};

Consensus score(std::span<const Point2D> displacements, const Translation2D& t, double tolerance) {
  Consensus c;
  c.hypothesis = t;
  double sq = 0.0;
  for (std::size_t k = 0; k < displacements.size(); ++k) {
    const double ex = displacements[k].x - t.tx;
    const double ey = displacements[k].y - t.ty;
    const double r2 = ex * ex + ey * ey;
    if (std::sqrt(r2) <= tolerance) {
      c.inliers.push_back(k);
      sq += r2;
    }
  }
  c.rms = c.inliers.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(c.inliers.size()));
  return c;
}

}  // namespace

std::vector<double> displacement_residuals(std::span<const Point2D> points_a, std::span<const Point2D> points_b,
                                           std::span<const Match> matches, const Translation2D& t) {
  std::vector<double> out;
  out.reserve(matches.size());
  for (const Match& m : matches) {
    const Point2D d = displacement(points_a, points_b, m);
    out.push_back(std::hypot(d.x - t.tx, d.y - t.ty));
  }
  return out;
}

TransformEstimate estimate_translation(std::span<const Point2D> points_a, std::span<const Point2D> points_b,
                                       std::span<const Match> matches, const RansacParams& params) {
  params.validate();
  if (matches.size() < params.min_matches) {
    throw Error(Errc::InsufficientMatches, std::to_string(matches.size()) + " matches, need at least " +
                                               std::to_string(params.min_matches));
  }

  std::vector<Point2D> displacements;
  displacements.reserve(matches.size());
  for (const Match& m : matches) displacements.push_back(displacement(points_a, points_b, m));

  SplitMix64 rng(params.rng_seed);
  Consensus best;
  bool have_best = false;
  for (int it = 0; it < params.iterations; ++it) {
    const Point2D& d = displacements[rng.below(displacements.size())];
    Consensus c = score(displacements, {d.x, d.y}, params.inlier_tolerance);
    if (!have_best || c.inliers.size() > best.inliers.size() ||
        (c.inliers.size() == best.inliers.size() && c.rms < best.rms)) {
      best = std::move(c);
      have_best = true;
    }
  }

  // Mean inlier displacement, accumulated as deviations from the hypothesis so
  // that identical displacements reproduce the hypothesis bit-exactly.
  double mean_dx = 0.0;
  double mean_dy = 0.0;
  for (std::size_t k : best.inliers) {
    mean_dx += displacements[k].x - best.hypothesis.tx;
    mean_dy += displacements[k].y - best.hypothesis.ty;
  }
  const auto n = static_cast<double>(best.inliers.size());
  const Translation2D refined{best.hypothesis.tx + mean_dx / n, best.hypothesis.ty + mean_dy / n};

  Consensus final_set = score(displacements, refined, params.inlier_tolerance);
  const double fraction = static_cast<double>(final_set.inliers.size()) / static_cast<double>(matches.size());
  if (final_set.inliers.size() < params.min_matches || fraction < params.min_inlier_fraction) {
    throw Error(Errc::NoConsensus, std::to_string(final_set.inliers.size()) + " of " +
                                       std::to_string(matches.size()) + " matches agree on a translation");
  }
  return {refined, std::move(final_set.inliers), final_set.rms};
}

std::vector<Point2D> feature_positions(std::span<const Feature> features) {
  std::vector<Point2D> out;
  out.reserve(features.size());
  for (const Feature& f : features) out.push_back({f.point.x, f.point.y});
  return out;
}

}  // namespace dronemap
