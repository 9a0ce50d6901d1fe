#include "dronemap/stitcher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dronemap {

SourcePixel source_pixel(const FramePiece& piece, int u, int v) {
  int x = u - piece.footprint.x;
  int y = v - piece.footprint.y;
  rotate_point(piece.footprint.w, piece.footprint.h, (4 - piece.turns % 4) % 4, x, y);
  return {x, y};
}

Composite Composite::from_frame(const RgbImage& frame, int frame_id) {
  FramePiece piece;
  piece.frame = frame_id;
  piece.frame_width = frame.width();
  piece.frame_height = frame.height();
  piece.footprint = frame.bounds();
  piece.visible = frame.bounds();
  return {frame, {piece}};
}

Composite crop(const Composite& c, const Rect& r) {
  Composite out{crop(c.image, r), c.layout};
  for (auto& piece : out.layout) {
    const Rect v = intersect(piece.visible, r);
    piece.visible = v.empty() ? Rect{} : Rect{v.x - r.x, v.y - r.y, v.w, v.h};
    piece.footprint.x -= r.x;
    piece.footprint.y -= r.y;
  }
  return out;
}

Composite rotate_quarter(const Composite& c, int turns) {
  turns = ((turns % 4) + 4) % 4;
  Composite out{rotate_quarter(c.image, turns), c.layout};
  for (auto& piece : out.layout) {
    piece.footprint = rotate_rect(piece.footprint, c.image.width(), c.image.height(), turns);
    if (!piece.visible.empty()) piece.visible = rotate_rect(piece.visible, c.image.width(), c.image.height(), turns);
    piece.turns = (piece.turns + turns) % 4;
  }
  return out;
}

Composite concat(const Composite& top_or_left, const Composite& bottom_or_right, StitchDirection dir) {
  Composite out{concat(top_or_left.image, bottom_or_right.image, dir), top_or_left.layout};
  const int shift_x = is_vertical(dir) ? 0 : top_or_left.image.width();
  const int shift_y = is_vertical(dir) ? top_or_left.image.height() : 0;
  for (FramePiece piece : bottom_or_right.layout) {
    piece.footprint.x += shift_x;
    piece.footprint.y += shift_y;
    if (!piece.visible.empty()) {
      piece.visible.x += shift_x;
      piece.visible.y += shift_y;
    }
    out.layout.push_back(piece);
  }
  return out;
}

int round_pixel(double v) { return static_cast<int>(std::lround(v)); }

namespace {

// Quarter turns that bring `dir` to BottomToTop: B above A.
int canonical_turns(StitchDirection dir) {
  switch (dir) {
    case StitchDirection::BottomToTop: return 0;
    case StitchDirection::TopToBottom: return 2;
    case StitchDirection::LeftToRight: return 3;
    case StitchDirection::RightToLeft: return 1;
  }
  return 0;
}

Rect band_rect(int width_a, int height_a, int width_b, int height_b, StitchDirection dir, double factor) {
  if (is_vertical(dir)) {
    const int band = std::min(height_a, static_cast<int>(std::ceil(factor * height_b)));
    return dir == StitchDirection::BottomToTop ? Rect{0, 0, width_a, band} : Rect{0, height_a - band, width_a, band};
  }
  const int band = std::min(width_a, static_cast<int>(std::ceil(factor * width_b)));
  return dir == StitchDirection::RightToLeft ? Rect{0, 0, band, height_a} : Rect{width_a - band, 0, band, height_a};
}

void feather_strip(RgbImage& out, const RgbImage& a, int a_x0, int first_row, int rows) {
  for (int j = 0; j < rows; ++j) {
    // Weight of A grows toward the seam at the bottom of the strip.
    const double alpha = (j + 0.5) / rows;
    for (int i = 0; i < out.width(); ++i) {
      Rgb& o = out(i, first_row + j);
      const Rgb& s = a(a_x0 + i, j);
      auto mix = [alpha](std::uint8_t b_val, std::uint8_t a_val) {
        return static_cast<std::uint8_t>(std::lround((1.0 - alpha) * b_val + alpha * a_val));
      };
      o = Rgb{mix(o.r, s.r), mix(o.g, s.g), mix(o.b, s.b)};
    }
  }
}

}  // namespace

OverlapRegions compute_overlap(int width_a, int height_a, int width_b, int height_b, const Translation2D& t,
                               StitchDirection dir) {
  const int dx = round_pixel(t.tx);
  const int dy = round_pixel(t.ty);
  const Rect a{0, 0, width_a, height_a};
  const Rect b{dx, dy, width_b, height_b};
  const Rect in_a = intersect(a, b);
  if (in_a.empty()) {
    throw Error(Errc::NoOverlap, "frames do not intersect at translation (" + std::to_string(dx) + ", " +
                                     std::to_string(dy) + ")");
  }
  if (rotate_rect(b, width_a, height_a, canonical_turns(dir)).y > 0) {
    throw Error(Errc::DirectionMismatch, std::string("new frame does not reach the ") + direction_name(dir) +
                                             " stitch edge");
  }
  return {in_a, Rect{in_a.x - dx, in_a.y - dy, in_a.w, in_a.h}, t};
}

void StitchParams::validate() const {
  detector.validate();
  matcher.validate();
  ransac.validate();
  if (max_perpendicular_drift < 0) throw Error(Errc::InvalidConfig, "stitcher.max_perpendicular_drift must be >= 0");
  if (!(detection_band > 0.0)) throw Error(Errc::InvalidConfig, "stitcher.detection_band must be > 0");
}

Composite compose_pair(const Composite& a, const Composite& b, const Translation2D& t, StitchDirection dir,
                       const StitchParams& params, int* seam) {
  const int wa = a.image.width(), ha = a.image.height();
  const int wb = b.image.width(), hb = b.image.height();
  compute_overlap(wa, ha, wb, hb, t, dir);

  const int dx = round_pixel(t.tx);
  const int dy = round_pixel(t.ty);
  const int perpendicular = is_vertical(dir) ? dx : dy;
  if (std::abs(perpendicular) > params.max_perpendicular_drift) {
    throw Error(Errc::ExcessiveDrift, "perpendicular shift of " + std::to_string(perpendicular) + " px exceeds " +
                                          std::to_string(params.max_perpendicular_drift) + " px");
  }

  // Work in the BottomToTop orientation, then turn back.
  const int turns = canonical_turns(dir);
  const Rect placed = rotate_rect(Rect{dx, dy, wb, hb}, wa, ha, turns);
  const Composite ra = rotate_quarter(a, turns);
  const Composite rb = rotate_quarter(b, turns);

  const int x0 = std::max(0, placed.x);
  const int x1 = std::min(ra.image.width(), placed.x + rb.image.width());
  const int cut = std::min(ra.image.height(), placed.y + rb.image.height());
  const Composite b_part = crop(rb, Rect{x0 - placed.x, 0, x1 - x0, rb.image.height()});
  const Composite a_rest = crop(ra, Rect{x0, cut, x1 - x0, ra.image.height() - cut});
  Composite out = concat(b_part, a_rest, StitchDirection::BottomToTop);

  if (params.feather && cut > 0) {
    feather_strip(out.image, crop(ra.image, Rect{0, 0, ra.image.width(), cut}), x0, -placed.y, cut);
  }

  Rect seam_line{0, rb.image.height(), out.image.width(), 0};
  const int back = (4 - turns) % 4;
  seam_line = rotate_rect(seam_line, out.image.width(), out.image.height(), back);
  if (seam) *seam = is_vertical(dir) ? seam_line.y : seam_line.x;
  return rotate_quarter(out, back);
}

PairEstimate estimate_pair(const RgbImage& a, const RgbImage& b, StitchDirection dir, const StitchParams& params) {
  const Rect band = band_rect(a.width(), a.height(), b.width(), b.height(), dir, params.detection_band);
  std::vector<Feature> features_a = extract_features(to_grayscale(a, band), params.detector);
  for (auto& f : features_a) {
    f.point.x += band.x;
    f.point.y += band.y;
  }
  const std::vector<Feature> features_b = extract_features(to_grayscale(b), params.detector);
  if (features_a.empty() || features_b.empty()) {
    throw Error(Errc::InsufficientMatches, "no interest points in one of the frames");
  }
  const auto matches = match_descriptors(features_a, features_b, params.matcher);
  const auto pos_a = feature_positions(features_a);
  const auto pos_b = feature_positions(features_b);
  return {estimate_translation(pos_a, pos_b, matches, params.ransac), matches.size()};
}

namespace {

// Estimates and composes one pair, filling the measured fields of `report`.
Composite stitch_composites(const Composite& a, const Composite& b, StitchDirection dir, const StitchParams& params,
                            PairReport& report) {
  const PairEstimate est = estimate_pair(a.image, b.image, dir, params);
  Composite out = compose_pair(a, b, est.estimate.translation, dir, params, &report.seam);
  report.matches = est.matches;
  report.inliers = est.estimate.inlier_indices.size();
  report.inlier_rms = est.estimate.inlier_rms;
  report.tx = est.estimate.translation.tx;
  report.ty = est.estimate.translation.ty;
  return out;
}

// Folds parts[0..n) along dir. labels[k] names part k in the report.
SequenceResult fold(std::vector<Composite> parts, const std::vector<int>& labels, StitchDirection dir,
                    const StitchParams& params, const std::string& stage, int column) {
  SequenceResult result;
  result.composite = std::move(parts.front());
  for (std::size_t k = 1; k < parts.size(); ++k) {
    PairReport entry;
    entry.stage = stage;
    entry.column = column;
    entry.first = labels[k - 1];
    entry.second = labels[k];
    try {
      result.composite = stitch_composites(result.composite, parts[k], dir, params, entry);
      result.report.pairs.push_back(entry);
    } catch (const Error& e) {
      result.report.failures.push_back({stage, column, entry.first, entry.second, e.code(), e.what()});
      break;
    }
  }
  return result;
}

void finish(SequenceResult& r) {
  r.report.width = r.composite.image.width();
  r.report.height = r.composite.image.height();
  r.report.layout = r.composite.layout;
}

StitchDirection opposite(StitchDirection dir) {
  switch (dir) {
    case StitchDirection::BottomToTop: return StitchDirection::TopToBottom;
    case StitchDirection::TopToBottom: return StitchDirection::BottomToTop;
    case StitchDirection::LeftToRight: return StitchDirection::RightToLeft;
    case StitchDirection::RightToLeft: return StitchDirection::LeftToRight;
  }
  return dir;
}

}  // namespace

PairResult stitch_pair(const RgbImage& a, const RgbImage& b, StitchDirection dir, const StitchParams& params) {
  params.validate();
  PairReport report;
  report.first = 0;
  report.second = 1;
  Composite out = stitch_composites(Composite::from_frame(a, 0), Composite::from_frame(b, 1), dir, params, report);
  return {std::move(out.image), report};
}

SequenceResult stitch_sequence(std::span<const RgbImage> frames, StitchDirection dir, const StitchParams& params) {
  if (frames.empty()) throw Error(Errc::EmptyInput, "stitch_sequence needs at least one frame");
  params.validate();
  std::vector<Composite> parts;
  std::vector<int> labels;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    parts.push_back(Composite::from_frame(frames[k], static_cast<int>(k)));
    labels.push_back(static_cast<int>(k));
  }
  SequenceResult r = fold(std::move(parts), labels, dir, params, "sequence", -1);
  finish(r);
  return r;
}

void MosaicPlan::validate() const {
  if (columns < 1 || rows < 1) throw Error(Errc::InvalidConfig, "plan needs at least one column and one row");
  if (frame_refs.size() != static_cast<std::size_t>(columns) * rows) {
    throw Error(Errc::InvalidConfig, "plan lists " + std::to_string(frame_refs.size()) + " frames for a " +
                                         std::to_string(columns) + "x" + std::to_string(rows) + " grid");
  }
  if (!is_vertical(leg_direction)) {
    throw Error(Errc::InvalidConfig, "plan leg_direction must be BottomToTop or TopToBottom");
  }
}

int flight_cell(const MosaicPlan& plan, int flight_index) {
  const int column = flight_index / plan.rows;
  const int step = flight_index % plan.rows;
  StitchDirection leg = plan.leg_direction;
  if (plan.serpentine && column % 2 == 1) leg = opposite(leg);
  const int row = leg == StitchDirection::BottomToTop ? plan.rows - 1 - step : step;
  return plan.cell(row, column);
}

SequenceResult build_mosaic(const MosaicPlan& plan, std::span<const RgbImage> frames, const StitchParams& params) {
  plan.validate();
  params.validate();
  if (frames.size() != plan.frame_refs.size()) {
    throw Error(Errc::InvalidConfig, "frame count does not match the plan");
  }

  SequenceResult result;
  std::vector<Composite> columns;
  std::vector<int> column_labels;
  for (int c = 0; c < plan.columns; ++c) {
    std::vector<Composite> parts;
    std::vector<int> rows;
    for (int k = 0; k < plan.rows; ++k) {
      const int row = plan.leg_direction == StitchDirection::BottomToTop ? plan.rows - 1 - k : k;
      parts.push_back(Composite::from_frame(frames[plan.cell(row, c)], plan.cell(row, c)));
      rows.push_back(row);
    }
    SequenceResult column = fold(std::move(parts), rows, plan.leg_direction, params, "column", c);
    result.report.pairs.insert(result.report.pairs.end(), column.report.pairs.begin(), column.report.pairs.end());
    if (!column.report.ok()) {
      result.report.failures = column.report.failures;
      if (columns.empty()) {
        result.composite = std::move(column.composite);
        finish(result);
        return result;
      }
      break;
    }
    columns.push_back(rotate_quarter(column.composite, 1));
    column_labels.push_back(c);
  }

  // After a clockwise quarter turn, scene columns run top to bottom.
  SequenceResult joined = fold(std::move(columns), column_labels, StitchDirection::TopToBottom, params, "join", -1);
  result.report.pairs.insert(result.report.pairs.end(), joined.report.pairs.begin(), joined.report.pairs.end());
  result.report.failures.insert(result.report.failures.end(), joined.report.failures.begin(),
                                joined.report.failures.end());
  result.composite = rotate_quarter(joined.composite, 3);
  finish(result);
  return result;
}

}  // namespace dronemap
