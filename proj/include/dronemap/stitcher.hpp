#pragma once

#include <span>
#include <string>
#include <vector>

#include "dronemap/features.hpp"
#include "dronemap/image.hpp"
#include "dronemap/matching.hpp"
#include "dronemap/transform.hpp"

namespace dronemap {

// Where one source frame sits inside a composed image. Every operation the
// stitcher applies (crop, quarter turn, concat) maps rectangles to
// rectangles, so the pixels a frame contributes always form one rectangle.
struct FramePiece {
  int frame = 0;
  int frame_width = 0;   // source frame extent, unrotated
  int frame_height = 0;
  Rect footprint;        // the whole frame in image coordinates; may reach outside the image
  int turns = 0;         // clockwise quarter turns applied to the frame content
  Rect visible;          // pixels of the image taken from this frame; may be empty

  friend bool operator==(const FramePiece&, const FramePiece&) = default;
};

using Layout = std::vector<FramePiece>;

struct SourcePixel {
  int x = 0;
  int y = 0;
};

// Frame coordinates of image pixel (u, v), which must lie in piece.visible.
SourcePixel source_pixel(const FramePiece& piece, int u, int v);

// An image together with the provenance of its pixels.
struct Composite {
  RgbImage image;
  Layout layout;

  static Composite from_frame(const RgbImage& frame, int frame_id);
};

Composite crop(const Composite& c, const Rect& r);
Composite rotate_quarter(const Composite& c, int turns);
Composite concat(const Composite& top_or_left, const Composite& bottom_or_right, StitchDirection dir);

struct OverlapRegions {
  Rect rect_in_a;
  Rect rect_in_b;
  Translation2D translation;
};

// Round half away from zero, the only rounding the stitcher applies.
int round_pixel(double v);

// Intersection of A and B placed at the rounded translation, expressed in
// both frames. Throws NoOverlap when empty and DirectionMismatch when B does
// not reach A's stitch-facing edge.
OverlapRegions compute_overlap(int width_a, int height_a, int width_b, int height_b, const Translation2D& t,
                               StitchDirection dir);

struct StitchParams {
  DetectorParams detector;
  MatchParams matcher;
  RansacParams ransac;
  int max_perpendicular_drift = 16;
  // Detection band on the accumulated image, in units of the new frame's
  // extent along the stitch axis, measured from the stitch-facing edge.
  double detection_band = 1.5;
  bool feather = false;

  void validate() const;
};

struct PairReport {
  std::string stage = "sequence";  // "sequence", "column" or "join"
  int column = -1;                 // grid column for "column" entries
  int first = 0;
  int second = 0;
  std::size_t matches = 0;
  std::size_t inliers = 0;
  double inlier_rms = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  int seam = 0;  // seam coordinate along the stitch axis of the pair's output
};

struct StitchFailure {
  std::string stage;
  int column = -1;
  int first = 0;
  int second = 0;
  Errc code = Errc::NoConsensus;
  std::string message;
};

struct StitchReport {
  std::vector<PairReport> pairs;
  std::vector<StitchFailure> failures;
  int width = 0;
  int height = 0;
  Layout layout;

  bool ok() const { return failures.empty(); }
};

// Places b against a using the given translation: removes the intersection
// from a, keeps b whole (cropped only to the common perpendicular extent
// when drifted), and concatenates along dir. `seam` receives the seam
// coordinate when non-null.
Composite compose_pair(const Composite& a, const Composite& b, const Translation2D& t, StitchDirection dir,
                       const StitchParams& params, int* seam = nullptr);

struct PairEstimate {
  TransformEstimate estimate;
  std::size_t matches = 0;
};

// detect -> describe -> match -> estimate. Detection on `a` is restricted to
// the band next to its stitch-facing edge.
PairEstimate estimate_pair(const RgbImage& a, const RgbImage& b, StitchDirection dir, const StitchParams& params);

struct PairResult {
  RgbImage image;
  PairReport report;
};

PairResult stitch_pair(const RgbImage& a, const RgbImage& b, StitchDirection dir, const StitchParams& params);

struct SequenceResult {
  Composite composite;
  StitchReport report;
};

// Left fold of pairwise stitching. Stops at the first failing pair and
// returns the stitched prefix along with the failure.
SequenceResult stitch_sequence(std::span<const RgbImage> frames, StitchDirection dir, const StitchParams& params);

struct MosaicPlan {
  int columns = 1;
  int rows = 1;
  bool serpentine = true;
  StitchDirection leg_direction = StitchDirection::BottomToTop;  // direction flown along column 0
  std::vector<std::string> frame_refs;                           // row-major, row 0 at the top

  void validate() const;
  int cell(int row, int column) const { return row * columns + column; }
};

// Flight-order index -> row-major cell for a serpentine plan.
int flight_cell(const MosaicPlan& plan, int flight_index);

// Stitches every column along plan.leg_direction (odd serpentine legs are
// reversed into the same order), turns each column a quarter clockwise,
// joins the columns left to right, and turns the result back. frames are
// row-major, aligned with plan.frame_refs; layout frame ids are cell indices.
SequenceResult build_mosaic(const MosaicPlan& plan, std::span<const RgbImage> frames, const StitchParams& params);

}  // namespace dronemap
