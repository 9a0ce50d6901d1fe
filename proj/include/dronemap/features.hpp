#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dronemap/image.hpp"

namespace dronemap {

// Fast-Hessian pyramid configuration. Octave o, layer k uses filter size
// initial_filter_size + 6 * (2^o * (k + 1) - 1), i.e. {9,15,21,27},
// {15,27,39,51}, {27,51,75,99}, ... for the default initial size of 9. The
// sampling step doubles with every octave.
struct DetectorParams {
  int octaves = 4;
  int layers_per_octave = 4;
  int initial_filter_size = 9;
  // In 8-bit gray levels squared. Noise of +-1 level peaks near 0.2, while a
  // 640x480 textured frame still yields a few hundred points at this value.
  double response_threshold = 20.0;
  int sampling_step = 1;

  void validate() const;
};

int filter_size(const DetectorParams& params, int octave, int layer);

// Box-filter approximation of det(H) at one filter size, on a grid sampled
// every `step` pixels. Samples whose filter does not fit inside the image
// are not evaluated: response 0, laplacian sign 0.
class HessianResponseMap {
 public:
  HessianResponseMap(int width, int height, int step, int filter_size, int image_width, int image_height);

  int width() const { return width_; }
  int height() const { return height_; }
  int step() const { return step_; }
  int filter_size() const { return filter_size_; }

  double response(int i, int j) const { return responses_[index(i, j)]; }
  int laplacian_sign(int i, int j) const { return signs_[index(i, j)]; }
  // True when the full filter fits inside the image at sample (i, j).
  bool valid(int i, int j) const;

  void set(int i, int j, double response, int sign) {
    responses_[index(i, j)] = response;
    signs_[index(i, j)] = static_cast<std::int8_t>(sign);
  }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * width_ + i; }

  int width_;
  int height_;
  int step_;
  int filter_size_;
  int image_width_;
  int image_height_;
  std::vector<double> responses_;
  std::vector<std::int8_t> signs_;
};

// Weight applied to Dxy in det(H) = Dxx * Dyy - (w * Dxy)^2.
inline constexpr double kHessianDxyWeight = 0.9;

HessianResponseMap hessian_response(const IntegralImage& ii, int filter_size, int step = 1);

struct InterestPoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 0.0;
  double response = 0.0;
  int laplacian_sign = 1;

  friend bool operator==(const InterestPoint&, const InterestPoint&) = default;
};

// Two detections closer than half the smaller scale, with scales within this
// ratio, are the same blob seen by two octaves; only the stronger is kept.
inline constexpr double kDuplicateScaleRatio = 1.5;

// Scale-space maxima of det(H) above the threshold, refined to sub-sample
// accuracy. Sorted by descending response, then (y, x, scale) ascending.
std::vector<InterestPoint> detect_interest_points(const IntegralImage& ii, const DetectorParams& params);

inline constexpr int kDescriptorSize = 64;

// 4x4 subregions x (sum dx, sum dy, sum |dx|, sum |dy|), unit length. The
// all-zero vector marks a flat patch that must not be matched.
struct Descriptor {
  std::array<double, kDescriptorSize> values{};

  bool matchable() const;
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

double descriptor_distance(const Descriptor& a, const Descriptor& b);

// Upright descriptor over a 20*scale window. Windows that cross the image
// border by at most 20% of their side are clamped; beyond that the call
// throws WindowOutOfBounds.
Descriptor compute_descriptor(const IntegralImage& ii, const InterestPoint& p);

struct Feature {
  InterestPoint point;
  Descriptor descriptor;
};

// Describes every point, silently dropping those whose window is out of bounds.
std::vector<Feature> describe_points(const IntegralImage& ii, const std::vector<InterestPoint>& points);

// detect_interest_points followed by describe_points.
std::vector<Feature> extract_features(const GrayImage& img, const DetectorParams& params);

}  // namespace dronemap
