#pragma once

#include <span>

#include "dronemap/features.hpp"
#include "dronemap/image.hpp"
#include "dronemap/matching.hpp"
#include "dronemap/stitcher.hpp"

namespace dronemap::viz {

// Circles of radius 2.5*scale: red for bright-on-dark blobs, blue for
// dark-on-bright, matching the usual keypoint overlay look.
RgbImage draw_keypoints(const RgbImage& img, std::span<const Feature> features);

// Query on the left, train on the right, one colored line per match.
RgbImage draw_matches(const RgbImage& query, std::span<const Feature> query_features, const RgbImage& train,
                      std::span<const Feature> train_features, std::span<const Match> matches);

// Outlines every frame's visible rectangle in the mosaic.
RgbImage draw_layout(const RgbImage& mosaic, const Layout& layout);

}  // namespace dronemap::viz
