#pragma once

#include <filesystem>

#include "dronemap/image.hpp"

namespace dronemap {

// Reads PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) and binary
// PPM (P6) / PGM (P5) with maxval 255. Format is sniffed from the file
// header, not the extension. Gray inputs are expanded to equal channels.
RgbImage load_image(const std::filesystem::path& path);

// Format follows the extension: .png, .ppm, or .pgm. Writing .pgm needs a
// gray-valued image (r == g == b everywhere).
void save_image(const RgbImage& img, const std::filesystem::path& path);

}  // namespace dronemap
