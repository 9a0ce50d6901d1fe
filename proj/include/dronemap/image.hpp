#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dronemap/error.hpp"

namespace dronemap {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  long long area() const { return empty() ? 0 : static_cast<long long>(w) * h; }
  bool contains(int px, int py) const { return px >= x && py >= y && px < x + w && py < y + h; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

Rect intersect(const Rect& a, const Rect& b);

enum class StitchDirection { BottomToTop, TopToBottom, LeftToRight, RightToLeft };

inline bool is_vertical(StitchDirection dir) {
  return dir == StitchDirection::BottomToTop || dir == StitchDirection::TopToBottom;
}

const char* direction_name(StitchDirection dir);
StitchDirection parse_direction(const std::string& name);

// Row-major raster, origin top-left, x right, y down. A zero-extent image
// is permitted as the neutral element of concat; file I/O rejects it.
template <typename Pixel>
class Image {
 public:
  using pixel_type = Pixel;

  Image() = default;
  Image(int width, int height, Pixel fill = Pixel{})
      : width_(width), height_(height), pixels_(checked_size(width, height), fill) {}
  Image(int width, int height, std::vector<Pixel> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_size(width, height)) {
      throw Error(Errc::DimensionMismatch, "pixel buffer does not match image extent");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  Rect bounds() const { return {0, 0, width_, height_}; }

  Pixel& at(int x, int y) { return pixels_[index(x, y)]; }
  const Pixel& at(int x, int y) const { return pixels_[index(x, y)]; }
  Pixel& operator()(int x, int y) { return at(x, y); }
  const Pixel& operator()(int x, int y) const { return at(x, y); }

  std::span<Pixel> row(int y) { return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const Pixel> row(int y) const {
    return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::span<const Pixel> pixels() const { return pixels_; }
  std::span<Pixel> pixels() { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) throw Error(Errc::DimensionMismatch, "negative image extent");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> pixels_;
};

using RgbImage = Image<Rgb>;
using GrayImage = Image<double>;

// Luma (0.299, 0.587, 0.114).
GrayImage to_grayscale(const RgbImage& img);
GrayImage to_grayscale(const RgbImage& img, const Rect& region);

// Summed-area table. sum(x, y) covers the inclusive rectangle (0,0)..(x,y).
class IntegralImage {
 public:
  explicit IntegralImage(const GrayImage& img);

  int width() const { return width_; }
  int height() const { return height_; }
  double sum(int x, int y) const { return sums_[static_cast<std::size_t>(y) * width_ + x]; }

  // Sum over r after clamping r to the image. Degenerate rects give 0.
  double box_sum(const Rect& r) const;
  double box_sum(int x, int y, int w, int h) const { return box_sum(Rect{x, y, w, h}); }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> sums_;
};

inline IntegralImage integral_image(const GrayImage& img) { return IntegralImage(img); }

template <typename Pixel>
Image<Pixel> crop(const Image<Pixel>& img, const Rect& r) {
  if (r.w < 0 || r.h < 0 || r.x < 0 || r.y < 0 || r.x + r.w > img.width() || r.y + r.h > img.height()) {
    throw Error(Errc::OutOfBounds, "crop rect exceeds image extent");
  }
  Image<Pixel> out(r.w, r.h);
  for (int j = 0; j < r.h; ++j) {
    auto src = img.row(r.y + j);
    auto dst = out.row(j);
    for (int i = 0; i < r.w; ++i) dst[i] = src[r.x + i];
  }
  return out;
}

// Maps a point of a (width x height) image through `turns` clockwise quarter turns.
inline void rotate_point(int width, int height, int turns, int& x, int& y) {
  for (int t = 0; t < ((turns % 4) + 4) % 4; ++t) {
    const int nx = height - 1 - y;
    const int ny = x;
    x = nx;
    y = ny;
    std::swap(width, height);
  }
}

// Rect counterpart of rotate_point; (width, height) are the enclosing image extent.
Rect rotate_rect(const Rect& r, int width, int height, int turns);

// Clockwise quarter turns; turns is taken modulo 4.
template <typename Pixel>
Image<Pixel> rotate_quarter(const Image<Pixel>& img, int turns) {
  turns = ((turns % 4) + 4) % 4;
  if (turns == 0) return img;
  const bool swap = turns % 2 == 1;
  Image<Pixel> out(swap ? img.height() : img.width(), swap ? img.width() : img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int nx = x;
      int ny = y;
      rotate_point(img.width(), img.height(), turns, nx, ny);
      out(nx, ny) = img(x, y);
    }
  }
  return out;
}

// Stacks two images along the axis of `dir`; the first argument always lands
// on top (vertical) or on the left (horizontal).
template <typename Pixel>
Image<Pixel> concat(const Image<Pixel>& top_or_left, const Image<Pixel>& bottom_or_right, StitchDirection dir) {
  const auto& a = top_or_left;
  const auto& b = bottom_or_right;
  if (is_vertical(dir)) {
    if (a.width() == 0 && a.height() == 0) return b;
    if (b.width() == 0 && b.height() == 0) return a;
    if (a.width() != b.width()) throw Error(Errc::DimensionMismatch, "vertical concat needs equal widths");
    Image<Pixel> out(a.width(), a.height() + b.height());
    for (int y = 0; y < a.height(); ++y) std::copy(a.row(y).begin(), a.row(y).end(), out.row(y).begin());
    for (int y = 0; y < b.height(); ++y) {
      std::copy(b.row(y).begin(), b.row(y).end(), out.row(a.height() + y).begin());
    }
    return out;
  }
  if (a.width() == 0 && a.height() == 0) return b;
  if (b.width() == 0 && b.height() == 0) return a;
  if (a.height() != b.height()) throw Error(Errc::DimensionMismatch, "horizontal concat needs equal heights");
  Image<Pixel> out(a.width() + b.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    std::copy(a.row(y).begin(), a.row(y).end(), out.row(y).begin());
    std::copy(b.row(y).begin(), b.row(y).end(), out.row(y).begin() + a.width());
  }
  return out;
}

}  // namespace dronemap
