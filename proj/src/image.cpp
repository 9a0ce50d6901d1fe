#include "dronemap/image.hpp"

#include <algorithm>

namespace dronemap {

Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

const char* direction_name(StitchDirection dir) {
  switch (dir) {
    case StitchDirection::BottomToTop: return "BottomToTop";
    case StitchDirection::TopToBottom: return "TopToBottom";
    case StitchDirection::LeftToRight: return "LeftToRight";
    case StitchDirection::RightToLeft: return "RightToLeft";
  }
  return "BottomToTop";
}

StitchDirection parse_direction(const std::string& name) {
  for (auto dir : {StitchDirection::BottomToTop, StitchDirection::TopToBottom, StitchDirection::LeftToRight,
                   StitchDirection::RightToLeft}) {
    if (name == direction_name(dir)) return dir;
  }
  throw Error(Errc::InvalidConfig, "unknown stitch direction '" + name + "'");
}

GrayImage to_grayscale(const RgbImage& img) { return to_grayscale(img, img.bounds()); }

GrayImage to_grayscale(const RgbImage& img, const Rect& region) {
  if (region.x < 0 || region.y < 0 || region.x + region.w > img.width() || region.y + region.h > img.height()) {
    throw Error(Errc::OutOfBounds, "grayscale region exceeds image extent");
  }
  GrayImage out(region.w, region.h);
  for (int y = 0; y < region.h; ++y) {
    auto src = img.row(region.y + y);
    auto dst = out.row(y);
    for (int x = 0; x < region.w; ++x) {
      const Rgb& p = src[region.x + x];
      dst[x] = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
    }
  }
  return out;
}

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width()), height_(img.height()),
      sums_(static_cast<std::size_t>(img.width()) * img.height(), 0.0) {
  for (int y = 0; y < height_; ++y) {
    double row_sum = 0.0;
    auto src = img.row(y);
    double* dst = sums_.data() + static_cast<std::size_t>(y) * width_;
    const double* above = y > 0 ? dst - width_ : nullptr;
    for (int x = 0; x < width_; ++x) {
      row_sum += src[x];
      dst[x] = row_sum + (above ? above[x] : 0.0);
    }
  }
}

double IntegralImage::box_sum(const Rect& r) const {
  const int x0 = std::max(r.x, 0);
  const int y0 = std::max(r.y, 0);
  const int x1 = std::min(r.x + r.w, width_) - 1;
  const int y1 = std::min(r.y + r.h, height_) - 1;
  if (r.w <= 0 || r.h <= 0 || x1 < x0 || y1 < y0) return 0.0;

  const double a = (x0 > 0 && y0 > 0) ? sum(x0 - 1, y0 - 1) : 0.0;
  const double b = y0 > 0 ? sum(x1, y0 - 1) : 0.0;
  const double c = x0 > 0 ? sum(x0 - 1, y1) : 0.0;
  const double d = sum(x1, y1);
  return d - b - c + a;
}

Rect rotate_rect(const Rect& r, int width, int height, int turns) {
  Rect out = r;
  for (int t = 0; t < ((turns % 4) + 4) % 4; ++t) {
    out = Rect{height - out.y - out.h, out.x, out.h, out.w};
    std::swap(width, height);
  }
  return out;
}

}  // namespace dronemap
