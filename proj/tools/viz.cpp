#include "viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace dronemap::viz {
namespace {

void plot(RgbImage& img, int x, int y, Rgb c) {
  if (x >= 0 && y >= 0 && x < img.width() && y < img.height()) img(x, y) = c;
}

void line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    plot(img, x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void circle(RgbImage& img, double cx, double cy, double radius, Rgb c) {
  const int steps = std::max(16, static_cast<int>(radius * 8));
  for (int k = 0; k < steps; ++k) {
    const double a = 2.0 * 3.14159265358979323846 * k / steps;
    plot(img, static_cast<int>(std::lround(cx + radius * std::cos(a))),
         static_cast<int>(std::lround(cy + radius * std::sin(a))), c);
  }
}

Rgb palette(std::size_t k) {
  static const Rgb colors[] = {{230, 25, 75}, {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
                               {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230}};
  return colors[k % std::size(colors)];
}

}  // namespace

RgbImage draw_keypoints(const RgbImage& img, std::span<const Feature> features) {
  RgbImage out = img;
  for (const auto& f : features) {
    const Rgb c = f.point.laplacian_sign < 0 ? Rgb{255, 40, 40} : Rgb{40, 80, 255};
    circle(out, f.point.x, f.point.y, 2.5 * f.point.scale, c);
    plot(out, static_cast<int>(std::lround(f.point.x)), static_cast<int>(std::lround(f.point.y)), c);
  }
  return out;
}

RgbImage draw_matches(const RgbImage& query, std::span<const Feature> query_features, const RgbImage& train,
                      std::span<const Feature> train_features, std::span<const Match> matches) {
  const int h = std::max(query.height(), train.height());
  RgbImage out(query.width() + train.width(), h);
  for (int y = 0; y < query.height(); ++y) {
    for (int x = 0; x < query.width(); ++x) out(x, y) = query(x, y);
  }
  for (int y = 0; y < train.height(); ++y) {
    for (int x = 0; x < train.width(); ++x) out(query.width() + x, y) = train(x, y);
  }
  for (std::size_t k = 0; k < matches.size(); ++k) {
    const auto& a = query_features[matches[k].query_index].point;
    const auto& b = train_features[matches[k].train_index].point;
    const Rgb c = palette(k);
    const int ax = static_cast<int>(std::lround(a.x)), ay = static_cast<int>(std::lround(a.y));
    const int bx = static_cast<int>(std::lround(b.x)) + query.width(), by = static_cast<int>(std::lround(b.y));
    circle(out, ax, ay, 3.0, c);
    circle(out, bx, by, 3.0, c);
    line(out, ax, ay, bx, by, c);
  }
  return out;
}

RgbImage draw_layout(const RgbImage& mosaic, const Layout& layout) {
  RgbImage out = mosaic;
  for (const auto& p : layout) {
    if (p.visible.empty()) continue;
    const Rect& r = p.visible;
    const Rgb c = palette(static_cast<std::size_t>(p.frame));
    const int x1 = r.x + r.w - 1, y1 = r.y + r.h - 1;
    line(out, r.x, r.y, x1, r.y, c);
    line(out, r.x, y1, x1, y1, c);
    line(out, r.x, r.y, r.x, y1, c);
    line(out, x1, r.y, x1, y1, c);
  }
  return out;
}

}  // namespace dronemap::viz
