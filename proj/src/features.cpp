#include "dronemap/features.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>

namespace dronemap {

void DetectorParams::validate() const {
  if (octaves < 1) throw Error(Errc::InvalidConfig, "detector.octaves must be >= 1");
  if (layers_per_octave < 3) throw Error(Errc::InvalidConfig, "detector.layers_per_octave must be >= 3");
  if (initial_filter_size < 9 || initial_filter_size % 6 != 3) {
    throw Error(Errc::InvalidConfig, "detector.initial_filter_size must be >= 9 and 3 mod 6");
  }
  if (!(response_threshold >= 0.0)) throw Error(Errc::InvalidConfig, "detector.response_threshold must be >= 0");
  if (sampling_step < 1) throw Error(Errc::InvalidConfig, "detector.sampling_step must be >= 1");
}

int filter_size(const DetectorParams& params, int octave, int layer) {
  return params.initial_filter_size + 6 * ((1 << octave) * (layer + 1) - 1);
}

HessianResponseMap::HessianResponseMap(int width, int height, int step, int filter_size, int image_width,
                                       int image_height)
    : width_(width), height_(height), step_(step), filter_size_(filter_size), image_width_(image_width),
      image_height_(image_height), responses_(static_cast<std::size_t>(width) * height, 0.0),
      signs_(static_cast<std::size_t>(width) * height, 0) {}

bool HessianResponseMap::valid(int i, int j) const {
  if (i < 0 || j < 0 || i >= width_ || j >= height_) return false;
  const int border = (filter_size_ - 1) / 2;
  const int x = i * step_;
  const int y = j * step_;
  return x >= border && y >= border && x + border <= image_width_ - 1 && y + border <= image_height_ - 1;
}

HessianResponseMap hessian_response(const IntegralImage& ii, int filter_size, int step) {
  if (filter_size < 9 || filter_size % 2 == 0) {
    throw Error(Errc::InvalidConfig, "filter size must be odd and >= 9");
  }
  if (filter_size > std::min(ii.width(), ii.height())) {
    throw Error(Errc::FilterTooLarge, "filter size " + std::to_string(filter_size) + " exceeds image extent");
  }
  HessianResponseMap map(ii.width() / step, ii.height() / step, step, filter_size, ii.width(), ii.height());

  const int lobe = filter_size / 3;
  const int border = (filter_size - 1) / 2;
  const double inv_area = 1.0 / (static_cast<double>(filter_size) * filter_size);

  for (int j = 0; j < map.height(); ++j) {
    for (int i = 0; i < map.width(); ++i) {
      if (!map.valid(i, j)) continue;
      const int c = i * step;
      const int r = j * step;
      // Dxx: (2l-1) tall, full width, central lobe weighted -2 (outer minus 3x inner).
      const double dxx = ii.box_sum(c - border, r - lobe + 1, filter_size, 2 * lobe - 1) -
                         3.0 * ii.box_sum(c - lobe / 2, r - lobe + 1, lobe, 2 * lobe - 1);
      const double dyy = ii.box_sum(c - lobe + 1, r - border, 2 * lobe - 1, filter_size) -
                         3.0 * ii.box_sum(c - lobe + 1, r - lobe / 2, 2 * lobe - 1, lobe);
      const double dxy = ii.box_sum(c + 1, r - lobe, lobe, lobe) + ii.box_sum(c - lobe, r + 1, lobe, lobe) -
                         ii.box_sum(c - lobe, r - lobe, lobe, lobe) - ii.box_sum(c + 1, r + 1, lobe, lobe);
      const double nxx = dxx * inv_area;
      const double nyy = dyy * inv_area;
      const double nxy = dxy * inv_area;
      const double det = nxx * nyy - kHessianDxyWeight * kHessianDxyWeight * nxy * nxy;
      const double trace = nxx + nyy;
      map.set(i, j, det, trace > 0.0 ? 1 : (trace < 0.0 ? -1 : 0));
    }
  }
  return map;
}

namespace {

// Solves the 3x3 system a * x = b by Gaussian elimination with partial pivoting.
std::optional<std::array<double, 3>> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int k = col; k < 3; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::array<double, 3> x{};
  for (int row = 2; row >= 0; --row) {
    double s = b[row];
    for (int k = row + 1; k < 3; ++k) s -= a[row][k] * x[k];
    x[row] = s / a[row][row];
  }
  return x;
}

bool is_strict_maximum(const HessianResponseMap& bottom, const HessianResponseMap& middle,
                       const HessianResponseMap& top, int i, int j) {
  const double v = middle.response(i, j);
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (bottom.response(i + di, j + dj) >= v || top.response(i + di, j + dj) >= v) return false;
      if ((di != 0 || dj != 0) && middle.response(i + di, j + dj) >= v) return false;
    }
  }
  return true;
}

std::optional<InterestPoint> interpolate(const HessianResponseMap& b, const HessianResponseMap& m,
                                         const HessianResponseMap& t, int i, int j) {
  const double v = m.response(i, j);
  const double dx = (m.response(i + 1, j) - m.response(i - 1, j)) / 2.0;
  const double dy = (m.response(i, j + 1) - m.response(i, j - 1)) / 2.0;
  const double ds = (t.response(i, j) - b.response(i, j)) / 2.0;

  const double dxx = m.response(i + 1, j) + m.response(i - 1, j) - 2.0 * v;
  const double dyy = m.response(i, j + 1) + m.response(i, j - 1) - 2.0 * v;
  const double dss = t.response(i, j) + b.response(i, j) - 2.0 * v;
  const double dxy = (m.response(i + 1, j + 1) - m.response(i - 1, j + 1) - m.response(i + 1, j - 1) +
                      m.response(i - 1, j - 1)) / 4.0;
  const double dxs = (t.response(i + 1, j) - t.response(i - 1, j) - b.response(i + 1, j) + b.response(i - 1, j)) / 4.0;
  const double dys = (t.response(i, j + 1) - t.response(i, j - 1) - b.response(i, j + 1) + b.response(i, j - 1)) / 4.0;

  const auto offset = solve3({{{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}}}, {-dx, -dy, -ds});
  if (!offset) return std::nullopt;
  const auto [ox, oy, os] = *offset;
  if (!(std::abs(ox) < 1.0 && std::abs(oy) < 1.0 && std::abs(os) < 1.0)) return std::nullopt;

  const int filter_step = m.filter_size() - b.filter_size();
  InterestPoint p;
  p.x = (i + ox) * m.step();
  p.y = (j + oy) * m.step();
  p.scale = (1.2 / 9.0) * (m.filter_size() + os * filter_step);
  p.response = v;
  p.laplacian_sign = m.laplacian_sign(i, j) >= 0 ? 1 : -1;
  return p;
}

}  // namespace

std::vector<InterestPoint> detect_interest_points(const IntegralImage& ii, const DetectorParams& params) {
  params.validate();
  const int min_extent = std::min(ii.width(), ii.height());
  std::vector<InterestPoint> points;

  for (int octave = 0; octave < params.octaves; ++octave) {
    const int step = params.sampling_step << octave;
    std::vector<HessianResponseMap> layers;
    for (int layer = 0; layer < params.layers_per_octave; ++layer) {
      const int size = filter_size(params, octave, layer);
      if (size > min_extent) break;
      layers.push_back(hessian_response(ii, size, step));
    }
    for (std::size_t k = 1; k + 1 < layers.size(); ++k) {
      const auto& b = layers[k - 1];
      const auto& m = layers[k];
      const auto& t = layers[k + 1];
      for (int j = 1; j + 1 < m.height(); ++j) {
        for (int i = 1; i + 1 < m.width(); ++i) {
          // The top layer has the widest filter; all 27 samples must be evaluated.
          if (!t.valid(i - 1, j - 1) || !t.valid(i + 1, j + 1)) continue;
          if (!(m.response(i, j) > params.response_threshold)) continue;
          if (!is_strict_maximum(b, m, t, i, j)) continue;
          if (auto p = interpolate(b, m, t, i, j)) points.push_back(*p);
        }
      }
    }
  }

  std::sort(points.begin(), points.end(), [](const InterestPoint& a, const InterestPoint& b) {
    if (a.response != b.response) return a.response > b.response;
    return std::tie(a.y, a.x, a.scale) < std::tie(b.y, b.x, b.scale);
  });

  // Filter sizes 15, 27, 51, ... occur in two octaves, so one blob can be a
  // maximum in both. Keep the stronger of such near-coincident detections.
  std::vector<InterestPoint> kept;
  kept.reserve(points.size());
  for (const auto& p : points) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const InterestPoint& q) {
      const double ratio = std::max(p.scale, q.scale) / std::min(p.scale, q.scale);
      return ratio < kDuplicateScaleRatio && std::hypot(p.x - q.x, p.y - q.y) <= 0.5 * std::min(p.scale, q.scale);
    });
    if (!duplicate) kept.push_back(p);
  }
  return kept;
}

bool Descriptor::matchable() const {
  return std::any_of(values.begin(), values.end(), [](double v) { return v != 0.0; });
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  double s = 0.0;
  for (int k = 0; k < kDescriptorSize; ++k) {
    const double d = a.values[k] - b.values[k];
    s += d * d;
  }
  return std::sqrt(s);
}

Descriptor compute_descriptor(const IntegralImage& ii, const InterestPoint& p) {
  const double s = p.scale;
  if (!(s > 0.0)) throw Error(Errc::WindowOutOfBounds, "interest point scale must be positive");
  const double half_window = 10.0 * s;
  const double overflow = std::max({0.0, half_window - p.x, half_window - p.y, p.x + half_window - (ii.width() - 1),
                                    p.y + half_window - (ii.height() - 1)});
  if (overflow > 0.2 * 2.0 * half_window) {
    throw Error(Errc::WindowOutOfBounds, "descriptor window exceeds the image border by more than 20%");
  }

  const int half = std::max(1, static_cast<int>(std::lround(s)));
  const int size = 2 * half;
  const double sigma = 3.3;  // in units of scale

  Descriptor d;
  int slot = 0;
  for (int sy = 0; sy < 4; ++sy) {
    for (int sx = 0; sx < 4; ++sx) {
      double sum_dx = 0.0, sum_dy = 0.0, sum_adx = 0.0, sum_ady = 0.0;
      for (int ky = 0; ky < 5; ++ky) {
        for (int kx = 0; kx < 5; ++kx) {
          const double u = -10.0 + 5.0 * sx + kx + 0.5;
          const double v = -10.0 + 5.0 * sy + ky + 0.5;
          const int px = static_cast<int>(std::lround(p.x + u * s));
          const int py = static_cast<int>(std::lround(p.y + v * s));
          const double weight = std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
          const double hx = ii.box_sum(px, py - half, half, size) - ii.box_sum(px - half, py - half, half, size);
          const double hy = ii.box_sum(px - half, py, size, half) - ii.box_sum(px - half, py - half, size, half);
          const double dx = weight * hx;
          const double dy = weight * hy;
          sum_dx += dx;
          sum_dy += dy;
          sum_adx += std::abs(dx);
          sum_ady += std::abs(dy);
        }
      }
      d.values[slot++] = sum_dx;
      d.values[slot++] = sum_dy;
      d.values[slot++] = sum_adx;
      d.values[slot++] = sum_ady;
    }
  }

  double norm = 0.0;
  for (double v : d.values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return Descriptor{};
  for (double& v : d.values) v /= norm;
  return d;
}

std::vector<Feature> describe_points(const IntegralImage& ii, const std::vector<InterestPoint>& points) {
  std::vector<Feature> features;
  features.reserve(points.size());
  for (const auto& p : points) {
    try {
      features.push_back({p, compute_descriptor(ii, p)});
    } catch (const Error& e) {
      if (e.code() != Errc::WindowOutOfBounds) throw;
    }
  }
  return features;
}

std::vector<Feature> extract_features(const GrayImage& img, const DetectorParams& params) {
  const IntegralImage ii(img);
  return describe_points(ii, detect_interest_points(ii, params));
}

}  // namespace dronemap
