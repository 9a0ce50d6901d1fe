#include "dronemap/flightsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "dronemap/random.hpp"

namespace dronemap {

void CameraConfig::validate() const {
  if (frame_width < 1 || frame_height < 1) throw Error(Errc::InvalidConfig, "camera frame extent must be positive");
}

void FlightConfig::validate() const {
  if (columns < 1 || rows < 1) throw Error(Errc::InvalidConfig, "flight grid needs at least one column and row");
  for (double o : {overlap_x, overlap_y}) {
    if (!(o > 0.0 && o <= 0.9)) throw Error(Errc::InvalidConfig, "flight overlap must be in (0, 0.9]");
  }
  if (!(jitter_sigma >= 0.0)) throw Error(Errc::InvalidConfig, "flight.jitter_sigma must be >= 0");
  if (!std::isfinite(brightness_drift)) throw Error(Errc::InvalidConfig, "flight.brightness_drift must be finite");
  if (!is_vertical(first_leg)) throw Error(Errc::InvalidConfig, "flight.first_leg must be BottomToTop or TopToBottom");
}

std::vector<RgbImage> Flight::frames_in_plan_order() const {
  std::vector<RgbImage> out(frames.size());
  for (int i = 0; i < static_cast<int>(frames.size()); ++i) out[flight_cell(plan, i)] = frames[i];
  return out;
}

namespace {

double spacing(int extent, double overlap) { return extent * (1.0 - overlap); }

int margin_for(double sigma) { return static_cast<int>(std::ceil(3.0 * sigma)); }

std::uint8_t clamp_channel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

SceneExtent nominal_grid_extent(const CameraConfig& cam, const FlightConfig& flight) {
  return {static_cast<int>(std::ceil(cam.frame_width + (flight.columns - 1) * spacing(cam.frame_width, flight.overlap_x))),
          static_cast<int>(std::ceil(cam.frame_height + (flight.rows - 1) * spacing(cam.frame_height, flight.overlap_y)))};
}

SceneExtent required_scene_extent(const CameraConfig& cam, const FlightConfig& flight) {
  const SceneExtent grid = nominal_grid_extent(cam, flight);
  const int margin = margin_for(flight.jitter_sigma);
  return {grid.width + 2 * margin, grid.height + 2 * margin};
}

Flight generate_flight(const RgbImage& scene, const CameraConfig& cam, const FlightConfig& flight) {
  cam.validate();
  flight.validate();
  const SceneExtent need = required_scene_extent(cam, flight);
  if (scene.width() < need.width || scene.height() < need.height) {
    throw Error(Errc::SceneTooSmall, "scene is " + std::to_string(scene.width()) + "x" +
                                         std::to_string(scene.height()) + ", flight needs " +
                                         std::to_string(need.width) + "x" + std::to_string(need.height));
  }
  const SceneExtent grid = nominal_grid_extent(cam, flight);
  const int origin_x = (scene.width() - grid.width) / 2;
  const int origin_y = (scene.height() - grid.height) / 2;
  const double step_x = spacing(cam.frame_width, flight.overlap_x);
  const double step_y = spacing(cam.frame_height, flight.overlap_y);

  Flight out;
  out.plan.columns = flight.columns;
  out.plan.rows = flight.rows;
  out.plan.serpentine = true;
  out.plan.leg_direction = flight.first_leg;
  out.plan.frame_refs.resize(static_cast<std::size_t>(flight.columns) * flight.rows);

  SplitMix64 rng(flight.rng_seed);
  const int count = flight.columns * flight.rows;
  for (int i = 0; i < count; ++i) {
    const int cell = flight_cell(out.plan, i);
    const int row = cell / flight.columns;
    const int column = cell % flight.columns;
    const double jx = flight.jitter_sigma > 0.0 ? flight.jitter_sigma * rng.normal() : 0.0;
    const double jy = flight.jitter_sigma > 0.0 ? flight.jitter_sigma * rng.normal() : 0.0;
    GroundTruthPose pose;
    pose.index = i;
    pose.x = std::clamp(round_pixel(origin_x + column * step_x + jx), 0, scene.width() - cam.frame_width);
    pose.y = std::clamp(round_pixel(origin_y + row * step_y + jy), 0, scene.height() - cam.frame_height);

    RgbImage frame = crop(scene, Rect{pose.x, pose.y, cam.frame_width, cam.frame_height});
    const double offset = flight.brightness_drift * i;
    if (offset != 0.0) {
      for (Rgb& p : frame.pixels()) p = Rgb{clamp_channel(p.r + offset), clamp_channel(p.g + offset), clamp_channel(p.b + offset)};
    }
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03d.png", i);
    out.plan.frame_refs[cell] = name;
    out.frames.push_back(std::move(frame));
    out.poses.push_back(pose);
  }
  return out;
}

RgbImage procedural_scene(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1) throw Error(Errc::InvalidConfig, "scene extent must be positive");
  SplitMix64 rng(seed);
  std::vector<double> acc(static_cast<std::size_t>(width) * height * 3, 110.0);

  // Smooth background: value noise on progressively finer lattices.
  const int cells[] = {160, 80, 40, 20};
  const double amplitudes[] = {55.0, 30.0, 18.0, 10.0};
  for (int o = 0; o < 4; ++o) {
    const int cell = cells[o];
    const int lw = width / cell + 2;
    const int lh = height / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(lw) * lh * 3);
    for (double& v : lattice) v = rng.uniform(-1.0, 1.0) * amplitudes[o];
    for (int y = 0; y < height; ++y) {
      const int gy = y / cell;
      double fy = static_cast<double>(y % cell) / cell;
      fy = fy * fy * (3.0 - 2.0 * fy);
      for (int x = 0; x < width; ++x) {
        const int gx = x / cell;
        double fx = static_cast<double>(x % cell) / cell;
        fx = fx * fx * (3.0 - 2.0 * fx);
        for (int ch = 0; ch < 3; ++ch) {
          auto at = [&](int i, int j) { return lattice[(static_cast<std::size_t>(j) * lw + i) * 3 + ch]; };
          const double top = at(gx, gy) * (1 - fx) + at(gx + 1, gy) * fx;
          const double bottom = at(gx, gy + 1) * (1 - fx) + at(gx + 1, gy + 1) * fx;
          acc[(static_cast<std::size_t>(y) * width + x) * 3 + ch] += top * (1 - fy) + bottom * fy;
        }
      }
    }
  }

  // Blob texture: isotropic Gaussians of random size, sign and tint.
  const long long blobs = static_cast<long long>(width) * height / 900;
  for (long long k = 0; k < blobs; ++k) {
    const double cx = rng.uniform(0.0, width);
    const double cy = rng.uniform(0.0, height);
    const double sigma = rng.uniform(1.5, 6.0);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double base = rng.uniform(40.0, 110.0);
    const double tint[3] = {rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0)};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int x0 = std::max(0, static_cast<int>(cx) - radius), x1 = std::min(width - 1, static_cast<int>(cx) + radius);
    const int y0 = std::max(0, static_cast<int>(cy) - radius), y1 = std::min(height - 1, static_cast<int>(cy) + radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double g = sign * base * std::exp(-d2 / (2.0 * sigma * sigma));
        double* px = &acc[(static_cast<std::size_t>(y) * width + x) * 3];
        for (int ch = 0; ch < 3; ++ch) px[ch] += g * tint[ch];
      }
    }
  }

  RgbImage scene(width, height);
  auto px = scene.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{clamp_channel(acc[3 * i]), clamp_channel(acc[3 * i + 1]), clamp_channel(acc[3 * i + 2])};
  }
  return scene;
}

namespace {

const FramePiece* find_piece(const Layout& layout, int frame) {
  for (const auto& p : layout) {
    if (p.frame == frame) return &p;
  }
  return nullptr;
}

// Mean absolute error of the mosaic placed at (ax, ay), on a sparse grid.
double sampled_mae(const RgbImage& mosaic, const RgbImage& scene, int ax, int ay) {
  double sum = 0.0;
  long long n = 0;
  for (int v = 0; v < mosaic.height(); v += 7) {
    for (int u = 0; u < mosaic.width(); u += 7) {
      const Rgb& m = mosaic(u, v);
      const Rgb& s = scene(ax + u, ay + v);
      sum += std::abs(m.r - s.r) + std::abs(m.g - s.g) + std::abs(m.b - s.b);
      ++n;
    }
  }
  return sum / static_cast<double>(3 * n);
}

}  // namespace

Metrics evaluate_mosaic(const RgbImage& mosaic, const RgbImage& scene, std::span<const GroundTruthPose> poses,
                        const MosaicPlan* plan, const StitchReport* report, const EvalParams& params) {
  if (poses.empty()) throw Error(Errc::EmptyInput, "evaluation needs ground-truth poses");
  if (mosaic.empty()) throw Error(Errc::RegionMismatch, "empty mosaic");
  if (plan) plan->validate();

  auto pose_of_frame = [&](int frame) -> const GroundTruthPose& {
    int index = frame;
    if (plan) {
      for (int i = 0; i < static_cast<int>(poses.size()); ++i) {
        if (flight_cell(*plan, i) == frame) index = i;
      }
    }
    for (const auto& p : poses) {
      if (p.index == index) return p;
    }
    throw Error(Errc::RegionMismatch, "no pose for frame " + std::to_string(frame));
  };

  int frame_w = params.frame_width;
  int frame_h = params.frame_height;
  if (report && !report->layout.empty()) {
    frame_w = report->layout.front().frame_width;
    frame_h = report->layout.front().frame_height;
  }
  if (frame_w < 1 || frame_h < 1) throw Error(Errc::InvalidConfig, "frame extent unknown: pass a report or set it");

  Metrics m;
  const GroundTruthPose* first = nullptr;
  for (const auto& p : poses) {
    if (p.index == 0) first = &p;
  }
  if (!first) first = &poses.front();

  if (report) {
    const int first_frame = plan ? flight_cell(*plan, first->index) : first->index;
    const FramePiece* piece = find_piece(report->layout, first_frame);
    if (!piece || piece->turns != 0) throw Error(Errc::RegionMismatch, "report layout does not place the first frame");
    m.anchor_x = first->x - piece->footprint.x;
    m.anchor_y = first->y - piece->footprint.y;
  } else {
    int min_x = std::numeric_limits<int>::max(), min_y = std::numeric_limits<int>::max();
    for (const auto& p : poses) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int dy = -params.anchor_search_radius; dy <= params.anchor_search_radius; ++dy) {
      for (int dx = -params.anchor_search_radius; dx <= params.anchor_search_radius; ++dx) {
        const int ax = min_x + dx, ay = min_y + dy;
        if (ax < 0 || ay < 0 || ax + mosaic.width() > scene.width() || ay + mosaic.height() > scene.height()) continue;
        const double e = sampled_mae(mosaic, scene, ax, ay);
        if (e < best) {
          best = e;
          m.anchor_x = ax;
          m.anchor_y = ay;
        }
      }
    }
    if (std::isinf(best)) throw Error(Errc::RegionMismatch, "mosaic does not fit inside the scene near the poses");
  }
  if (m.anchor_x < 0 || m.anchor_y < 0 || m.anchor_x + mosaic.width() > scene.width() ||
      m.anchor_y + mosaic.height() > scene.height()) {
    throw Error(Errc::RegionMismatch, "mosaic extends outside the scene");
  }

  // Seam neighbourhoods from the layout: pixels whose owner differs within seam_margin.
  std::vector<char> near_seam(static_cast<std::size_t>(mosaic.width()) * mosaic.height(), 0);
  if (report) {
    std::vector<int> owner(near_seam.size(), -1);
    for (const auto& p : report->layout) {
      for (int v = p.visible.y; v < p.visible.y + p.visible.h; ++v) {
        for (int u = p.visible.x; u < p.visible.x + p.visible.w; ++u) {
          if (u >= 0 && v >= 0 && u < mosaic.width() && v < mosaic.height()) {
            owner[static_cast<std::size_t>(v) * mosaic.width() + u] = p.frame;
          }
        }
      }
    }
    const int r = params.seam_margin;
    auto own = [&](int u, int v) { return owner[static_cast<std::size_t>(v) * mosaic.width() + u]; };
    for (int v = 0; v < mosaic.height(); ++v) {
      for (int u = 0; u < mosaic.width(); ++u) {
        const bool edge = (u + 1 < mosaic.width() && own(u + 1, v) != own(u, v)) ||
                          (v + 1 < mosaic.height() && own(u, v + 1) != own(u, v));
        if (!edge) continue;
        for (int j = std::max(0, v - r); j <= std::min(mosaic.height() - 1, v + r + 1); ++j) {
          for (int i = std::max(0, u - r); i <= std::min(mosaic.width() - 1, u + r + 1); ++i) {
            near_seam[static_cast<std::size_t>(j) * mosaic.width() + i] = 1;
          }
        }
      }
    }
  }

  std::array<double, 3> sq{}, ab{};
  double interior_sum = 0.0;
  long long interior_n = 0;
  for (int v = 0; v < mosaic.height(); ++v) {
    for (int u = 0; u < mosaic.width(); ++u) {
      const Rgb& a = mosaic(u, v);
      const Rgb& s = scene(m.anchor_x + u, m.anchor_y + v);
      const double d[3] = {static_cast<double>(a.r) - s.r, static_cast<double>(a.g) - s.g,
                           static_cast<double>(a.b) - s.b};
      for (int ch = 0; ch < 3; ++ch) {
        sq[ch] += d[ch] * d[ch];
        ab[ch] += std::abs(d[ch]);
      }
      if (!near_seam[static_cast<std::size_t>(v) * mosaic.width() + u]) {
        interior_sum += std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2]);
        ++interior_n;
      }
    }
  }
  const double n = static_cast<double>(mosaic.width()) * mosaic.height();
  for (int ch = 0; ch < 3; ++ch) {
    m.rmse_per_channel[ch] = std::sqrt(sq[ch] / n);
    m.mae_per_channel[ch] = ab[ch] / n;
  }
  m.rmse = std::sqrt((sq[0] + sq[1] + sq[2]) / (3.0 * n));
  m.mae = (ab[0] + ab[1] + ab[2]) / (3.0 * n);
  m.interior_mae = interior_n > 0 ? interior_sum / (3.0 * static_cast<double>(interior_n)) : 0.0;

  // Coverage of the union of true frame footprints.
  {
    int x0 = std::numeric_limits<int>::max(), y0 = std::numeric_limits<int>::max(), x1 = 0, y1 = 0;
    for (const auto& p : poses) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x + frame_w);
      y1 = std::max(y1, p.y + frame_h);
    }
    const Rect footprint{m.anchor_x, m.anchor_y, mosaic.width(), mosaic.height()};
    long long in_union = 0, covered = 0;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        bool inside = false;
        for (const auto& p : poses) {
          if (x >= p.x && y >= p.y && x < p.x + frame_w && y < p.y + frame_h) {
            inside = true;
            break;
          }
        }
        if (!inside) continue;
        ++in_union;
        if (footprint.contains(x, y)) ++covered;
      }
    }
    m.coverage = in_union > 0 ? static_cast<double>(covered) / static_cast<double>(in_union) : 0.0;
  }

  if (report) {
    auto placement_error = [&](int ref_frame, int new_frame) {
      const FramePiece* a = find_piece(report->layout, ref_frame);
      const FramePiece* b = find_piece(report->layout, new_frame);
      if (!a || !b) throw Error(Errc::RegionMismatch, "report layout is missing a stitched frame");
      const GroundTruthPose& pa = pose_of_frame(ref_frame);
      const GroundTruthPose& pb = pose_of_frame(new_frame);
      const double ex = (b->footprint.x - a->footprint.x) - (pb.x - pa.x);
      const double ey = (b->footprint.y - a->footprint.y) - (pb.y - pa.y);
      return std::hypot(ex, ey);
    };
    for (const auto& pair : report->pairs) {
      if (pair.stage == "column" && plan) {
        m.seam_errors.push_back(
            placement_error(plan->cell(pair.first, pair.column), plan->cell(pair.second, pair.column)));
      } else if (pair.stage == "join" && plan) {
        double worst = 0.0;
        for (int row = 0; row < plan->rows; ++row) {
          worst = std::max(worst, placement_error(plan->cell(row, pair.first), plan->cell(row, pair.second)));
        }
        m.seam_errors.push_back(worst);
      } else {
        m.seam_errors.push_back(placement_error(pair.first, pair.second));
      }
    }
  }
  return m;
}

}  // namespace dronemap
