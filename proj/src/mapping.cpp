#include "gleam/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace gleam {

namespace {

std::int32_t to_units(double v) {
  return static_cast<std::int32_t>(std::lround(v / GlobalProbMap::kLogOddsQuantum));
}

// Hit endpoints land exactly on the struck cell's boundary; push them a hair
// into the cell so floor() picks the occupied side.
// A hit endpoint within this many cells of a grid line lies on that face.
constexpr double kFaceSnapCells = 1e-6;
// Minimum overlap (meters) for a ray to count as crossing a cell.
constexpr double kCrossingTolerance = 1e-9;

}  // namespace

GlobalProbMap::GlobalProbMap(const MapParams& params, Cell offset)
    : params_(params),
      offset_(offset),
      units_(params.width, params.height, 0),
      occ_units_(to_units(params.c_occ)),
      free_units_(to_units(params.c_free)),
      tau_occ_units_(to_units(params.tau_occ)),
      tau_free_units_(to_units(params.tau_free)),
      limit_units_(to_units(params.logodds_limit)) {
  if (params.width <= 0 || params.height <= 0 || !(params.cell_size > 0.0)) {
    throw MapError("map dimensions and cell size must be positive");
  }
  if (!(tau_free_units_ < 0 && 0 < tau_occ_units_)) {
    throw MapError("thresholds must satisfy tau_free < 0 < tau_occ");
  }
  if (!(occ_units_ > 0 && free_units_ < 0)) {
    throw MapError("c_occ must be positive and c_free negative");
  }
  if (limit_units_ <= 0) {
    throw MapError("logodds_limit must be positive");
  }
}

GlobalProbMap GlobalProbMap::for_scene(const SceneGrid& scene, const MapParams& params) {
  if (scene.width() > params.width || scene.height() > params.height) {
    throw MapError("scene " + scene.name() + " (" + std::to_string(scene.width()) + "x" +
                   std::to_string(scene.height()) + ") does not fit the " +
                   std::to_string(params.width) + "x" + std::to_string(params.height) +
                   " global map");
  }
  if (scene.cell_size() != params.cell_size) {
    throw MapError("scene cell_size differs from map cell_size");
  }
  return GlobalProbMap(params, Cell{(params.width - scene.width()) / 2,
                                    (params.height - scene.height()) / 2});
}

void GlobalProbMap::set_logodds(Cell c, double value) {
  if (!units_.contains(c)) {
    throw MapError("cell outside map");
  }
  units_[c] = std::clamp(to_units(value), -limit_units_, limit_units_);
}

namespace {

// True if the segment p -> p + t*d, t in [0,1], overlaps the cell square with
// positive length (Liang-Barsky clipping).
bool segment_crosses(double px, double py, double dx, double dy, double x0, double y0, double x1,
                     double y1) {
  double t0 = 0.0;
  double t1 = 1.0;
  auto clip = [&](double q, double r) {
    if (q == 0.0) {
      return r >= 0.0;
    }
    const double t = r / q;
    if (q < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    return t0 <= t1;
  };
  if (!clip(-dx, px - x0) || !clip(dx, x1 - px) || !clip(-dy, py - y0) || !clip(dy, y1 - py)) {
    return false;
  }
  return (t1 - t0) * std::hypot(dx, dy) > kCrossingTolerance;
}

// Cell struck by a ray ending at grid coordinates (gx, gy). An endpoint on a
// cell face belongs to the cell beyond that face only; stepping along the
// ray instead would cross into a diagonal neighbour near wall corners.
Cell hit_cell(double gx, double gy, double ux, double uy) {
  const double fx = ux != 0.0 ? std::abs(gx - std::round(gx)) : 1.0;
  const double fy = uy != 0.0 ? std::abs(gy - std::round(gy)) : 1.0;
  if (std::min(fx, fy) < kFaceSnapCells) {
    if (fx <= fy) {
      return Cell{static_cast<int>(std::round(gx)) - (ux < 0.0 ? 1 : 0), static_cast<int>(std::floor(gy))};
    }
    return Cell{static_cast<int>(std::floor(gx)), static_cast<int>(std::round(gy)) - (uy < 0.0 ? 1 : 0)};
  }
  return Cell{static_cast<int>(std::floor(gx)), static_cast<int>(std::floor(gy))};
}

}  // namespace

void integrate_scan(GlobalProbMap& map, const Pose& reported_pose, const DepthScan& scan) {
  const double cs = map.cell_size();
  const std::int32_t c_free = map.free_units();
  const std::int32_t c_occ = map.occ_units();
  const Cell agent = map.cell_at(reported_pose.x, reported_pose.y);
  const Pose origin = map.cell_center(Cell{0, 0});
  const double base_x = origin.x - 0.5 * cs;
  const double base_y = origin.y - 0.5 * cs;
  for (const auto& ray : scan.rays) {
    const double a = reported_pose.theta + ray.angle;
    const double ux = std::cos(a);
    const double uy = std::sin(a);
    const double gx = (reported_pose.x + ray.range * ux) / cs + map.offset().x;
    const double gy = (reported_pose.y + ray.range * uy) / cs + map.offset().y;
    const Cell end = ray.hit ? hit_cell(gx, gy, ux, uy)
                             : Cell{static_cast<int>(std::floor(gx)), static_cast<int>(std::floor(gy))};
    if (ray.hit && end == agent) {
      continue;  // the sensor cannot sit inside an obstacle
    }
    const double dx = ray.range * ux;
    const double dy = ray.range * uy;
    bresenham_visit(agent, end, [&](Cell c) {
      if (c == end) {
        map.add_units(c, ray.hit ? c_occ : c_free);
        return;
      }
      const double x0 = base_x + c.x * cs;
      const double y0 = base_y + c.y * cs;
      if (segment_crosses(reported_pose.x, reported_pose.y, dx, dy, x0, y0, x0 + cs, y0 + cs)) {
        map.add_units(c, c_free);
      }
    });
  }
}

void integrate_panorama(GlobalProbMap& map, const Pose& reported_pose,
                        const std::array<DepthScan, 4>& scans) {
  for (const auto& scan : scans) {
    Pose p = reported_pose;
    p.theta = scan.origin.theta;
    integrate_scan(map, p, scan);
  }
}

SemanticGrid classify(const GlobalProbMap& map) {
  SemanticGrid tri(map.width(), map.height(), CellState::Unknown);
  const auto& units = map.units().data();
  const std::int32_t occ = std::lround(map.params().tau_occ / GlobalProbMap::kLogOddsQuantum);
  const std::int32_t fr = std::lround(map.params().tau_free / GlobalProbMap::kLogOddsQuantum);
  auto& out = tri.data();
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto v = units[i];
    out[i] = v >= occ ? CellState::Occupied : v <= fr ? CellState::Free : CellState::Unknown;
  }
  return tri;
}

namespace {

// 4-neighborhood kernel: a free cell with any unknown neighbor.
template <class Emit>
void scan_frontiers(const SemanticGrid& tri, Emit&& emit) {
  const int w = tri.width();
  const int h = tri.height();
  const auto& d = tri.data();
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const std::size_t i = row + x;
      if (d[i] != CellState::Free) {
        continue;
      }
      if ((x > 0 && d[i - 1] == CellState::Unknown) ||
          (x + 1 < w && d[i + 1] == CellState::Unknown) ||
          (y > 0 && d[i - w] == CellState::Unknown) ||
          (y + 1 < h && d[i + w] == CellState::Unknown)) {
        emit(i);
      }
    }
  }
}

}  // namespace

std::vector<Cell> detect_frontiers(const SemanticGrid& tri) {
  std::vector<Cell> out;
  scan_frontiers(tri, [&](std::size_t i) { out.push_back(tri.cell(i)); });
  return out;
}

void label_frontiers(SemanticGrid& tri) {
  std::vector<std::size_t> idx;
  scan_frontiers(tri, [&](std::size_t i) { idx.push_back(i); });
  for (auto i : idx) {
    tri.data()[i] = CellState::Frontier;
  }
}

SemanticGrid semantic_map(const GlobalProbMap& map) {
  SemanticGrid s = classify(map);
  label_frontiers(s);
  return s;
}

EgoSemanticMap extract_egocentric(const SemanticGrid& semantic, Cell agent_cell) {
  EgoSemanticMap ego;
  ego.center = agent_cell;
  constexpr int half = EgoSemanticMap::kSize / 2;
  const int x0 = agent_cell.x - half;
  const int y0 = agent_cell.y - half;
  for (int j = 0; j < EgoSemanticMap::kSize; ++j) {
    const int gy = y0 + j;
    if (gy < 0 || gy >= semantic.height()) {
      continue;
    }
    const int i_lo = std::max(0, -x0);
    const int i_hi = std::min(EgoSemanticMap::kSize, semantic.width() - x0);
    for (int i = i_lo; i < i_hi; ++i) {
      ego.cells.at(i, j) = semantic.at(x0 + i, gy);
    }
  }
  return ego;
}

EgoSemanticMap extract_egocentric(const GlobalProbMap& map, const Pose& reported_pose) {
  return extract_egocentric(semantic_map(map), map.cell_at(reported_pose.x, reported_pose.y));
}

CoverageState update_coverage(const CoverageState& /*state*/, const GlobalProbMap& map,
                              const GroundTruthSurface& gt) {
  if (gt.cell_size != map.cell_size() || gt.width + map.offset().x > map.width() ||
      gt.height + map.offset().y > map.height() || map.offset().x < 0 || map.offset().y < 0) {
    throw MapError("coverage: ground truth and map dimensions do not match");
  }
  CoverageState next;
  for (const auto& g : gt.cells) {
    if (map.classify(map.to_map(g)) == CellState::Occupied) {
      next.covered.push_back(g);
    }
  }
  next.cr = gt.cells.empty() ? 0.0
                             : 100.0 * static_cast<double>(next.covered.size()) /
                                   static_cast<double>(gt.cells.size());
  return next;
}

std::uint8_t pixel_value(CellState s) {
  switch (s) {
    case CellState::Occupied:
      return kPixelOccupied;
    case CellState::Free:
      return kPixelFree;
    case CellState::Frontier:
      return kPixelFrontier;
    case CellState::Unknown:
      break;
  }
  return kPixelUnknown;
}

Grid<std::uint8_t> to_pixels(const SemanticGrid& semantic) {
  Grid<std::uint8_t> px(semantic.width(), semantic.height(), kPixelUnknown);
  for (std::size_t i = 0; i < semantic.size(); ++i) {
    px.data()[i] = pixel_value(semantic.data()[i]);
  }
  return px;
}

std::string to_pgm(const Grid<std::uint8_t>& pixels) {
  std::string out = "P2\n" + std::to_string(pixels.width()) + " " +
                    std::to_string(pixels.height()) + "\n255\n";
  for (int y = 0; y < pixels.height(); ++y) {
    for (int x = 0; x < pixels.width(); ++x) {
      if (x > 0) {
        out.push_back(' ');
      }
      out += std::to_string(pixels.at(x, y));
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace gleam
