#ifndef GLEAM_MAPPING_HPP
#define GLEAM_MAPPING_HPP

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "gleam/geometry.hpp"
#include "gleam/scene.hpp"
#include "gleam/sensor.hpp"

namespace gleam {

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CellState : std::uint8_t { Occupied, Free, Unknown, Frontier };

inline bool is_traversable(CellState s) { return s == CellState::Free || s == CellState::Frontier; }

using SemanticGrid = Grid<CellState>;

/// Visits the cells of the digital segment a -> b, both ends included.
///
/// The major axis advances one cell per step; the minor coordinate is the
/// exact line value rounded to the nearest cell, ties toward the larger world
/// coordinate, so the traversal of b -> a is the reverse of a -> b.
template <class Visitor>
void bresenham_visit(Cell a, Cell b, Visitor&& visit) {
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const int adx = std::abs(dx);
  const int ady = std::abs(dy);
  const int sx = dx >= 0 ? 1 : -1;
  const int sy = dy >= 0 ? 1 : -1;
  const bool x_major = adx >= ady;
  const int major = x_major ? adx : ady;
  const int minor = x_major ? ady : adx;
  // minor offset at step i is floor((2*i*minor + major) / (2*major)) when the
  // minor axis runs toward +inf, ceil((2*i*minor - major) / (2*major)) otherwise
  const bool ties_up = (x_major ? sy : sx) > 0;
  const long two_major = 2L * major;
  long rem = major;
  int q = 0;
  Cell c = a;
  for (int i = 0;; ++i) {
    visit(c);
    if (i == major) {
      break;
    }
    rem += 2L * minor;
    const bool bump = ties_up ? rem >= two_major : rem > two_major;
    if (bump) {
      rem -= two_major;
      ++q;
    }
    if (x_major) {
      c.x += sx;
      c.y = a.y + sy * q;
    } else {
      c.y += sy;
      c.x = a.x + sx * q;
    }
  }
}

inline std::vector<Cell> bresenham(Cell a, Cell b) {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y))) + 1);
  bresenham_visit(a, b, [&out](Cell c) { out.push_back(c); });
  return out;
}

struct MapParams {
  int width = 128;
  int height = 128;
  double cell_size = 0.1;
  double c_occ = 2.2;
  double c_free = -0.4;
  double tau_occ = 1.0;
  double tau_free = -0.8;
  double logodds_limit = 10.0;
};

/// Probabilistic global occupancy map in the world frame.
///
/// Log-odds are stored as integers in units of kLogOddsQuantum, so repeated
/// increments are exact and order-independent below the clamp.
class GlobalProbMap {
 public:
  static constexpr double kLogOddsQuantum = 1e-3;

  explicit GlobalProbMap(const MapParams& params = {}, Cell offset = {0, 0});

  /// Map sized by `params`, with the scene centered in it. Rejects scenes
  /// that do not fit or whose cell size differs.
  static GlobalProbMap for_scene(const SceneGrid& scene, const MapParams& params = {});

  const MapParams& params() const { return params_; }
  int width() const { return params_.width; }
  int height() const { return params_.height; }
  double cell_size() const { return params_.cell_size; }
  /// Map cell corresponding to scene cell (0,0).
  Cell offset() const { return offset_; }
  bool contains(Cell c) const { return units_.contains(c); }

  Cell cell_at(double x, double y) const {
    return Cell{static_cast<int>(std::floor(x / params_.cell_size)) + offset_.x,
                static_cast<int>(std::floor(y / params_.cell_size)) + offset_.y};
  }
  Cell to_map(Cell scene_cell) const { return Cell{scene_cell.x + offset_.x, scene_cell.y + offset_.y}; }
  Cell to_scene(Cell map_cell) const { return Cell{map_cell.x - offset_.x, map_cell.y - offset_.y}; }
  /// World position (meters) of the center of a map cell.
  Pose cell_center(Cell map_cell) const {
    return Pose{(map_cell.x - offset_.x + 0.5) * params_.cell_size,
                (map_cell.y - offset_.y + 0.5) * params_.cell_size, 0.0};
  }

  double logodds(Cell c) const { return units_[c] * kLogOddsQuantum; }
  std::int32_t logodds_units(Cell c) const { return units_[c]; }
  std::int32_t occ_units() const { return occ_units_; }
  std::int32_t free_units() const { return free_units_; }

  /// Adds `delta_units` to a cell, clamped to the log-odds limit. Cells
  /// outside the map are ignored.
  void add_units(Cell c, std::int32_t delta_units) {
    if (!units_.contains(c)) {
      return;
    }
    auto& v = units_[c];
    v = std::clamp(v + delta_units, -limit_units_, limit_units_);
  }
  void set_logodds(Cell c, double value);

  CellState classify(Cell c) const {
    if (!units_.contains(c)) {
      return CellState::Unknown;
    }
    const auto v = units_[c];
    if (v >= tau_occ_units_) {
      return CellState::Occupied;
    }
    if (v <= tau_free_units_) {
      return CellState::Free;
    }
    return CellState::Unknown;
  }

  const Grid<std::int32_t>& units() const { return units_; }

 private:
  MapParams params_;
  Cell offset_;
  Grid<std::int32_t> units_;
  std::int32_t occ_units_;
  std::int32_t free_units_;
  std::int32_t tau_occ_units_;
  std::int32_t tau_free_units_;
  std::int32_t limit_units_;
};

/// Ray-casts every ray of `scan` from `reported_pose` into the map along the
/// Bresenham line from the agent cell to the endpoint cell. The endpoint gets
/// c_occ on a hit and c_free otherwise; other line cells get c_free when the
/// measured ray segment actually passes through them. Hits that end in the
/// agent's own cell are dropped. Cells outside the map are skipped.
void integrate_scan(GlobalProbMap& map, const Pose& reported_pose, const DepthScan& scan);

/// Integrates the four scans of a panorama; each scan keeps its own heading
/// and takes the reported position.
void integrate_panorama(GlobalProbMap& map, const Pose& reported_pose,
                        const std::array<DepthScan, 4>& scans);

/// Tri-state view {Occupied, Free, Unknown}.
SemanticGrid classify(const GlobalProbMap& map);

/// Free cells with at least one Unknown 4-neighbor, row-major.
std::vector<Cell> detect_frontiers(const SemanticGrid& tri);

/// Relabels frontier cells in place. Input must be tri-state.
void label_frontiers(SemanticGrid& tri);

/// classify + label_frontiers.
SemanticGrid semantic_map(const GlobalProbMap& map);

struct EgoSemanticMap {
  static constexpr int kSize = 128;

  Cell center;  // agent cell in global map coordinates
  SemanticGrid cells{kSize, kSize, CellState::Unknown};

  /// Ego index of the agent.
  static constexpr Cell kCenterIndex{kSize / 2, kSize / 2};
};

/// Axis-aligned crop of the semantic map centered on the agent cell.
/// Out-of-map cells are Unknown.
EgoSemanticMap extract_egocentric(const SemanticGrid& semantic, Cell agent_cell);
EgoSemanticMap extract_egocentric(const GlobalProbMap& map, const Pose& reported_pose);

struct CoverageState {
  std::vector<Cell> covered;  // scene coordinates, row-major
  double cr = 0.0;            // percent
};

CoverageState update_coverage(const CoverageState& state, const GlobalProbMap& map,
                              const GroundTruthSurface& gt);

/// PGM gray levels.
inline constexpr std::uint8_t kPixelOccupied = 0;
inline constexpr std::uint8_t kPixelTrajectory = 32;
inline constexpr std::uint8_t kPixelFrontier = 64;
inline constexpr std::uint8_t kPixelUnknown = 128;
inline constexpr std::uint8_t kPixelFree = 255;

std::uint8_t pixel_value(CellState s);
Grid<std::uint8_t> to_pixels(const SemanticGrid& semantic);
/// Plain (P2) PGM, one image row per grid row.
std::string to_pgm(const Grid<std::uint8_t>& pixels);

}  // namespace gleam

#endif  // GLEAM_MAPPING_HPP
