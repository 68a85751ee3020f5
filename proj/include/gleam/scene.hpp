#ifndef GLEAM_SCENE_HPP
#define GLEAM_SCENE_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gleam/geometry.hpp"
#include "gleam/rng.hpp"

namespace gleam {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable ground-truth world. Cells outside the grid count as occupied.
///
/// Construction validates the invariants every episode relies on: the border
/// is fully occupied, at least one cell is free, and the free cells form a
/// single 4-connected region.
class SceneGrid {
 public:
  SceneGrid(int width, int height, double cell_size, std::vector<std::uint8_t> occupied,
            std::string name = "scene", std::uint64_t seed = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const std::string& name() const { return name_; }
  std::uint64_t seed() const { return seed_; }

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool occupied(Cell c) const {
    return !contains(c) || occupied_[static_cast<std::size_t>(c.y) * width_ + c.x] != 0;
  }
  bool free(Cell c) const { return !occupied(c); }
  std::size_t free_count() const { return free_count_; }

  /// Cell containing a point given in meters (scene frame, origin at the
  /// lower-left corner of cell (0,0)).
  Cell cell_at(double x, double y) const {
    return Cell{static_cast<int>(std::floor(x / cell_size_)),
                static_cast<int>(std::floor(y / cell_size_))};
  }
  Pose cell_center(Cell c, double theta = 0.0) const {
    return Pose{(c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_, theta};
  }

  const std::vector<std::uint8_t>& raw() const { return occupied_; }

  friend bool operator==(const SceneGrid& a, const SceneGrid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cell_size_ == b.cell_size_ &&
           a.occupied_ == b.occupied_;
  }

 private:
  int width_;
  int height_;
  double cell_size_;
  std::vector<std::uint8_t> occupied_;
  std::string name_;
  std::uint64_t seed_;
  std::size_t free_count_ = 0;
};

/// Occupied cells with at least one free 8-neighbor: the surface a sensor
/// can actually observe.
struct GroundTruthSurface {
  std::vector<Cell> cells;  // row-major order
  int width = 0;
  int height = 0;
  double cell_size = 0.0;

  std::size_t count() const { return cells.size(); }
};

/// Free cells whose whole k x k neighborhood is free.
struct StartRegion {
  std::vector<Cell> cells;  // row-major order
  int kernel = 3;
};

struct FloorplanConfig {
  int room_count = 4;
  int target_extent = 64;
  double clutter_density = 0.0;
  int door_width = 3;
  std::uint64_t seed = 0;
  double cell_size = 0.1;
};

/// Scene bundled with its derived products. Shared read-only across episodes.
struct PreparedScene {
  explicit PreparedScene(SceneGrid grid, int start_kernel = 3);

  SceneGrid grid;
  GroundTruthSurface surface;
  StartRegion start_region;
};

SceneGrid parse_scene(std::string_view text, std::string name = "scene");
std::string format_scene(const SceneGrid& scene);
SceneGrid load_scene(const std::filesystem::path& path);
void save_scene(const SceneGrid& scene, const std::filesystem::path& path);

SceneGrid generate_floorplan(const FloorplanConfig& config);

GroundTruthSurface ground_truth_surface(const SceneGrid& scene);
StartRegion start_region(const SceneGrid& scene, int kernel = 3);

Pose sample_start_pose(const StartRegion& region, double cell_size, Rng& rng);
Pose sample_start_pose(const SceneGrid& scene, Rng& rng, int kernel = 3);

/// Number of 4-connected components among free cells.
int count_free_components(const SceneGrid& scene);

}  // namespace gleam

#endif  // GLEAM_SCENE_HPP
