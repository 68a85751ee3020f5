#ifndef GLEAM_SENSOR_HPP
#define GLEAM_SENSOR_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gleam/geometry.hpp"
#include "gleam/rng.hpp"
#include "gleam/scene.hpp"

namespace gleam {

class SensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Ray {
  double angle = 0.0;  // relative to the scan heading
  double range = 0.0;  // meters, in (0, max_range]
  bool hit = false;

  friend bool operator==(const Ray&, const Ray&) = default;
};

/// Planar depth scan: the top-down projection of one depth image.
struct DepthScan {
  Pose origin;
  std::vector<Ray> rays;
  double fov = 0.0;
  double max_range = 0.0;

  friend bool operator==(const DepthScan&, const DepthScan&) = default;
};

struct SensorConfig {
  double fov = kPi / 2.0;
  int n_rays = 256;
  double max_range = 5.0;
};

struct NoiseModel {
  double pose_variance = 0.0;   // m^2
  bool pose_cumulative = true;
  double depth_variance = 0.0;  // m^2
  std::uint64_t rng_seed = 0;
  // Cumulative mode: keyframes after which the accumulated drift has
  // variance pose_variance.
  int drift_horizon = 50;

  bool noiseless() const { return pose_variance == 0.0 && depth_variance == 0.0; }
  void validate() const {
    if (!(pose_variance >= 0.0) || !(depth_variance >= 0.0)) {
      throw std::invalid_argument("noise variances must be non-negative");
    }
    if (drift_horizon < 1) {
      throw std::invalid_argument("drift_horizon must be >= 1");
    }
  }
};

/// Pose-noise state owned by one episode.
struct PoseDrift {
  double dx = 0.0;
  double dy = 0.0;
  int last_step = 0;
};

/// Offset of ray i out of n, evenly spanning [-fov/2, fov/2] with half-step
/// margins so that adjacent scans tile without duplicate angles.
inline double ray_offset(int i, int n, double fov) {
  return -0.5 * fov + (static_cast<double>(i) + 0.5) * fov / static_cast<double>(n);
}

/// Marches each ray cell by cell (Amanatides-Woo DDA) until the first
/// occupied cell. Range is the distance to that cell's boundary.
DepthScan raycast(const SceneGrid& scene, const Pose& pose, double fov, int n_rays, double max_range);
inline DepthScan raycast(const SceneGrid& scene, const Pose& pose, const SensorConfig& s) {
  return raycast(scene, pose, s.fov, s.n_rays, s.max_range);
}

/// Four scans at headings theta + k*pi/2.
std::array<DepthScan, 4> capture_panorama(const SceneGrid& scene, const Pose& pose, double fov,
                                          int n_rays, double max_range);
inline std::array<DepthScan, 4> capture_panorama(const SceneGrid& scene, const Pose& pose,
                                                 const SensorConfig& s) {
  return capture_panorama(scene, pose, s.fov, s.n_rays, s.max_range);
}

/// Smallest range a perturbed ray may report.
inline constexpr double kMinRange = 1e-6;

DepthScan apply_depth_noise(DepthScan scan, const NoiseModel& model, Rng& rng);

/// Returns the pose the agent believes it is at. In cumulative mode the drift
/// is a random walk whose variance grows by pose_variance / drift_horizon per
/// elapsed keyframe; otherwise each call draws fresh N(0, pose_variance). Heading is never perturbed.
Pose apply_pose_noise(const Pose& true_pose, const NoiseModel& model, int step_index,
                      PoseDrift& state, Rng& rng);

}  // namespace gleam

#endif  // GLEAM_SENSOR_HPP
