#include "gleam/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gleam {

namespace {

// March one ray in cell units. Returns the entry distance (cell units) into
// the first occupied cell, or +inf if none is found before `limit`.
double march(const SceneGrid& scene, double px, double py, double dirx, double diry, double limit) {
  int cx = static_cast<int>(std::floor(px));
  int cy = static_cast<int>(std::floor(py));
  const double inf = std::numeric_limits<double>::infinity();

  const int step_x = dirx > 0 ? 1 : -1;
  const int step_y = diry > 0 ? 1 : -1;
  const double t_delta_x = dirx != 0.0 ? std::abs(1.0 / dirx) : inf;
  const double t_delta_y = diry != 0.0 ? std::abs(1.0 / diry) : inf;
  double t_max_x = dirx > 0 ? (cx + 1 - px) / dirx : dirx < 0 ? (cx - px) / dirx : inf;
  double t_max_y = diry > 0 ? (cy + 1 - py) / diry : diry < 0 ? (cy - py) / diry : inf;

  for (;;) {
    double t_entry;
    if (t_max_x < t_max_y) {
      t_entry = t_max_x;
      cx += step_x;
      t_max_x += t_delta_x;
    } else {
      t_entry = t_max_y;
      cy += step_y;
      t_max_y += t_delta_y;
    }
    if (t_entry >= limit) {
      return inf;
    }
    if (scene.occupied(Cell{cx, cy})) {
      return t_entry;
    }
  }
}

}  // namespace

DepthScan raycast(const SceneGrid& scene, const Pose& pose, double fov, int n_rays, double max_range) {
  if (n_rays < 1) {
    throw SensorError("n_rays must be >= 1");
  }
  if (!(max_range > 0.0)) {
    throw SensorError("max_range must be positive");
  }
  if (scene.occupied(scene.cell_at(pose.x, pose.y))) {
    throw SensorError("sensor origin lies inside an occupied cell");
  }
  const double cs = scene.cell_size();
  const double px = pose.x / cs;
  const double py = pose.y / cs;
  const double limit = max_range / cs;

  DepthScan scan;
  scan.origin = pose;
  scan.fov = fov;
  scan.max_range = max_range;
  scan.rays.reserve(static_cast<std::size_t>(n_rays));
  for (int i = 0; i < n_rays; ++i) {
    const double offset = ray_offset(i, n_rays, fov);
    const double a = pose.theta + offset;
    const double t = march(scene, px, py, std::cos(a), std::sin(a), limit);
    Ray ray;
    ray.angle = offset;
    if (std::isfinite(t)) {
      ray.range = std::max(t * cs, kMinRange);
      ray.hit = true;
    } else {
      ray.range = max_range;
      ray.hit = false;
    }
    scan.rays.push_back(ray);
  }
  return scan;
}

std::array<DepthScan, 4> capture_panorama(const SceneGrid& scene, const Pose& pose, double fov,
                                          int n_rays, double max_range) {
  std::array<DepthScan, 4> out;
  for (int k = 0; k < 4; ++k) {
    Pose heading = pose;
    heading.theta = pose.theta + k * (kPi / 2.0);
    out[static_cast<std::size_t>(k)] = raycast(scene, heading, fov, n_rays, max_range);
  }
  return out;
}

DepthScan apply_depth_noise(DepthScan scan, const NoiseModel& model, Rng& rng) {
  model.validate();
  if (model.depth_variance == 0.0) {
    return scan;
  }
  std::normal_distribution<double> noise(0.0, std::sqrt(model.depth_variance));
  for (auto& ray : scan.rays) {
    if (!ray.hit) {
      continue;
    }
    ray.range = std::clamp(ray.range + noise(rng), kMinRange, scan.max_range);
  }
  return scan;
}

Pose apply_pose_noise(const Pose& true_pose, const NoiseModel& model, int step_index,
                      PoseDrift& state, Rng& rng) {
  model.validate();
  if (model.pose_variance == 0.0) {
    state.last_step = step_index;
    return true_pose;
  }
  Pose reported = true_pose;
  if (model.pose_cumulative) {
    const int elapsed = std::max(0, step_index - state.last_step);
    state.last_step = step_index;
    if (elapsed > 0) {
      std::normal_distribution<double> noise(
          0.0, std::sqrt(model.pose_variance * elapsed / model.drift_horizon));
      state.dx += noise(rng);
      state.dy += noise(rng);
    }
    reported.x += state.dx;
    reported.y += state.dy;
  } else {
    std::normal_distribution<double> noise(0.0, std::sqrt(model.pose_variance));
    reported.x += noise(rng);
    reported.y += noise(rng);
    state.last_step = step_index;
  }
  return reported;
}

}  // namespace gleam
