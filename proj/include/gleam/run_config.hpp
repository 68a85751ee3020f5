#ifndef GLEAM_RUN_CONFIG_HPP
#define GLEAM_RUN_CONFIG_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gleam/episode.hpp"
#include "gleam/scene.hpp"

namespace gleam {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenes produced by the floorplan generator instead of loaded from disk.
struct GeneratorSpec {
  int rooms = 6;
  int extent = 64;
  double clutter = 0.1;
  int count = 20;
  std::uint64_t seed = 1;
  int door_width = 3;
};

/// Floorplan settings for the i-th generated scene.
FloorplanConfig generated_scene_config(const GeneratorSpec& spec, int index);

/// Batch evaluation settings.
///
/// Text form: one `key = value` per line, `#` starts a comment, blank lines
/// are ignored, every key at most once, unknown keys are errors. Lists are
/// comma separated. Keys:
///
///   dataset, scenes_dir, gen.rooms, gen.extent, gen.clutter, gen.count,
///   gen.seed, gen.door_width, policy (random | vacuum | fbe |
///   bridge:<endpoint>, list), episodes_per_scene, seed, threads, output,
///   noise (list of <pose_var>:<depth_var>[:c|:n]), scene_swap_probability,
///   bridge.timeout_ms, and the episode overrides keyframe_budget,
///   stagnation_window, stagnation_threshold, success_coverage,
///   termination_reward_coverage, collision_reward, termination_reward,
///   max_path_length, action_radius, history_length, truncation_limit,
///   sensor.fov_deg, sensor.n_rays, sensor.max_range, map.c_occ,
///   map.c_free, map.tau_occ, map.tau_free, map.logodds_limit,
///   noise.drift_horizon.
///
/// Exactly one of scenes_dir and the gen.* keys selects the scenes.
struct RunConfig {
  std::string dataset = "default";
  std::optional<std::filesystem::path> scenes_dir;
  std::optional<GeneratorSpec> generator;
  std::vector<std::string> policies;
  int episodes_per_scene = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path output = "gleam-out";
  std::vector<NoiseModel> noise_grid;  // rng_seed unused; set per episode
  std::optional<double> scene_swap_probability;
  std::chrono::milliseconds bridge_timeout{5000};
  EpisodeConfig episode;
};

RunConfig parse_run_config(std::string_view text, const std::string& source = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses `<pose_var>:<depth_var>[:c|:n]`; cumulative pose noise by default.
NoiseModel parse_noise_setting(std::string_view text);

/// Number of worker threads: GLEAM_SIM_THREADS when set, else `configured`.
int effective_threads(int configured);

}  // namespace gleam

#endif  // GLEAM_RUN_CONFIG_HPP
