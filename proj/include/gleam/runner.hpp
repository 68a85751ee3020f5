#ifndef GLEAM_RUNNER_HPP
#define GLEAM_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gleam/episode.hpp"
#include "gleam/episode_log.hpp"
#include "gleam/metrics.hpp"
#include "gleam/run_config.hpp"

namespace gleam {

/// The i-th generated scene, named scene_NNN.
SceneGrid generated_scene(const GeneratorSpec& spec, int index);

/// Loads every `*.grid` file in `dir` (sorted by file name) or generates the
/// configured floorplans. Throws SceneError / ConfigError on any failure.
std::vector<std::shared_ptr<const PreparedScene>> load_run_scenes(const RunConfig& config);

/// Start pose for (master seed, scene, episode index). Independent of the
/// policy and the noise setting, so every policy starts from the same poses.
Pose episode_start_pose(std::uint64_t master_seed, const PreparedScene& scene, int episode);

std::uint64_t episode_policy_seed(std::uint64_t master_seed, const std::string& policy,
                                  const std::string& scene, int episode);
std::uint64_t episode_noise_seed(std::uint64_t master_seed, const std::string& noise,
                                 const std::string& scene, int episode);

/// Builds a policy from its config name (random, vacuum, fbe, bridge:<endpoint>).
/// Bridge handshake failures are returned as a policy that faults on its
/// first decision.
std::unique_ptr<Policy> make_policy(const std::string& spec, std::uint64_t seed,
                                    const EpisodeConfig& config,
                                    std::chrono::milliseconds bridge_timeout);

/// Directory-safe policy label: the policy name, or "bridge" for any bridge endpoint.
std::string policy_label(const std::string& spec);

struct RunOutcome {
  std::vector<EpisodeSummary> summaries;
  Report report;
  int episodes = 0;
  int failures = 0;  // bridge faults and episodes that threw
  std::vector<std::string> errors;
  std::vector<std::filesystem::path> logs;
};

/// Runs every (noise, policy, scene, episode) combination, writes one log per
/// episode below config.output plus report.csv and report.json. Results do
/// not depend on the thread count.
RunOutcome run_batch(const RunConfig& config,
                     const std::vector<std::shared_ptr<const PreparedScene>>& scenes);

}  // namespace gleam

#endif  // GLEAM_RUNNER_HPP
