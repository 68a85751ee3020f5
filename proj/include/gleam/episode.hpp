#ifndef GLEAM_EPISODE_HPP
#define GLEAM_EPISODE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gleam/mapping.hpp"
#include "gleam/planning.hpp"
#include "gleam/policy.hpp"
#include "gleam/scene.hpp"
#include "gleam/sensor.hpp"

namespace gleam {

struct EpisodeConfig {
  int keyframe_budget = 50;
  int stagnation_window = 10;
  double stagnation_threshold = 1.0;          // percent
  double success_coverage = 90.0;             // percent
  double termination_reward_coverage = 75.0;  // percent
  double collision_reward = -1.0;
  double termination_reward = 1.0;
  double max_path_length = kDefaultMaxPathLength;
  double action_radius = kDefaultActionRadius;
  int history_length = 10;
  int truncation_limit = 2;  // consecutive truncations that end the episode
  SensorConfig sensor;
  NoiseModel noise;
  MapParams map;

  void validate() const;
};

enum class TerminationCause { None, Budget, Success, Stagnation, CollisionContact, UnnavigableGoal, BridgeFault };

std::string_view to_string(TerminationCause c);
std::optional<TerminationCause> parse_termination_cause(std::string_view s);

struct StepRewards {
  double coverage = 0.0;
  double collision = 0.0;
  double termination = 0.0;

  double total() const { return coverage + collision + termination; }
  friend bool operator==(const StepRewards&, const StepRewards&) = default;
};

struct StepRecord {
  int t = 0;  // keyframe index, 1-based
  Action action;
  bool clamped = false;
  ActionResult result = ActionResult::Moved;
  PlanFailure plan_failure = PlanFailure::None;
  Pose true_pose;      // after the step
  Pose reported_pose;  // after the step
  StepRewards rewards;
  double cr = 0.0;
  std::size_t covered = 0;  // covered surface cells after the step
  double cd_m = 0.0;
  double plan_length = 0.0;  // meters travelled this step
};

struct EpisodeResult {
  std::vector<double> coverage_curve;  // CR after each keyframe
  std::vector<double> chamfer_curve;   // meters, after each keyframe
  std::vector<StepRewards> rewards;
  int keyframes = 0;
  double trajectory_length = 0.0;
  int collisions = 0;
  TerminationCause termination_cause = TerminationCause::None;
  double initial_cr = 0.0;
  std::size_t initial_covered = 0;
  double initial_cd_m = 0.0;
  std::string fault;  // bridge fault detail

  double final_cr() const { return coverage_curve.empty() ? initial_cr : coverage_curve.back(); }
  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// One exploration episode in one scene. Owns the global map, the true and
/// reported poses, and the noise streams.
class Environment {
 public:
  Environment(const PreparedScene& scene, const EpisodeConfig& config, const Pose& start);

  Observation observe() const;
  PolicyContext context() const { return PolicyContext{semantic_, map_, config_.max_path_length}; }

  /// Resolves one long-term goal. Must not be called once done().
  const StepRecord& step(const Decision& decision);

  /// Ends the episode because the policy bridge failed.
  void abort_bridge(const std::string& what);

  bool done() const { return result_.termination_cause != TerminationCause::None; }
  const EpisodeResult& result() const { return result_; }
  const PreparedScene& scene() const { return scene_; }
  const EpisodeConfig& config() const { return config_; }
  const GlobalProbMap& map() const { return map_; }
  const SemanticGrid& semantic() const { return semantic_; }
  const CoverageState& coverage() const { return coverage_; }
  const Pose& true_pose() const { return true_pose_; }
  const Pose& reported_pose() const { return reported_pose_; }
  const std::vector<StepRecord>& steps() const { return steps_; }
  /// Executed plan of the most recent step, in map cells (empty if none).
  const std::vector<Cell>& last_path() const { return last_path_; }

 private:
  void capture();
  void finish(TerminationCause cause);

  const PreparedScene& scene_;
  EpisodeConfig config_;
  GlobalProbMap map_;
  SemanticGrid semantic_;
  CoverageState coverage_;
  Pose true_pose_;
  Pose reported_pose_;
  PoseDrift drift_;
  Rng pose_rng_;
  Rng depth_rng_;
  std::vector<Pose> history_;
  ActionResult last_result_ = ActionResult::Moved;
  int consecutive_truncations_ = 0;
  std::vector<StepRecord> steps_;
  std::vector<Cell> last_path_;
  EpisodeResult result_;
};

class EpisodeObserver {
 public:
  virtual ~EpisodeObserver() = default;
  virtual void on_start(const Environment& /*env*/) {}
  virtual void on_step(const Environment& /*env*/, const StepRecord& /*record*/) {}
  virtual void on_end(const Environment& /*env*/) {}
};

EpisodeResult run_episode(const PreparedScene& scene, Policy& policy, const EpisodeConfig& config,
                          const Pose& start, EpisodeObserver* observer = nullptr);

/// Per-episode scene assignment for training-style pools: each episode the
/// active scene is replaced, with probability p, by a uniformly drawn
/// inactive member.
class ScenePoolScheduler {
 public:
  ScenePoolScheduler(std::size_t pool_size, double p, std::uint64_t seed,
                     std::size_t initial_active = 0);

  /// Scene index for the next episode.
  std::size_t next();
  std::size_t active() const { return active_; }
  std::size_t swaps() const { return swaps_; }

 private:
  std::size_t pool_size_;
  double p_;
  Rng rng_;
  std::size_t active_;
  std::size_t swaps_ = 0;
};

}  // namespace gleam

#endif  // GLEAM_EPISODE_HPP
