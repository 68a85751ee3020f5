#ifndef GLEAM_POLICY_HPP
#define GLEAM_POLICY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gleam/geometry.hpp"
#include "gleam/mapping.hpp"
#include "gleam/planning.hpp"
#include "gleam/rng.hpp"

namespace gleam {

inline constexpr double kDefaultActionRadius = 3.2;

/// Relative long-term goal in the agent's local frame (x forward, y left).
struct Action {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

enum class ActionResult { Moved, CollisionPenalized, Truncated };

std::string_view to_string(ActionResult r);
std::optional<ActionResult> parse_action_result(std::string_view s);

struct Observation {
  EgoSemanticMap ego;
  std::vector<Pose> pose_history;  // oldest first, last is current
  int step_index = 0;
  ActionResult last = ActionResult::Moved;

  const Pose& pose() const { return pose_history.back(); }
};

/// Read-only environment state a heuristic policy may consult.
struct PolicyContext {
  const SemanticGrid& semantic;  // global map with frontier labels
  const GlobalProbMap& map;
  double max_path_length = kDefaultMaxPathLength;
};

struct Decision {
  Action action;
  bool clamped = false;  // an out-of-bounds component was clamped
};

bool action_in_bounds(const Action& a, double radius);
/// Clamps dx/dy into [-radius, radius] and wraps dtheta into (-pi, pi].
Action clamp_action(const Action& a, double radius, bool* clamped = nullptr);

/// World pose reached by applying a local-frame action.
Pose apply_action(const Pose& pose, const Action& a);
/// Local-frame action that reaches world point (wx, wy) from `pose`.
Action action_towards(const Pose& pose, double wx, double wy, double dtheta);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Decision act(const Observation& obs, const PolicyContext& ctx) = 0;
};

/// Gaussian goal offsets N(0, sigma^2) clipped to the action box; heading
/// uniform in (-pi, pi].
Action random_action(Rng& rng, double radius, double sigma);

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed, double radius = kDefaultActionRadius);
  RandomPolicy(std::uint64_t seed, double radius, double sigma);

  std::string name() const override { return "random"; }
  Decision act(const Observation& obs, const PolicyContext& ctx) override;

 private:
  Rng rng_;
  double radius_;
  double sigma_;
};

/// Robot-vacuum heuristic: drive straight while the way ahead is known free,
/// turn a random multiple of 9 degrees after a collision or when blocked.
class VacuumPolicy final : public Policy {
 public:
  static constexpr int kMaxTurns = 40;
  static constexpr double kTurnStep = kPi / 20.0;  // 9 degrees

  explicit VacuumPolicy(std::uint64_t seed, double radius = kDefaultActionRadius);

  std::string name() const override { return "vacuum"; }
  Decision act(const Observation& obs, const PolicyContext& ctx) override;

  /// Distance (meters, <= radius) the agent can drive along `heading` while
  /// keeping one cell of clearance to anything not known free.
  static double clear_distance(const Observation& obs, const GlobalProbMap& map, double heading,
                               double radius);

 private:
  Rng rng_;
  double radius_;
};

struct FrontierChoice {
  Cell frontier;  // global map cell
  Cell goal;      // frontier, or the farthest path cell within the action radius
  PlanResult plan;
};

/// Nearest frontier by A* path length (ties row-major), with the goal
/// walked back along the path to stay within `radius` of the agent.
/// Frontier cells listed in `excluded` (sorted) are skipped.
std::optional<FrontierChoice> nearest_frontier(const SemanticGrid& semantic,
                                               const GlobalProbMap& map, const Pose& pose,
                                               double radius, double max_path_length,
                                               std::span<const Cell> excluded = {});

class FbePolicy final : public Policy {
 public:
  explicit FbePolicy(double radius = kDefaultActionRadius) : radius_(radius) {}

  std::string name() const override { return "fbe"; }
  Decision act(const Observation& obs, const PolicyContext& ctx) override;

  static constexpr Action kRotateInPlace{0.0, 0.0, kPi / 2.0};

  /// Frontiers given up on after their goal was penalized or truncated.
  const std::vector<Cell>& blacklist() const { return blacklist_; }

 private:
  double radius_;
  std::optional<Cell> target_;
  std::vector<Cell> blacklist_;  // sorted
};

/// Plays back a fixed action list, then stays put.
class ReplayPolicy final : public Policy {
 public:
  explicit ReplayPolicy(std::vector<Action> actions, std::string label = "replay")
      : actions_(std::move(actions)), label_(std::move(label)) {}

  std::string name() const override { return label_; }
  Decision act(const Observation& obs, const PolicyContext& ctx) override;

 private:
  std::vector<Action> actions_;
  std::string label_;
  std::size_t next_ = 0;
};

}  // namespace gleam

#endif  // GLEAM_POLICY_HPP
