#include "gleam/episode.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gleam/bridge.hpp"
#include "gleam/metrics.hpp"

namespace gleam {

std::string_view to_string(TerminationCause c) {
  switch (c) {
    case TerminationCause::None:
      return "None";
    case TerminationCause::Budget:
      return "Budget";
    case TerminationCause::Success:
      return "Success";
    case TerminationCause::Stagnation:
      return "Stagnation";
    case TerminationCause::CollisionContact:
      return "CollisionContact";
    case TerminationCause::UnnavigableGoal:
      return "UnnavigableGoal";
    case TerminationCause::BridgeFault:
      return "BridgeFault";
  }
  return "None";
}

std::optional<TerminationCause> parse_termination_cause(std::string_view s) {
  for (auto c : {TerminationCause::None, TerminationCause::Budget, TerminationCause::Success,
                 TerminationCause::Stagnation, TerminationCause::CollisionContact,
                 TerminationCause::UnnavigableGoal, TerminationCause::BridgeFault}) {
    if (to_string(c) == s) {
      return c;
    }
  }
  return std::nullopt;
}

void EpisodeConfig::validate() const {
  auto pct = [](double v) { return v >= 0.0 && v <= 100.0; };
  if (keyframe_budget < 1) {
    throw std::invalid_argument("keyframe_budget must be >= 1");
  }
  if (stagnation_window < 1) {
    throw std::invalid_argument("stagnation_window must be >= 1");
  }
  if (!pct(stagnation_threshold) || !pct(success_coverage) || !pct(termination_reward_coverage)) {
    throw std::invalid_argument("coverage thresholds must lie in [0, 100]");
  }
  if (!(max_path_length > 0.0) || !(action_radius > 0.0)) {
    throw std::invalid_argument("max_path_length and action_radius must be positive");
  }
  if (history_length < 1 || truncation_limit < 1) {
    throw std::invalid_argument("history_length and truncation_limit must be >= 1");
  }
  if (sensor.n_rays < 1 || !(sensor.max_range > 0.0) || !(sensor.fov > 0.0)) {
    throw std::invalid_argument("sensor parameters must be positive");
  }
  noise.validate();
}

Environment::Environment(const PreparedScene& scene, const EpisodeConfig& config, const Pose& start)
    : scene_(scene),
      config_(config),
      map_(GlobalProbMap::for_scene(scene.grid, config.map)),
      true_pose_(start),
      pose_rng_(split_seed(config.noise.rng_seed, {hash_label("pose-noise")})),
      depth_rng_(split_seed(config.noise.rng_seed, {hash_label("depth-noise")})) {
  config_.validate();
  if (scene.grid.occupied(scene.grid.cell_at(start.x, start.y))) {
    throw std::invalid_argument("start pose lies in an occupied cell");
  }
  true_pose_.theta = wrap_angle(start.theta);
  reported_pose_ = apply_pose_noise(true_pose_, config_.noise, 0, drift_, pose_rng_);
  capture();
  history_.push_back(reported_pose_);
  result_.initial_cr = coverage_.cr;
  result_.initial_covered = coverage_.covered.size();
  result_.initial_cd_m = chamfer(scene_.surface, coverage_.covered, map_.cell_size());
}

void Environment::capture() {
  auto scans = capture_panorama(scene_.grid, true_pose_, config_.sensor);
  for (auto& scan : scans) {
    scan = apply_depth_noise(std::move(scan), config_.noise, depth_rng_);
  }
  integrate_panorama(map_, reported_pose_, scans);
  semantic_ = semantic_map(map_);
  coverage_ = update_coverage(coverage_, map_, scene_.surface);
}

Observation Environment::observe() const {
  Observation obs;
  obs.ego = extract_egocentric(semantic_, map_.cell_at(reported_pose_.x, reported_pose_.y));
  const auto h = static_cast<std::size_t>(config_.history_length);
  const auto first = history_.size() > h ? history_.size() - h : 0;
  obs.pose_history.assign(history_.begin() + static_cast<std::ptrdiff_t>(first), history_.end());
  obs.step_index = result_.keyframes;
  obs.last = last_result_;
  return obs;
}

const StepRecord& Environment::step(const Decision& decision) {
  if (done()) {
    throw std::logic_error("step() called on a finished episode");
  }
  const double cs = map_.cell_size();
  StepRecord rec;
  rec.t = result_.keyframes + 1;
  rec.action = decision.action;
  rec.clamped = decision.clamped;
  last_path_.clear();

  const double cr_before = coverage_.cr;
  // The simulator resolves goals from the true pose on the agent's map; pose
  // noise only corrupts what gets mapped and what the policy observes.
  const Pose true_goal = apply_action(true_pose_, decision.action);
  const Cell goal_cell = map_.cell_at(true_goal.x, true_goal.y);
  const CellState goal_state = map_.classify(goal_cell);
  const bool goal_truly_occupied =
      scene_.grid.occupied(scene_.grid.cell_at(true_goal.x, true_goal.y));

  bool contact = false;
  if (goal_state == CellState::Occupied ||
      (goal_state != CellState::Unknown && goal_truly_occupied)) {
    rec.result = ActionResult::CollisionPenalized;
    rec.rewards.collision = config_.collision_reward;
    ++result_.collisions;
  } else {
    const Cell start_cell = map_.cell_at(true_pose_.x, true_pose_.y);
    auto nav = is_navigable(semantic_, start_cell, goal_cell, config_.max_path_length, cs);
    if (!nav.ok()) {
      rec.result = ActionResult::Truncated;
      rec.plan_failure = nav.failure;
    } else {
      rec.result = ActionResult::Moved;
      const PlanResult& plan = *nav.plan;
      // A corrupted map can route the agent through a real obstacle.
      StepCost travelled;
      for (std::size_t i = 0; i < plan.path.size() && !contact; ++i) {
        const Cell c = plan.path[i];
        if (i > 0) {
          const Cell p = plan.path[i - 1];
          (p.x != c.x && p.y != c.y ? travelled.diagonal : travelled.orthogonal) += 1;
        }
        contact = scene_.grid.occupied(map_.to_scene(c));
      }
      last_path_ = plan.path;
      if (contact) {
        rec.plan_length = travelled.cells() * cs;
        result_.trajectory_length += rec.plan_length;
      } else {
        rec.plan_length = plan.length;
        result_.trajectory_length += plan.length;
        true_pose_ = true_goal;
        reported_pose_ = apply_pose_noise(true_pose_, config_.noise, rec.t, drift_, pose_rng_);
        capture();
      }
    }
  }

  if (rec.result == ActionResult::Truncated) {
    ++consecutive_truncations_;
  } else {
    consecutive_truncations_ = 0;
  }
  last_result_ = rec.result;
  history_.push_back(reported_pose_);

  rec.rewards.coverage = coverage_.cr - cr_before;
  rec.cr = coverage_.cr;
  rec.covered = coverage_.covered.size();
  rec.cd_m = chamfer(scene_.surface, coverage_.covered, cs);
  rec.true_pose = true_pose_;
  rec.reported_pose = reported_pose_;

  result_.keyframes = rec.t;
  result_.coverage_curve.push_back(rec.cr);
  result_.chamfer_curve.push_back(rec.cd_m);
  result_.rewards.push_back(rec.rewards);
  steps_.push_back(rec);

  if (contact) {
    finish(TerminationCause::CollisionContact);
  } else if (coverage_.cr >= config_.success_coverage) {
    finish(TerminationCause::Success);
  } else if (consecutive_truncations_ >= config_.truncation_limit) {
    finish(TerminationCause::UnnavigableGoal);
  } else if (result_.keyframes >= config_.stagnation_window &&
             [&] {
               double gain = 0.0;
               const auto n = result_.rewards.size();
               for (auto i = n - static_cast<std::size_t>(config_.stagnation_window); i < n; ++i) {
                 gain += result_.rewards[i].coverage;
               }
               return gain < config_.stagnation_threshold;
             }()) {
    finish(TerminationCause::Stagnation);
  } else if (result_.keyframes >= config_.keyframe_budget) {
    finish(TerminationCause::Budget);
  }
  return steps_.back();
}

void Environment::finish(TerminationCause cause) {
  result_.termination_cause = cause;
  if (result_.final_cr() > config_.termination_reward_coverage && !result_.rewards.empty()) {
    result_.rewards.back().termination = config_.termination_reward;
    if (!steps_.empty()) {
      steps_.back().rewards.termination = config_.termination_reward;
    }
  }
}

void Environment::abort_bridge(const std::string& what) {
  if (done()) {
    return;
  }
  result_.fault = what;
  finish(TerminationCause::BridgeFault);
}

EpisodeResult run_episode(const PreparedScene& scene, Policy& policy, const EpisodeConfig& config,
                          const Pose& start, EpisodeObserver* observer) {
  Environment env(scene, config, start);
  if (observer != nullptr) {
    observer->on_start(env);
  }
  while (!env.done()) {
    Decision decision;
    try {
      decision = policy.act(env.observe(), env.context());
    } catch (const BridgeError& e) {
      env.abort_bridge(std::string(e.kind() == BridgeFaultKind::Timeout ? "BridgeTimeout"
                                                                        : "BridgeProtocol") +
                       ": " + e.what());
      break;
    }
    const auto& rec = env.step(decision);
    if (observer != nullptr) {
      observer->on_step(env, rec);
    }
  }
  if (observer != nullptr) {
    observer->on_end(env);
  }
  return env.result();
}

ScenePoolScheduler::ScenePoolScheduler(std::size_t pool_size, double p, std::uint64_t seed,
                                       std::size_t initial_active)
    : pool_size_(pool_size), p_(p), rng_(seed), active_(initial_active) {
  if (pool_size_ == 0) {
    throw std::invalid_argument("scene pool is empty");
  }
  if (!(p_ >= 0.0 && p_ <= 1.0)) {
    throw std::invalid_argument("swap probability must lie in [0, 1]");
  }
  if (active_ >= pool_size_) {
    throw std::invalid_argument("initial scene outside pool");
  }
}

std::size_t ScenePoolScheduler::next() {
  if (pool_size_ > 1 && std::bernoulli_distribution(p_)(rng_)) {
    // uniform over the inactive members
    auto pick = std::uniform_int_distribution<std::size_t>(0, pool_size_ - 2)(rng_);
    if (pick >= active_) {
      ++pick;
    }
    active_ = pick;
    ++swaps_;
  }
  return active_;
}

}  // namespace gleam
