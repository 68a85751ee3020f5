#include "gleam/policy.hpp"

#include <algorithm>
#include <cmath>

namespace gleam {

std::string_view to_string(ActionResult r) {
  switch (r) {
    case ActionResult::Moved:
      return "Moved";
    case ActionResult::CollisionPenalized:
      return "CollisionPenalized";
    case ActionResult::Truncated:
      return "Truncated";
  }
  return "Moved";
}

std::optional<ActionResult> parse_action_result(std::string_view s) {
  if (s == "Moved") return ActionResult::Moved;
  if (s == "CollisionPenalized") return ActionResult::CollisionPenalized;
  if (s == "Truncated") return ActionResult::Truncated;
  return std::nullopt;
}

bool action_in_bounds(const Action& a, double radius) {
  return std::isfinite(a.dx) && std::isfinite(a.dy) && std::isfinite(a.dtheta) &&
         std::abs(a.dx) <= radius && std::abs(a.dy) <= radius && a.dtheta > -kPi &&
         a.dtheta <= kPi;
}

Action clamp_action(const Action& a, double radius, bool* clamped) {
  Action out;
  out.dx = std::clamp(std::isfinite(a.dx) ? a.dx : 0.0, -radius, radius);
  out.dy = std::clamp(std::isfinite(a.dy) ? a.dy : 0.0, -radius, radius);
  out.dtheta = std::isfinite(a.dtheta) ? wrap_angle(a.dtheta) : 0.0;
  if (clamped != nullptr) {
    *clamped = !(out == a);
  }
  return out;
}

Pose apply_action(const Pose& pose, const Action& a) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return Pose{pose.x + c * a.dx - s * a.dy, pose.y + s * a.dx + c * a.dy,
              wrap_angle(pose.theta + a.dtheta)};
}

Action action_towards(const Pose& pose, double wx, double wy, double dtheta) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double ex = wx - pose.x;
  const double ey = wy - pose.y;
  return Action{c * ex + s * ey, -s * ex + c * ey, dtheta};
}

// ---------------------------------------------------------------- random

Action random_action(Rng& rng, double radius, double sigma) {
  Action a;
  if (sigma > 0.0) {
    std::normal_distribution<double> offset(0.0, sigma);
    a.dx = std::clamp(offset(rng), -radius, radius);
    a.dy = std::clamp(offset(rng), -radius, radius);
  }
  // pi - U[0, 2pi) lies in (-pi, pi]
  a.dtheta = kPi - std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  return a;
}

RandomPolicy::RandomPolicy(std::uint64_t seed, double radius)
    : RandomPolicy(seed, radius, radius / 2.0) {}

RandomPolicy::RandomPolicy(std::uint64_t seed, double radius, double sigma)
    : rng_(seed), radius_(radius), sigma_(sigma) {}

Decision RandomPolicy::act(const Observation&, const PolicyContext&) {
  return Decision{random_action(rng_, radius_, sigma_), false};
}

// ---------------------------------------------------------------- vacuum

VacuumPolicy::VacuumPolicy(std::uint64_t seed, double radius) : rng_(seed), radius_(radius) {}

double VacuumPolicy::clear_distance(const Observation& obs, const GlobalProbMap& map,
                                    double heading, double radius) {
  const Pose& p = obs.pose();
  const double cs = map.cell_size();
  const double step = cs / 4.0;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  constexpr Cell mid = EgoSemanticMap::kCenterIndex;
  double blocked = radius + cs;
  for (double d = 0.0; d <= radius + cs; d += step) {
    const Cell g = map.cell_at(p.x + d * c, p.y + d * s);
    const Cell e{g.x - obs.ego.center.x + mid.x, g.y - obs.ego.center.y + mid.y};
    if (!obs.ego.cells.contains(e) || !is_traversable(obs.ego.cells[e])) {
      blocked = d;
      break;
    }
  }
  return std::clamp(blocked - cs, 0.0, radius);
}

Decision VacuumPolicy::act(const Observation& obs, const PolicyContext& ctx) {
  const double cs = ctx.map.cell_size();
  const double heading = obs.pose().theta;
  if (obs.last != ActionResult::CollisionPenalized) {
    const double d = clear_distance(obs, ctx.map, heading, radius_);
    if (d >= cs) {
      return Decision{Action{d, 0.0, 0.0}, false};
    }
  }
  const int k = std::uniform_int_distribution<int>(1, kMaxTurns)(rng_);
  const bool left = std::bernoulli_distribution(0.5)(rng_);
  const double turn = wrap_angle((left ? 1.0 : -1.0) * k * kTurnStep);
  double d = clear_distance(obs, ctx.map, heading + turn, radius_);
  if (d < cs) {
    d = 0.0;
  }
  return Decision{Action{d * std::cos(turn), d * std::sin(turn), turn}, false};
}

// ---------------------------------------------------------------- fbe

std::optional<FrontierChoice> nearest_frontier(const SemanticGrid& semantic,
                                               const GlobalProbMap& map, const Pose& pose,
                                               double radius, double max_path_length,
                                               std::span<const Cell> excluded) {
  const Cell agent = map.cell_at(pose.x, pose.y);
  if (!semantic.contains(agent) || !is_traversable(semantic[agent])) {
    return std::nullopt;
  }
  const auto dist = distance_field(semantic, agent);
  const double cs = map.cell_size();
  std::optional<Cell> best;
  double best_len = 0.0;
  for (std::size_t i = 0; i < semantic.size(); ++i) {
    if (semantic.data()[i] != CellState::Frontier) {
      continue;
    }
    const auto& d = dist.data()[i];
    if (!d) {
      continue;
    }
    const double len = d->cells() * cs;
    if (len > max_path_length) {
      continue;
    }
    if (!best || len < best_len) {
      if (std::binary_search(excluded.begin(), excluded.end(), semantic.cell(i))) {
        continue;
      }
      best = semantic.cell(i);
      best_len = len;
    }
  }
  if (!best) {
    return std::nullopt;
  }
  auto outcome = astar(semantic, agent, *best, max_path_length, cs);
  if (!outcome.ok()) {
    return std::nullopt;
  }
  FrontierChoice choice{*best, *best, std::move(*outcome.plan)};
  for (std::size_t i = 1; i < choice.plan.path.size(); ++i) {
    const Pose c = map.cell_center(choice.plan.path[i]);
    if (std::hypot(c.x - pose.x, c.y - pose.y) > radius) {
      choice.goal = choice.plan.path[i - 1];
      break;
    }
  }
  return choice;
}

Decision FbePolicy::act(const Observation& obs, const PolicyContext& ctx) {
  const Pose& pose = obs.pose();
  if (target_ && obs.last != ActionResult::Moved) {
    const auto at = std::lower_bound(blacklist_.begin(), blacklist_.end(), *target_);
    if (at == blacklist_.end() || *at != *target_) {
      blacklist_.insert(at, *target_);
    }
  }
  target_.reset();
  const auto choice =
      nearest_frontier(ctx.semantic, ctx.map, pose, radius_, ctx.max_path_length, blacklist_);
  if (!choice) {
    return Decision{kRotateInPlace, false};
  }
  target_ = choice->frontier;
  const Pose target = ctx.map.cell_center(choice->goal);
  Action a = action_towards(pose, target.x, target.y, 0.0);
  // rotation round-off may push a component a hair past the radius
  a.dx = std::clamp(a.dx, -radius_, radius_);
  a.dy = std::clamp(a.dy, -radius_, radius_);
  return Decision{a, false};
}

// ---------------------------------------------------------------- replay

Decision ReplayPolicy::act(const Observation&, const PolicyContext&) {
  if (next_ < actions_.size()) {
    return Decision{actions_[next_++], false};
  }
  return Decision{Action{}, false};
}

}  // namespace gleam
