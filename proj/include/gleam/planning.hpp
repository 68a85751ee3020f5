#ifndef GLEAM_PLANNING_HPP
#define GLEAM_PLANNING_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "gleam/geometry.hpp"
#include "gleam/mapping.hpp"

namespace gleam {

/// Path cost as step counts. Lengths are always derived from the counts, so
/// equal-length paths compare exactly equal regardless of step order.
struct StepCost {
  int orthogonal = 0;
  int diagonal = 0;

  double cells() const { return orthogonal + diagonal * kSqrt2; }
  friend bool operator==(const StepCost&, const StepCost&) = default;
};

struct PlanResult {
  std::vector<Cell> path;  // start to goal inclusive
  StepCost cost;
  double length = 0.0;     // meters
};

enum class PlanFailure { None, InvalidStart, NotFree, NoPath, TooLong };

std::string_view to_string(PlanFailure f);

struct PlanOutcome {
  std::optional<PlanResult> plan;
  PlanFailure failure = PlanFailure::None;

  bool ok() const { return plan.has_value(); }
};

/// Default navigability threshold: the 12.8 m global-map diameter.
inline constexpr double kDefaultMaxPathLength = 12.8;

/// 8-connected A* over traversable cells (Free or Frontier). Diagonal moves
/// need both orthogonal neighbors traversable. Euclidean heuristic. Ties on
/// f pop the lower h first, then the lower (y, x).
PlanOutcome astar(const SemanticGrid& grid, Cell start, Cell goal, double max_length,
                  double cell_size);

/// astar plus the requirement that the goal itself is free.
PlanOutcome is_navigable(const SemanticGrid& grid, Cell start, Cell goal, double max_length,
                         double cell_size);

/// Single-source shortest step costs under the same motion model as astar.
/// Unreached cells hold nullopt.
Grid<std::optional<StepCost>> distance_field(const SemanticGrid& grid, Cell start);

}  // namespace gleam

#endif  // GLEAM_PLANNING_HPP
