#include "gleam/planning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>

namespace gleam {

std::string_view to_string(PlanFailure f) {
  switch (f) {
    case PlanFailure::None:
      return "None";
    case PlanFailure::InvalidStart:
      return "InvalidStart";
    case PlanFailure::NotFree:
      return "NotFree";
    case PlanFailure::NoPath:
      return "NoPath";
    case PlanFailure::TooLong:
      return "TooLong";
  }
  return "Unknown";
}

namespace {

bool passable(const SemanticGrid& g, Cell c) { return g.contains(c) && is_traversable(g[c]); }

// Expands the legal moves out of `c`: 4 orthogonal, plus diagonals whose two
// orthogonal neighbors are both passable.
template <class F>
void for_each_move(const SemanticGrid& g, Cell c, F&& f) {
  for (const auto& d : kNeighbors8) {
    const Cell n{c.x + d.x, c.y + d.y};
    if (!passable(g, n)) {
      continue;
    }
    const bool diagonal = d.x != 0 && d.y != 0;
    if (diagonal && (!passable(g, Cell{c.x + d.x, c.y}) || !passable(g, Cell{c.x, c.y + d.y}))) {
      continue;
    }
    f(n, diagonal);
  }
}

struct OpenEntry {
  double f;
  double h;
  Cell cell;
};

struct OpenGreater {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    return std::tie(a.f, a.h, a.cell) > std::tie(b.f, b.h, b.cell);
  }
};

}  // namespace

PlanOutcome astar(const SemanticGrid& grid, Cell start, Cell goal, double max_length,
                  double cell_size) {
  PlanOutcome out;
  if (!passable(grid, start)) {
    out.failure = PlanFailure::InvalidStart;
    return out;
  }
  if (!passable(grid, goal)) {
    out.failure = PlanFailure::NoPath;
    return out;
  }

  constexpr std::int32_t kNone = -1;
  const auto n = grid.size();
  std::vector<StepCost> g(n);
  std::vector<double> g_len(n, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> parent(n, kNone);
  std::vector<std::uint8_t> closed(n, 0);

  auto heuristic = [&goal](Cell c) { return std::hypot(c.x - goal.x, c.y - goal.y); };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenGreater> open;
  const auto si = grid.index(start);
  g_len[si] = 0.0;
  open.push({heuristic(start), heuristic(start), start});

  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const auto ci = grid.index(top.cell);
    if (closed[ci]) {
      continue;
    }
    closed[ci] = 1;
    if (top.cell == goal) {
      found = true;
      break;
    }
    for_each_move(grid, top.cell, [&](Cell nb, bool diagonal) {
      const auto ni = grid.index(nb);
      if (closed[ni]) {
        return;
      }
      StepCost cand = g[ci];
      (diagonal ? cand.diagonal : cand.orthogonal) += 1;
      const double len = cand.cells();
      if (len < g_len[ni]) {
        g[ni] = cand;
        g_len[ni] = len;
        parent[ni] = static_cast<std::int32_t>(ci);
        const double h = heuristic(nb);
        open.push({len + h, h, nb});
      }
    });
  }

  if (!found) {
    out.failure = PlanFailure::NoPath;
    return out;
  }
  const auto gi = grid.index(goal);
  PlanResult plan;
  plan.cost = g[gi];
  plan.length = plan.cost.cells() * cell_size;
  if (plan.length > max_length) {
    out.failure = PlanFailure::TooLong;
    return out;
  }
  for (auto i = static_cast<std::int32_t>(gi); i != kNone; i = parent[static_cast<std::size_t>(i)]) {
    plan.path.push_back(grid.cell(static_cast<std::size_t>(i)));
  }
  std::reverse(plan.path.begin(), plan.path.end());
  out.plan = std::move(plan);
  return out;
}

PlanOutcome is_navigable(const SemanticGrid& grid, Cell start, Cell goal, double max_length,
                         double cell_size) {
  if (!passable(grid, start)) {
    return PlanOutcome{std::nullopt, PlanFailure::InvalidStart};
  }
  if (!passable(grid, goal)) {
    return PlanOutcome{std::nullopt, PlanFailure::NotFree};
  }
  return astar(grid, start, goal, max_length, cell_size);
}

Grid<std::optional<StepCost>> distance_field(const SemanticGrid& grid, Cell start) {
  Grid<std::optional<StepCost>> dist(grid.width(), grid.height(), std::nullopt);
  if (!passable(grid, start)) {
    return dist;
  }
  std::vector<std::uint8_t> closed(grid.size(), 0);
  using Entry = std::pair<double, Cell>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[start] = StepCost{};
  open.push({0.0, start});
  while (!open.empty()) {
    const auto [d, c] = open.top();
    open.pop();
    const auto ci = grid.index(c);
    if (closed[ci]) {
      continue;
    }
    closed[ci] = 1;
    const StepCost base = *dist[c];
    for_each_move(grid, c, [&](Cell nb, bool diagonal) {
      if (closed[grid.index(nb)]) {
        return;
      }
      StepCost cand = base;
      (diagonal ? cand.diagonal : cand.orthogonal) += 1;
      auto& slot = dist[nb];
      if (!slot || cand.cells() < slot->cells()) {
        slot = cand;
        open.push({cand.cells(), nb});
      }
    });
  }
  return dist;
}

}  // namespace gleam
