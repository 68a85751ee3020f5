#include "gleam/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "gleam/mapping.hpp"
#include "gleam/planning.hpp"
#include "gleam/scene.hpp"
#include "gleam/sensor.hpp"

namespace gleam {

namespace {

using Clock = std::chrono::steady_clock;

SceneGrid bench_scene(int map_size) {
  if (map_size == 128) {
    FloorplanConfig fc;
    fc.room_count = 6;
    fc.target_extent = 64;
    fc.clutter_density = 0.1;
    fc.seed = 2024;
    return generate_floorplan(fc);
  }
  if (map_size == 16) {
    constexpr int n = 12;
    std::vector<std::uint8_t> occ(n * n, 0);
    for (int i = 0; i < n; ++i) {
      occ[i] = occ[(n - 1) * n + i] = occ[i * n] = occ[i * n + n - 1] = 1;
    }
    occ[5 * n + 5] = 1;  // one pillar so frontiers and paths are not trivial
    return SceneGrid(n, n, 0.1, std::move(occ), "bench_room");
  }
  throw std::invalid_argument("bench map size must be 128 or 16");
}

StageTiming summarize(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  auto pick = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size()))) - 1;
    return samples[std::min(idx, samples.size() - 1)];
  };
  const std::size_t n = samples.size();
  const double median =
      n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  return StageTiming{median, pick(0.95)};
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

BenchResult run_bench(const BenchConfig& config) {
  if (config.iterations < 1000) {
    throw std::invalid_argument("bench needs at least 1000 iterations");
  }
  const PreparedScene scene(bench_scene(config.map_size));
  MapParams params;
  params.width = params.height = config.map_size;
  params.cell_size = scene.grid.cell_size();

  // Agent at the start cell closest to the scene center, mapped from a few
  // nearby viewpoints so the A* query and frontier scan see a realistic map.
  const Cell mid{scene.grid.width() / 2, scene.grid.height() / 2};
  Cell agent_cell = scene.start_region.cells.front();
  for (const auto& c : scene.start_region.cells) {
    const auto d = [&](Cell a) { return (a.x - mid.x) * (a.x - mid.x) + (a.y - mid.y) * (a.y - mid.y); };
    if (d(c) < d(agent_cell)) {
      agent_cell = c;
    }
  }
  const Pose pose = scene.grid.cell_center(agent_cell, 0.3);
  const SensorConfig sensor;
  const auto panorama = capture_panorama(scene.grid, pose, sensor);

  GlobalProbMap base = GlobalProbMap::for_scene(scene.grid, params);
  integrate_panorama(base, pose, panorama);
  const Cell agent = base.cell_at(pose.x, pose.y);
  const SemanticGrid sem = semantic_map(base);

  // Goal: the reachable cell farthest from the agent within the path limit.
  const auto field = distance_field(sem, agent);
  Cell goal = agent;
  double best = -1.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto& cost = field.data()[i];
    if (!cost || sem.data()[i] != CellState::Free) {
      continue;
    }
    const double len = cost->cells() * params.cell_size;
    if (len <= kDefaultMaxPathLength && len > best) {
      best = len;
      goal = field.cell(i);
    }
  }

  std::array<std::vector<double>, 5> samples;
  for (auto& s : samples) {
    s.reserve(static_cast<std::size_t>(config.iterations));
  }
  GlobalProbMap map = base;
  std::size_t sink = 0;
  for (int it = -config.warmup; it < config.iterations; ++it) {
    const bool record = it >= 0;
    auto t0 = Clock::now();
    integrate_panorama(map, pose, panorama);
    const double t_scan = ms_since(t0);
    t0 = Clock::now();
    const SemanticGrid s = semantic_map(map);
    const double t_frontier = ms_since(t0);
    t0 = Clock::now();
    const EgoSemanticMap ego = extract_egocentric(s, agent);
    const double t_ego = ms_since(t0);
    t0 = Clock::now();
    const PlanOutcome plan = is_navigable(s, agent, goal, kDefaultMaxPathLength, params.cell_size);
    const double t_astar = ms_since(t0);

    // The same four calls timed as one step.
    t0 = Clock::now();
    integrate_panorama(map, pose, panorama);
    const SemanticGrid s2 = semantic_map(map);
    const EgoSemanticMap ego2 = extract_egocentric(s2, agent);
    const PlanOutcome plan2 = is_navigable(s2, agent, goal, kDefaultMaxPathLength, params.cell_size);
    const double t_full = ms_since(t0);

    sink += ego.cells.size() + ego2.cells.size() + (plan.ok() ? plan.plan->path.size() : 0) +
            (plan2.ok() ? 1 : 0);
    if (record) {
      samples[0].push_back(t_scan);
      samples[1].push_back(t_frontier);
      samples[2].push_back(t_ego);
      samples[3].push_back(t_astar);
      samples[4].push_back(t_full);
    }
  }
  if (sink == 0) {
    throw std::logic_error("bench produced no work");
  }

  BenchResult out;
  out.map_size = config.map_size;
  out.iterations = config.iterations;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.stages[i] = summarize(std::move(samples[i]));
  }
  return out;
}

std::string bench_json(const BenchResult& result) {
  nlohmann::ordered_json doc;
  doc["map_size"] = result.map_size;
  doc["iterations"] = result.iterations;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kBenchStages.size(); ++i) {
    stages[std::string(kBenchStages[i])] = {{"median_ms", result.stages[i].median_ms},
                                            {"p95_ms", result.stages[i].p95_ms}};
  }
  doc["stages"] = std::move(stages);
  return doc.dump(2) + "\n";
}

}  // namespace gleam
