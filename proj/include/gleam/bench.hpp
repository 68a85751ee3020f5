#ifndef GLEAM_BENCH_HPP
#define GLEAM_BENCH_HPP

#include <array>
#include <string>
#include <string_view>

namespace gleam {

struct StageTiming {
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

inline constexpr std::array<std::string_view, 5> kBenchStages = {
    "scan_integration", "frontier_detection", "egocentric_extraction", "astar_query", "full_step"};

struct BenchConfig {
  int map_size = 128;  // 128 (generated floorplan) or 16 (small room)
  int iterations = 1000;
  int warmup = 20;
};

struct BenchResult {
  int map_size = 0;
  int iterations = 0;
  std::array<StageTiming, 5> stages;  // in kBenchStages order
};

/// Times the per-keyframe mapping pipeline: integrating a precomputed
/// 4-scan panorama, frontier labelling, egocentric extraction and one A*
/// query. full_step runs the four back to back; ray casting is excluded.
BenchResult run_bench(const BenchConfig& config);

std::string bench_json(const BenchResult& result);

}  // namespace gleam

#endif  // GLEAM_BENCH_HPP
