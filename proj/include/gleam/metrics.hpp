#ifndef GLEAM_METRICS_HPP
#define GLEAM_METRICS_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gleam/episode_log.hpp"
#include "gleam/geometry.hpp"
#include "gleam/scene.hpp"

namespace gleam {

/// Mean coverage over the keyframe budget. Curves shorter than `budget` are
/// right-padded with their last value; longer curves are cut at `budget`.
double auc(std::span<const double> curve, int budget);

/// Chamfer distance used when nothing is covered: the diagonal of the
/// default 128x128 global map.
inline double empty_chamfer_sentinel(double cell_size) { return 128.0 * kSqrt2 * cell_size; }

/// Mono-directional Chamfer distance (meters): mean over ground-truth cells
/// of the distance to the nearest covered cell, measured between cell centers.
/// Computed with an exact Euclidean distance transform over the scene grid.
double chamfer(const GroundTruthSurface& gt, std::span<const Cell> covered, double cell_size,
               std::optional<double> empty_sentinel = std::nullopt);

/// Per-episode figures a report is built from.
struct EpisodeSummary {
  std::string dataset;
  std::string noise;
  std::string policy;
  std::string scene;
  int scene_index = 0;
  int episode = 0;
  double coverage = 0.0;  // percent
  double auc = 0.0;       // percent
  double chamfer = 0.0;   // meters
  double keyframes = 0.0;
  double trajectory = 0.0;  // meters
};

/// Report figures of one finished episode. Episodes without keyframes use
/// the initial coverage and Chamfer distance.
EpisodeSummary summarize(const EpisodeMeta& meta, const EpisodeResult& result, int budget);

struct ReportRow {
  std::string group;
  std::string policy;
  int scenes = 0;
  int episodes = 0;
  double cov_pct = 0.0;
  double auc_pct = 0.0;
  double cd_m = 0.0;
  double keyframes = 0.0;
  double traj_m = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
};

inline constexpr const char* kReportCsvHeader =
    "group,policy,scenes,episodes,cov_pct,auc_pct,cd_m,keyframes,traj_m";

/// Groups episodes by (dataset, noise, policy). Each group yields one row
/// per scene, `<dataset>/<noise>/<scene>`, then `<dataset>/<noise>/overall`
/// whose values are episode-weighted means. Input order does not matter.
Report aggregate(std::vector<EpisodeSummary> episodes);

std::string report_csv(const Report& report);
std::string report_json(const Report& report);

struct LoadedSummaries {
  std::vector<EpisodeSummary> episodes;
  std::vector<std::string> errors;  // "<file>:<line>: <message>"
};

/// Parses every episode log; malformed logs are reported and skipped.
LoadedSummaries load_summaries(const std::vector<std::filesystem::path>& logs);

/// All `*.jsonl` files below `dir`, sorted.
std::vector<std::filesystem::path> find_logs(const std::filesystem::path& dir);

}  // namespace gleam

#endif  // GLEAM_METRICS_HPP
