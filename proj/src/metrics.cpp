#include "gleam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "gleam/episode_log.hpp"
#include "json.hpp"

namespace gleam {

double auc(std::span<const double> curve, int budget) {
  if (curve.empty()) {
    throw std::invalid_argument("auc of an empty curve");
  }
  if (budget < 1) {
    throw std::invalid_argument("auc budget must be >= 1");
  }
  const auto n = std::min(curve.size(), static_cast<std::size_t>(budget));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += curve[i];
  }
  sum += static_cast<double>(static_cast<std::size_t>(budget) - n) * curve[n - 1];
  return sum / budget;
}

namespace {

constexpr double kInf = 1e20;

// 1-D squared distance transform of a sampled function (lower envelope of
// parabolas). f and d have length n; v and z are scratch.
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] >= kInf) {
      continue;
    }
    if (f[v[0]] >= kInf) {
      v[0] = q;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (f[v[0]] >= kInf) {
    for (int q = 0; q < n; ++q) {
      d[q] = kInf;
    }
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) {
      ++k;
    }
    const int p = v[static_cast<std::size_t>(k)];
    d[q] = double(q - p) * (q - p) + f[p];
  }
}

}  // namespace

double chamfer(const GroundTruthSurface& gt, std::span<const Cell> covered, double cell_size,
               std::optional<double> empty_sentinel) {
  if (gt.cells.empty()) {
    return 0.0;
  }
  if (covered.empty()) {
    return empty_sentinel.value_or(empty_chamfer_sentinel(cell_size));
  }
  const int w = gt.width;
  const int h = gt.height;
  Grid<double> dist(w, h, kInf);
  for (const Cell& c : covered) {
    if (!dist.contains(c)) {
      throw std::invalid_argument("covered cell outside the scene grid");
    }
    dist[c] = 0.0;
  }
  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> f(static_cast<std::size_t>(std::max(w, h)));
  std::vector<double> d(f.size());
  // columns, then rows
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      f[static_cast<std::size_t>(y)] = dist.at(x, y);
    }
    edt_1d(f.data(), d.data(), h, v, z);
    for (int y = 0; y < h; ++y) {
      dist.at(x, y) = d[static_cast<std::size_t>(y)];
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f[static_cast<std::size_t>(x)] = dist.at(x, y);
    }
    edt_1d(f.data(), d.data(), w, v, z);
    for (int x = 0; x < w; ++x) {
      dist.at(x, y) = d[static_cast<std::size_t>(x)];
    }
  }
  double sum = 0.0;
  for (const Cell& g : gt.cells) {
    sum += std::sqrt(dist[g]);
  }
  return sum / static_cast<double>(gt.cells.size()) * cell_size;
}

namespace {

struct Accum {
  int episodes = 0;
  double cov = 0.0, auc = 0.0, cd = 0.0, kf = 0.0, traj = 0.0;

  void add(const EpisodeSummary& e) {
    ++episodes;
    cov += e.coverage;
    auc += e.auc;
    cd += e.chamfer;
    kf += e.keyframes;
    traj += e.trajectory;
  }

  ReportRow row(std::string group, std::string policy, int scenes) const {
    const double n = episodes;
    return ReportRow{std::move(group), std::move(policy), scenes, episodes, cov / n, auc / n,
                     cd / n, kf / n, traj / n};
  }
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0.0000" || s == "-0.000" || s == "-0.00" || s == "-0.0") {
    s.erase(0, 1);
  }
  return s;
}

constexpr int kPctDigits = 4;
constexpr int kMeterDigits = 4;
constexpr int kCountDigits = 2;

}  // namespace

Report aggregate(std::vector<EpisodeSummary> episodes) {
  std::sort(episodes.begin(), episodes.end(), [](const EpisodeSummary& a, const EpisodeSummary& b) {
    return std::tie(a.dataset, a.noise, a.policy, a.scene, a.scene_index, a.episode) <
           std::tie(b.dataset, b.noise, b.policy, b.scene, b.scene_index, b.episode);
  });
  using GroupKey = std::tuple<std::string, std::string, std::string>;
  std::map<GroupKey, std::map<std::string, Accum>> groups;
  std::map<GroupKey, Accum> overall;
  for (const auto& e : episodes) {
    const GroupKey key{e.dataset, e.noise, e.policy};
    groups[key][e.scene].add(e);
    overall[key].add(e);
  }
  Report report;
  for (const auto& [key, scenes] : groups) {
    const auto& [dataset, noise, policy] = key;
    const std::string prefix = dataset + "/" + noise + "/";
    for (const auto& [scene, acc] : scenes) {
      report.rows.push_back(acc.row(prefix + scene, policy, 1));
    }
    report.rows.push_back(
        overall.at(key).row(prefix + "overall", policy, static_cast<int>(scenes.size())));
  }
  return report;
}

std::string report_csv(const Report& report) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += r.group + "," + r.policy + "," + std::to_string(r.scenes) + "," +
           std::to_string(r.episodes) + "," + fixed(r.cov_pct, kPctDigits) + "," +
           fixed(r.auc_pct, kPctDigits) + "," + fixed(r.cd_m, kMeterDigits) + "," +
           fixed(r.keyframes, kCountDigits) + "," + fixed(r.traj_m, kMeterDigits) + "\n";
  }
  return out;
}

std::string report_json(const Report& report) {
  // Numbers are emitted with the same fixed precision as the CSV.
  auto num = [](double v, int digits) { return nlohmann::json::parse(fixed(v, digits)); };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["group"] = r.group;
    j["policy"] = r.policy;
    j["scenes"] = r.scenes;
    j["episodes"] = r.episodes;
    j["cov_pct"] = num(r.cov_pct, kPctDigits);
    j["auc_pct"] = num(r.auc_pct, kPctDigits);
    j["cd_m"] = num(r.cd_m, kMeterDigits);
    j["keyframes"] = num(r.keyframes, kCountDigits);
    j["traj_m"] = num(r.traj_m, kMeterDigits);
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

EpisodeSummary summarize(const EpisodeMeta& meta, const EpisodeResult& res, int budget) {
  EpisodeSummary s;
  s.dataset = meta.dataset;
  s.noise = meta.noise;
  s.policy = meta.policy;
  s.scene = meta.scene;
  s.scene_index = meta.scene_index;
  s.episode = meta.episode;
  s.coverage = res.final_cr();
  if (res.coverage_curve.empty()) {
    const double initial[] = {res.initial_cr};
    s.auc = auc(initial, budget);
    s.chamfer = res.initial_cd_m;
  } else {
    s.auc = auc(res.coverage_curve, budget);
    s.chamfer = res.chamfer_curve.back();
  }
  s.keyframes = res.keyframes;
  s.trajectory = res.trajectory_length;
  return s;
}

LoadedSummaries load_summaries(const std::vector<std::filesystem::path>& logs) {
  LoadedSummaries out;
  for (const auto& path : logs) {
    try {
      const auto log = load_episode_log(path.string());
      auto s = summarize(log.meta, log.result, log.config.keyframe_budget);
      out.episodes.push_back(std::move(s));
    } catch (const LogError& e) {
      out.errors.emplace_back(e.what());
    }
  }
  return out;
}

std::vector<std::filesystem::path> find_logs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gleam
