#include "gleam/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

#include "gleam/bridge.hpp"
#include "gleam/rng.hpp"

namespace gleam {

namespace {

// Stands in for a bridge policy whose endpoint could not be opened, so the
// failure is recorded like any other bridge fault.
class FaultedPolicy final : public Policy {
 public:
  FaultedPolicy(BridgeFaultKind kind, std::string what) : kind_(kind), what_(std::move(what)) {}

  std::string name() const override { return "bridge"; }
  Decision act(const Observation&, const PolicyContext&) override { throw BridgeError(kind_, what_); }

 private:
  BridgeFaultKind kind_;
  std::string what_;
};

std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) {
    s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  }
  return s;
}

struct Job {
  std::size_t noise = 0;
  std::size_t policy = 0;
  std::size_t scene = 0;
  int episode = 0;
};

struct JobResult {
  std::optional<EpisodeSummary> summary;
  bool failed = false;
  std::string error;
  std::filesystem::path log;
};

// Pool mode: the scene for each of `total` episodes, drawn by one scheduler
// shared by every policy and noise setting. Returns (scene, episode index
// within that scene) pairs.
std::vector<std::pair<std::size_t, int>> pool_schedule(std::size_t scenes, int total, double p,
                                                       std::uint64_t master_seed) {
  ScenePoolScheduler scheduler(scenes, p, split_seed(master_seed, {hash_label("pool")}));
  std::vector<int> per_scene(scenes, 0);
  std::vector<std::pair<std::size_t, int>> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    const std::size_t s = scheduler.next();
    out.emplace_back(s, per_scene[s]++);
  }
  return out;
}

}  // namespace

SceneGrid generated_scene(const GeneratorSpec& spec, int index) {
  SceneGrid g = generate_floorplan(generated_scene_config(spec, index));
  return SceneGrid(g.width(), g.height(), g.cell_size(), g.raw(), "scene_" + padded(index, 3),
                   g.seed());
}

std::vector<std::shared_ptr<const PreparedScene>> load_run_scenes(const RunConfig& config) {
  std::vector<std::shared_ptr<const PreparedScene>> scenes;
  if (config.scenes_dir) {
    const auto& dir = *config.scenes_dir;
    if (!std::filesystem::is_directory(dir)) {
      throw SceneError("scene directory " + dir.string() + " does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".grid") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw SceneError("no .grid files in " + dir.string());
    }
    for (const auto& f : files) {
      scenes.push_back(std::make_shared<const PreparedScene>(load_scene(f)));
    }
  } else if (config.generator) {
    for (int i = 0; i < config.generator->count; ++i) {
      scenes.push_back(std::make_shared<const PreparedScene>(generated_scene(*config.generator, i)));
    }
  } else {
    throw ConfigError("no scene source configured");
  }
  for (const auto& s : scenes) {
    if (s->grid.width() > config.episode.map.width || s->grid.height() > config.episode.map.height) {
      throw SceneError("scene " + s->grid.name() + " does not fit the global map");
    }
    if (s->start_region.cells.empty()) {
      throw SceneError("scene " + s->grid.name() + " has no valid start cell");
    }
  }
  return scenes;
}

Pose episode_start_pose(std::uint64_t master_seed, const PreparedScene& scene, int episode) {
  Rng rng(split_seed(master_seed, {hash_label("start"), hash_label(scene.grid.name()),
                                   static_cast<std::uint64_t>(episode)}));
  return sample_start_pose(scene.start_region, scene.grid.cell_size(), rng);
}

std::uint64_t episode_policy_seed(std::uint64_t master_seed, const std::string& policy,
                                  const std::string& scene, int episode) {
  return split_seed(master_seed, {hash_label("policy"), hash_label(policy), hash_label(scene),
                                  static_cast<std::uint64_t>(episode)});
}

std::uint64_t episode_noise_seed(std::uint64_t master_seed, const std::string& noise,
                                 const std::string& scene, int episode) {
  return split_seed(master_seed, {hash_label("noise"), hash_label(noise), hash_label(scene),
                                  static_cast<std::uint64_t>(episode)});
}

std::string policy_label(const std::string& spec) {
  return spec.rfind("bridge:", 0) == 0 ? std::string("bridge") : spec;
}

std::unique_ptr<Policy> make_policy(const std::string& spec, std::uint64_t seed,
                                    const EpisodeConfig& config,
                                    std::chrono::milliseconds bridge_timeout) {
  if (spec == "random") {
    return std::make_unique<RandomPolicy>(seed, config.action_radius);
  }
  if (spec == "vacuum") {
    return std::make_unique<VacuumPolicy>(seed, config.action_radius);
  }
  if (spec == "fbe") {
    return std::make_unique<FbePolicy>(config.action_radius);
  }
  if (spec.rfind("bridge:", 0) == 0) {
    try {
      return std::make_unique<BridgePolicy>(open_endpoint(spec.substr(7)), bridge_timeout,
                                            config.action_radius);
    } catch (const BridgeError& e) {
      return std::make_unique<FaultedPolicy>(e.kind(), e.what());
    }
  }
  throw ConfigError("unknown policy '" + spec + "'");
}

RunOutcome run_batch(const RunConfig& config,
                     const std::vector<std::shared_ptr<const PreparedScene>>& scenes) {
  if (scenes.empty()) {
    throw ConfigError("no scenes to run");
  }
  namespace fs = std::filesystem;
  fs::create_directories(config.output);
  if (config.generator) {
    fs::create_directories(config.output / "scenes");
    for (const auto& s : scenes) {
      save_scene(s->grid, config.output / "scenes" / (s->grid.name() + ".grid"));
    }
  }

  std::vector<std::string> noise_tags;
  for (const auto& n : config.noise_grid) {
    noise_tags.push_back(noise_tag(n));
  }

  std::vector<Job> jobs;
  const int total = config.episodes_per_scene * static_cast<int>(scenes.size());
  std::vector<std::pair<std::size_t, int>> order;
  if (config.scene_swap_probability) {
    order = pool_schedule(scenes.size(), total, *config.scene_swap_probability, config.seed);
  } else {
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      for (int e = 0; e < config.episodes_per_scene; ++e) {
        order.emplace_back(s, e);
      }
    }
  }
  for (std::size_t n = 0; n < config.noise_grid.size(); ++n) {
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
      for (const auto& [s, e] : order) {
        jobs.push_back(Job{n, p, s, e});
      }
    }
  }

  auto run_job = [&](const Job& job) {
    JobResult out;
    const auto& scene = *scenes[job.scene];
    const auto& name = scene.grid.name();
    const std::string label = policy_label(config.policies[job.policy]);
    EpisodeConfig ep = config.episode;
    ep.noise = config.noise_grid[job.noise];
    ep.noise.drift_horizon = config.episode.noise.drift_horizon;
    ep.noise.rng_seed = episode_noise_seed(config.seed, noise_tags[job.noise], name, job.episode);

    EpisodeMeta meta;
    meta.dataset = config.dataset;
    meta.noise = noise_tags[job.noise];
    meta.policy = label;
    meta.scene = name;
    meta.scene_index = static_cast<int>(job.scene);
    meta.episode = job.episode;
    meta.seed = episode_policy_seed(config.seed, config.policies[job.policy], name, job.episode);

    out.log = config.output / meta.dataset / meta.noise / label / name /
              ("ep_" + padded(job.episode, 3) + ".jsonl");
    try {
      fs::create_directories(out.log.parent_path());
      std::ofstream file(out.log, std::ios::binary | std::ios::trunc);
      if (!file) {
        throw std::runtime_error("cannot write " + out.log.string());
      }
      auto policy = make_policy(config.policies[job.policy], meta.seed, ep, config.bridge_timeout);
      EpisodeLogWriter writer(file, meta);
      const auto result =
          run_episode(scene, *policy, ep, episode_start_pose(config.seed, scene, job.episode), &writer);
      file.flush();
      if (!file) {
        throw std::runtime_error("write failed for " + out.log.string());
      }
      out.summary = summarize(meta, result, ep.keyframe_budget);
      if (result.termination_cause == TerminationCause::BridgeFault) {
        out.failed = true;
        out.error = out.log.string() + ": " + result.fault;
      }
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = out.log.string() + ": " + e.what();
    }
    return out;
  };

  std::vector<JobResult> results(jobs.size());
  const int threads =
      std::min<int>(effective_threads(config.threads), static_cast<int>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = run_job(jobs[i]);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }

  RunOutcome outcome;
  outcome.episodes = static_cast<int>(jobs.size());
  for (auto& r : results) {
    if (r.summary) {
      outcome.summaries.push_back(std::move(*r.summary));
    }
    if (r.failed) {
      ++outcome.failures;
      outcome.errors.push_back(std::move(r.error));
    }
    outcome.logs.push_back(std::move(r.log));
  }
  outcome.report = aggregate(outcome.summaries);
  std::ofstream(config.output / "report.csv", std::ios::binary | std::ios::trunc)
      << report_csv(outcome.report);
  std::ofstream(config.output / "report.json", std::ios::binary | std::ios::trunc)
      << report_json(outcome.report);
  return outcome;
}

}  // namespace gleam
