#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gleam/bench.hpp"
#include "gleam/mapping.hpp"
#include "gleam/metrics.hpp"
#include "gleam/render.hpp"
#include "gleam/runner.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

int gen_scenes(const gleam::GeneratorSpec& spec, const fs::path& out) {
  fs::create_directories(out);
  for (int i = 0; i < spec.count; ++i) {
    const auto scene = gleam::generated_scene(spec, i);
    const auto path = out / (scene.name() + ".grid");
    gleam::save_scene(scene, path);
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

int run(const fs::path& config_path) {
  const auto config = gleam::load_run_config(config_path);
  const auto scenes = gleam::load_run_scenes(config);
  const auto outcome = gleam::run_batch(config, scenes);
  for (const auto& e : outcome.errors) {
    std::cerr << "episode failed: " << e << "\n";
  }
  std::cout << outcome.episodes << " episodes, " << outcome.failures << " failed; report in "
            << (config.output / "report.csv").string() << "\n";
  return outcome.failures > 0 ? kExitPartial : kExitOk;
}

int bench(const gleam::BenchConfig& cfg, const std::string& out) {
  const auto json = gleam::bench_json(gleam::run_bench(cfg));
  if (out.empty()) {
    std::cout << json;
  } else {
    std::ofstream(out, std::ios::binary | std::ios::trunc) << json;
  }
  return kExitOk;
}

int report(const fs::path& logs_dir, fs::path out) {
  if (!fs::is_directory(logs_dir)) {
    std::cerr << "error: " << logs_dir.string() << " is not a directory\n";
    return kExitConfig;
  }
  const auto logs = gleam::find_logs(logs_dir);
  if (logs.empty()) {
    std::cerr << "error: no episode logs below " << logs_dir.string() << "\n";
    return kExitConfig;
  }
  const auto loaded = gleam::load_summaries(logs);
  for (const auto& e : loaded.errors) {
    std::cerr << "skipped " << e << "\n";
  }
  const auto rep = gleam::aggregate(loaded.episodes);
  if (out.empty()) {
    out = logs_dir;
  }
  fs::create_directories(out);
  const auto csv = gleam::report_csv(rep);
  std::ofstream(out / "report.csv", std::ios::binary | std::ios::trunc) << csv;
  std::ofstream(out / "report.json", std::ios::binary | std::ios::trunc) << gleam::report_json(rep);
  std::cout << csv;
  return loaded.errors.empty() ? kExitOk : kExitPartial;
}

int render(const fs::path& log_path, const fs::path& scene_path, const fs::path& scenes_dir,
           const fs::path& out) {
  const auto log = gleam::load_episode_log(log_path.string());
  fs::path path = scene_path;
  if (path.empty()) {
    path = scenes_dir / (log.meta.scene + ".grid");
  }
  if (!fs::is_regular_file(path)) {
    std::cerr << "error: scene " << log.meta.scene << " not found at " << path.string() << "\n";
    return kExitConfig;
  }
  const gleam::PreparedScene scene(gleam::load_scene(path));
  const auto files = gleam::write_rendered(gleam::render_episode(log, scene), out);
  std::cout << files.size() << " images written to " << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gleam-sim: 2D active-mapping exploration benchmark"};
  app.require_subcommand(1);

  gleam::GeneratorSpec gen;
  fs::path gen_out;
  auto* gen_cmd = app.add_subcommand("gen-scenes", "Generate floorplan scenes");
  gen_cmd->add_option("--rooms", gen.rooms, "Rooms per scene")->required();
  gen_cmd->add_option("--extent", gen.extent, "Scene side length in cells")->required();
  gen_cmd->add_option("--clutter", gen.clutter, "Clutter density in [0, 1)")->required();
  gen_cmd->add_option("--count", gen.count, "Number of scenes")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->required();
  gen_cmd->add_option("--door-width", gen.door_width, "Door width in cells")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  fs::path config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a batch evaluation");
  run_cmd->add_option("--config,config", config_path, "Run config file")->required();

  gleam::BenchConfig bench_cfg;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Time the per-keyframe pipeline");
  bench_cmd->add_option("--map-size", bench_cfg.map_size, "Global map size")
      ->check(CLI::IsMember({128, 16}))
      ->capture_default_str();
  bench_cmd->add_option("--iterations", bench_cfg.iterations, "Timed iterations")
      ->check(CLI::Range(1000, 100000000))
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Write JSON here instead of stdout");

  fs::path logs_dir;
  fs::path report_out;
  auto* report_cmd = app.add_subcommand("report", "Aggregate episode logs");
  report_cmd->add_option("--logs,logs", logs_dir, "Directory searched for *.jsonl logs")->required();
  report_cmd->add_option("--out", report_out, "Output directory (default: the logs directory)");

  fs::path render_log;
  fs::path render_scene;
  fs::path render_scenes_dir;
  fs::path render_out;
  auto* render_cmd = app.add_subcommand("render", "Render map snapshots of an episode log");
  render_cmd->add_option("--log", render_log, "Episode log")->required();
  auto* scene_opt = render_cmd->add_option("--scene", render_scene, "Scene file");
  auto* dir_opt =
      render_cmd->add_option("--scenes-dir", render_scenes_dir, "Directory holding <scene>.grid");
  scene_opt->excludes(dir_opt);
  render_cmd->add_option("--out", render_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen_cmd) {
      return gen_scenes(gen, gen_out);
    }
    if (*run_cmd) {
      return run(config_path);
    }
    if (*bench_cmd) {
      return bench(bench_cfg, bench_out);
    }
    if (*report_cmd) {
      return report(logs_dir, report_out);
    }
    if (*render_cmd) {
      if (render_scene.empty() && render_scenes_dir.empty()) {
        std::cerr << "error: render needs --scene or --scenes-dir\n";
        return kExitConfig;
      }
      return render(render_log, render_scene, render_scenes_dir, render_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
