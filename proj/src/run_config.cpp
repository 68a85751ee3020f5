#include "gleam/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gleam/episode_log.hpp"
#include "gleam/rng.hpp"

namespace gleam {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ConfigError("invalid value '" + std::string(s) + "' for " + std::string(what));
  }
  return value;
}

}  // namespace

FloorplanConfig generated_scene_config(const GeneratorSpec& spec, int index) {
  FloorplanConfig fc;
  fc.room_count = spec.rooms;
  fc.target_extent = spec.extent;
  fc.clutter_density = spec.clutter;
  fc.door_width = spec.door_width;
  fc.seed = split_seed(spec.seed, {hash_label("scene"), static_cast<std::uint64_t>(index)});
  return fc;
}

NoiseModel parse_noise_setting(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigError("noise setting '" + std::string(text) + "' must be <pose>:<depth>[:c|:n]");
  }
  NoiseModel m;
  m.pose_variance = parse_number<double>(parts[0], "noise pose variance");
  m.depth_variance = parse_number<double>(parts[1], "noise depth variance");
  if (parts.size() == 3) {
    if (parts[2] == "c") {
      m.pose_cumulative = true;
    } else if (parts[2] == "n") {
      m.pose_cumulative = false;
    } else {
      throw ConfigError("noise mode must be 'c' or 'n', got '" + std::string(parts[2]) + "'");
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return m;
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  RunConfig cfg;
  GeneratorSpec gen;
  bool any_gen = false;
  auto& ep = cfg.episode;

  using Setter = std::function<void(std::string_view)>;
  auto integer = [](int& dst, std::string_view key) {
    return [&dst, key](std::string_view v) { dst = parse_number<int>(v, key); };
  };
  auto real = [](double& dst, std::string_view key) {
    return [&dst, key](std::string_view v) { dst = parse_number<double>(v, key); };
  };
  auto gen_int = [&](int& dst, std::string_view key) {
    return [&dst, &any_gen, key](std::string_view v) {
      dst = parse_number<int>(v, key);
      any_gen = true;
    };
  };
  const std::map<std::string, Setter, std::less<>> setters = {
      {"dataset", [&](std::string_view v) { cfg.dataset = std::string(v); }},
      {"scenes_dir", [&](std::string_view v) { cfg.scenes_dir = std::filesystem::path(v); }},
      {"gen.rooms", gen_int(gen.rooms, "gen.rooms")},
      {"gen.extent", gen_int(gen.extent, "gen.extent")},
      {"gen.count", gen_int(gen.count, "gen.count")},
      {"gen.door_width", gen_int(gen.door_width, "gen.door_width")},
      {"gen.clutter",
       [&](std::string_view v) {
         gen.clutter = parse_number<double>(v, "gen.clutter");
         any_gen = true;
       }},
      {"gen.seed",
       [&](std::string_view v) {
         gen.seed = parse_number<std::uint64_t>(v, "gen.seed");
         any_gen = true;
       }},
      {"policy",
       [&](std::string_view v) {
         for (auto p : split(v, ',')) {
           const bool known = p == "random" || p == "vacuum" || p == "fbe" ||
                              (p.substr(0, 7) == "bridge:" && p.size() > 7);
           if (!known) {
             throw ConfigError("unknown policy '" + std::string(p) + "'");
           }
           cfg.policies.emplace_back(p);
         }
       }},
      {"episodes_per_scene", integer(cfg.episodes_per_scene, "episodes_per_scene")},
      {"seed", [&](std::string_view v) { cfg.seed = parse_number<std::uint64_t>(v, "seed"); }},
      {"threads", integer(cfg.threads, "threads")},
      {"output", [&](std::string_view v) { cfg.output = std::filesystem::path(v); }},
      {"noise",
       [&](std::string_view v) {
         for (auto n : split(v, ',')) {
           cfg.noise_grid.push_back(parse_noise_setting(n));
         }
       }},
      {"scene_swap_probability",
       [&](std::string_view v) {
         cfg.scene_swap_probability = parse_number<double>(v, "scene_swap_probability");
       }},
      {"bridge.timeout_ms",
       [&](std::string_view v) {
         cfg.bridge_timeout = std::chrono::milliseconds(parse_number<long>(v, "bridge.timeout_ms"));
       }},
      {"keyframe_budget", integer(ep.keyframe_budget, "keyframe_budget")},
      {"stagnation_window", integer(ep.stagnation_window, "stagnation_window")},
      {"stagnation_threshold", real(ep.stagnation_threshold, "stagnation_threshold")},
      {"success_coverage", real(ep.success_coverage, "success_coverage")},
      {"termination_reward_coverage",
       real(ep.termination_reward_coverage, "termination_reward_coverage")},
      {"collision_reward", real(ep.collision_reward, "collision_reward")},
      {"termination_reward", real(ep.termination_reward, "termination_reward")},
      {"max_path_length", real(ep.max_path_length, "max_path_length")},
      {"action_radius", real(ep.action_radius, "action_radius")},
      {"history_length", integer(ep.history_length, "history_length")},
      {"truncation_limit", integer(ep.truncation_limit, "truncation_limit")},
      {"sensor.fov_deg",
       [&](std::string_view v) { ep.sensor.fov = parse_number<double>(v, "sensor.fov_deg") * kPi / 180.0; }},
      {"sensor.n_rays", integer(ep.sensor.n_rays, "sensor.n_rays")},
      {"sensor.max_range", real(ep.sensor.max_range, "sensor.max_range")},
      {"map.c_occ", real(ep.map.c_occ, "map.c_occ")},
      {"map.c_free", real(ep.map.c_free, "map.c_free")},
      {"map.tau_occ", real(ep.map.tau_occ, "map.tau_occ")},
      {"map.tau_free", real(ep.map.tau_free, "map.tau_free")},
      {"map.logodds_limit", real(ep.map.logodds_limit, "map.logodds_limit")},
      {"noise.drift_horizon", integer(ep.noise.drift_horizon, "noise.drift_horizon")},
  };

  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    }
    if (value.empty()) {
      throw ConfigError(where + "missing value for '" + std::string(key) + "'");
    }
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }

  if (any_gen) {
    cfg.generator = gen;
  }
  if (cfg.scenes_dir.has_value() == cfg.generator.has_value()) {
    throw ConfigError(source + ": exactly one of scenes_dir or gen.* must be given");
  }
  if (cfg.policies.empty()) {
    throw ConfigError(source + ": policy is required");
  }
  if (cfg.noise_grid.empty()) {
    cfg.noise_grid.push_back(NoiseModel{});
  }
  std::set<std::string> labels;
  for (const auto& p : cfg.policies) {
    if (!labels.insert(p.rfind("bridge:", 0) == 0 ? "bridge" : p).second) {
      throw ConfigError(source + ": policy '" + p + "' listed twice (at most one bridge)");
    }
  }
  std::set<std::string> tags;
  for (const auto& n : cfg.noise_grid) {
    if (!tags.insert(noise_tag(n)).second) {
      throw ConfigError(source + ": noise setting " + noise_tag(n) + " listed twice");
    }
  }
  if (cfg.episodes_per_scene < 1) {
    throw ConfigError(source + ": episodes_per_scene must be >= 1");
  }
  if (cfg.threads < 1) {
    throw ConfigError(source + ": threads must be >= 1");
  }
  if (cfg.generator && cfg.generator->count < 1) {
    throw ConfigError(source + ": gen.count must be >= 1");
  }
  if (cfg.scene_swap_probability &&
      !(*cfg.scene_swap_probability >= 0.0 && *cfg.scene_swap_probability <= 1.0)) {
    throw ConfigError(source + ": scene_swap_probability must lie in [0, 1]");
  }
  if (cfg.bridge_timeout.count() <= 0) {
    throw ConfigError(source + ": bridge.timeout_ms must be positive");
  }
  try {
    cfg.episode.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.string());
}

int effective_threads(int configured) {
  if (const char* env = std::getenv("GLEAM_SIM_THREADS"); env != nullptr && *env != '\0') {
    return std::max(1, parse_number<int>(env, "GLEAM_SIM_THREADS"));
  }
  return std::max(1, configured);
}

}  // namespace gleam
