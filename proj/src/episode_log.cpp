#include "gleam/episode_log.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace gleam {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ordered_json pose_json(const Pose& p) { return ordered_json::array({p.x, p.y, p.theta}); }

ordered_json config_json(const EpisodeConfig& c) {
  ordered_json j;
  j["keyframe_budget"] = c.keyframe_budget;
  j["stagnation_window"] = c.stagnation_window;
  j["stagnation_threshold"] = c.stagnation_threshold;
  j["success_coverage"] = c.success_coverage;
  j["termination_reward_coverage"] = c.termination_reward_coverage;
  j["collision_reward"] = c.collision_reward;
  j["termination_reward"] = c.termination_reward;
  j["max_path_length"] = c.max_path_length;
  j["action_radius"] = c.action_radius;
  j["history_length"] = c.history_length;
  j["truncation_limit"] = c.truncation_limit;
  j["sensor"] = {{"fov", c.sensor.fov}, {"n_rays", c.sensor.n_rays}, {"max_range", c.sensor.max_range}};
  j["noise"] = {{"pose_variance", c.noise.pose_variance},
                {"pose_cumulative", c.noise.pose_cumulative},
                {"depth_variance", c.noise.depth_variance},
                {"rng_seed", c.noise.rng_seed},
                {"drift_horizon", c.noise.drift_horizon}};
  j["map"] = {{"width", c.map.width},       {"height", c.map.height},
              {"cell_size", c.map.cell_size}, {"c_occ", c.map.c_occ},
              {"c_free", c.map.c_free},     {"tau_occ", c.map.tau_occ},
              {"tau_free", c.map.tau_free}, {"logodds_limit", c.map.logodds_limit}};
  return j;
}

EpisodeConfig config_from(const json& j) {
  EpisodeConfig c;
  j.at("keyframe_budget").get_to(c.keyframe_budget);
  j.at("stagnation_window").get_to(c.stagnation_window);
  j.at("stagnation_threshold").get_to(c.stagnation_threshold);
  j.at("success_coverage").get_to(c.success_coverage);
  j.at("termination_reward_coverage").get_to(c.termination_reward_coverage);
  j.at("collision_reward").get_to(c.collision_reward);
  j.at("termination_reward").get_to(c.termination_reward);
  j.at("max_path_length").get_to(c.max_path_length);
  j.at("action_radius").get_to(c.action_radius);
  j.at("history_length").get_to(c.history_length);
  j.at("truncation_limit").get_to(c.truncation_limit);
  const auto& s = j.at("sensor");
  s.at("fov").get_to(c.sensor.fov);
  s.at("n_rays").get_to(c.sensor.n_rays);
  s.at("max_range").get_to(c.sensor.max_range);
  const auto& n = j.at("noise");
  n.at("pose_variance").get_to(c.noise.pose_variance);
  n.at("pose_cumulative").get_to(c.noise.pose_cumulative);
  n.at("depth_variance").get_to(c.noise.depth_variance);
  n.at("rng_seed").get_to(c.noise.rng_seed);
  n.at("drift_horizon").get_to(c.noise.drift_horizon);
  const auto& m = j.at("map");
  m.at("width").get_to(c.map.width);
  m.at("height").get_to(c.map.height);
  m.at("cell_size").get_to(c.map.cell_size);
  m.at("c_occ").get_to(c.map.c_occ);
  m.at("c_free").get_to(c.map.c_free);
  m.at("tau_occ").get_to(c.map.tau_occ);
  m.at("tau_free").get_to(c.map.tau_free);
  m.at("logodds_limit").get_to(c.map.logodds_limit);
  return c;
}

Pose pose_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw LogError("pose must be [x,y,theta]");
  }
  return Pose{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json doubles(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) {
    a.push_back(x);
  }
  return a;
}

PlanFailure plan_failure_from(const std::string& s) {
  for (auto f : {PlanFailure::None, PlanFailure::InvalidStart, PlanFailure::NotFree,
                 PlanFailure::NoPath, PlanFailure::TooLong}) {
    if (to_string(f) == s) {
      return f;
    }
  }
  throw LogError("unknown plan failure '" + s + "'");
}

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

}  // namespace

std::string noise_tag(const NoiseModel& noise) {
  if (noise.noiseless()) {
    return "noiseless";
  }
  return "p" + shortest(noise.pose_variance) + (noise.pose_cumulative ? "c" : "n") + "_d" +
         shortest(noise.depth_variance);
}

void EpisodeLogWriter::on_start(const Environment& env) {
  ordered_json j;
  j["type"] = "header";
  j["version"] = 1;
  j["dataset"] = meta_.dataset;
  j["noise"] = meta_.noise;
  j["policy"] = meta_.policy;
  j["scene"] = meta_.scene;
  j["scene_index"] = meta_.scene_index;
  j["episode"] = meta_.episode;
  j["seed"] = meta_.seed;
  j["start"] = pose_json(env.true_pose());
  j["initial_cr"] = env.result().initial_cr;
  j["config"] = config_json(env.config());
  out_ << j.dump() << '\n';
}

void EpisodeLogWriter::on_step(const Environment&, const StepRecord& r) {
  ordered_json j;
  j["type"] = "step";
  j["t"] = r.t;
  j["action"] = ordered_json::array({r.action.dx, r.action.dy, r.action.dtheta});
  j["clamped"] = r.clamped;
  j["result"] = std::string(to_string(r.result));
  j["plan_failure"] = std::string(to_string(r.plan_failure));
  j["pose"] = pose_json(r.true_pose);
  j["reported"] = pose_json(r.reported_pose);
  j["r_cr"] = r.rewards.coverage;
  j["r_col"] = r.rewards.collision;
  j["r_term"] = r.rewards.termination;
  j["cr"] = r.cr;
  j["covered"] = r.covered;
  j["cd_m"] = r.cd_m;
  j["plan_m"] = r.plan_length;
  out_ << j.dump() << '\n';
}

void EpisodeLogWriter::on_end(const Environment& env) {
  const auto& res = env.result();
  ordered_json j;
  j["type"] = "result";
  j["cause"] = std::string(to_string(res.termination_cause));
  j["keyframes"] = res.keyframes;
  j["collisions"] = res.collisions;
  j["traj_m"] = res.trajectory_length;
  j["initial_cr"] = res.initial_cr;
  j["initial_covered"] = res.initial_covered;
  j["initial_cd_m"] = res.initial_cd_m;
  j["final_cr"] = res.final_cr();
  j["coverage_curve"] = doubles(res.coverage_curve);
  j["chamfer_curve"] = doubles(res.chamfer_curve);
  ordered_json rewards = ordered_json::array();
  for (const auto& r : res.rewards) {
    rewards.push_back(ordered_json::array({r.coverage, r.collision, r.termination}));
  }
  j["rewards"] = std::move(rewards);
  j["fault"] = res.fault;
  out_ << j.dump() << '\n';
}

ParsedEpisodeLog parse_episode_log(std::istream& in, const std::string& source) {
  ParsedEpisodeLog log;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool have_result = false;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      if (have_result) {
        throw LogError("content after result line");
      }
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        if (have_header) {
          throw LogError("duplicate header");
        }
        if (j.at("version").get<int>() != 1) {
          throw LogError("unsupported log version");
        }
        have_header = true;
        log.meta.dataset = j.at("dataset").get<std::string>();
        log.meta.noise = j.at("noise").get<std::string>();
        log.meta.policy = j.at("policy").get<std::string>();
        log.meta.scene = j.at("scene").get<std::string>();
        log.meta.scene_index = j.at("scene_index").get<int>();
        log.meta.episode = j.at("episode").get<int>();
        log.meta.seed = j.at("seed").get<std::uint64_t>();
        log.start = pose_from(j.at("start"));
        log.config = config_from(j.at("config"));
        log.result.initial_cr = j.at("initial_cr").get<double>();
      } else if (type == "step") {
        if (!have_header) {
          throw LogError("step before header");
        }
        StepRecord r;
        r.t = j.at("t").get<int>();
        if (r.t != static_cast<int>(log.steps.size()) + 1) {
          throw LogError("steps out of order");
        }
        const auto& a = j.at("action");
        if (!a.is_array() || a.size() != 3) {
          throw LogError("action must be [dx,dy,dtheta]");
        }
        r.action = Action{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
        r.clamped = j.at("clamped").get<bool>();
        const auto result = parse_action_result(j.at("result").get<std::string>());
        if (!result) {
          throw LogError("unknown action result");
        }
        r.result = *result;
        r.plan_failure = plan_failure_from(j.at("plan_failure").get<std::string>());
        r.true_pose = pose_from(j.at("pose"));
        r.reported_pose = pose_from(j.at("reported"));
        r.rewards.coverage = j.at("r_cr").get<double>();
        r.rewards.collision = j.at("r_col").get<double>();
        r.rewards.termination = j.at("r_term").get<double>();
        r.cr = j.at("cr").get<double>();
        r.covered = j.at("covered").get<std::size_t>();
        r.cd_m = j.at("cd_m").get<double>();
        r.plan_length = j.at("plan_m").get<double>();
        log.steps.push_back(r);
      } else if (type == "result") {
        if (!have_header) {
          throw LogError("result before header");
        }
        have_result = true;
        auto& res = log.result;
        const auto cause = parse_termination_cause(j.at("cause").get<std::string>());
        if (!cause) {
          throw LogError("unknown termination cause");
        }
        res.termination_cause = *cause;
        res.keyframes = j.at("keyframes").get<int>();
        res.collisions = j.at("collisions").get<int>();
        res.trajectory_length = j.at("traj_m").get<double>();
        res.initial_cr = j.at("initial_cr").get<double>();
        res.initial_covered = j.at("initial_covered").get<std::size_t>();
        res.initial_cd_m = j.at("initial_cd_m").get<double>();
        res.coverage_curve = j.at("coverage_curve").get<std::vector<double>>();
        res.chamfer_curve = j.at("chamfer_curve").get<std::vector<double>>();
        for (const auto& r : j.at("rewards")) {
          if (!r.is_array() || r.size() != 3) {
            throw LogError("reward entry must be [r_cr,r_col,r_term]");
          }
          res.rewards.push_back(StepRewards{r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
        }
        res.fault = j.at("fault").get<std::string>();
        if (res.keyframes != static_cast<int>(res.coverage_curve.size()) ||
            res.rewards.size() != res.coverage_curve.size()) {
          throw LogError("result curve lengths disagree with keyframes");
        }
      } else {
        throw LogError("unknown record type '" + type + "'");
      }
    } catch (const LogError& e) {
      throw LogError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw LogError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) {
    throw LogError(source + ":" + std::to_string(line_no) + ": missing header");
  }
  if (!have_result) {
    throw LogError(source + ":" + std::to_string(line_no) + ": missing result line");
  }
  return log;
}

ParsedEpisodeLog load_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw LogError(path + ": cannot open");
  }
  return parse_episode_log(in, path);
}

std::vector<Action> logged_actions(const ParsedEpisodeLog& log) {
  std::vector<Action> actions;
  actions.reserve(log.steps.size());
  for (const auto& s : log.steps) {
    actions.push_back(s.action);
  }
  return actions;
}

}  // namespace gleam
