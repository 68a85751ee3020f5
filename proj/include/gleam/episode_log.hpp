#ifndef GLEAM_EPISODE_LOG_HPP
#define GLEAM_EPISODE_LOG_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gleam/episode.hpp"

namespace gleam {

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identifies an episode inside a batch run.
struct EpisodeMeta {
  std::string dataset = "default";
  std::string noise = "noiseless";
  std::string policy;
  std::string scene;
  int scene_index = 0;
  int episode = 0;
  std::uint64_t seed = 0;
};

/// JSON-lines episode log: a header line (meta, config, start pose), one line
/// per keyframe, and a closing result line.
class EpisodeLogWriter final : public EpisodeObserver {
 public:
  EpisodeLogWriter(std::ostream& out, EpisodeMeta meta) : out_(out), meta_(std::move(meta)) {}

  void on_start(const Environment& env) override;
  void on_step(const Environment& env, const StepRecord& record) override;
  void on_end(const Environment& env) override;

 private:
  std::ostream& out_;
  EpisodeMeta meta_;
};

struct ParsedEpisodeLog {
  EpisodeMeta meta;
  EpisodeConfig config;
  Pose start;
  std::vector<StepRecord> steps;
  EpisodeResult result;
};

/// Throws LogError("<source>:<line>: ...") on the first malformed line or
/// when the log is truncated.
ParsedEpisodeLog parse_episode_log(std::istream& in, const std::string& source);
ParsedEpisodeLog load_episode_log(const std::string& path);

std::vector<Action> logged_actions(const ParsedEpisodeLog& log);

/// Short label for a noise setting, e.g. "p0.1c_d0.05".
std::string noise_tag(const NoiseModel& noise);

}  // namespace gleam

#endif  // GLEAM_EPISODE_LOG_HPP
