#ifndef GLEAM_RENDER_HPP
#define GLEAM_RENDER_HPP

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "gleam/episode_log.hpp"
#include "gleam/geometry.hpp"
#include "gleam/scene.hpp"

namespace gleam {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RenderedEpisode {
  std::vector<Grid<std::uint8_t>> frames;  // one per keyframe
  Grid<std::uint8_t> composite;            // ground truth | final map
};

/// Re-simulates a logged episode and draws the semantic map after every
/// keyframe with the reported trajectory overlaid. The composite puts the
/// ground truth with the true trajectory left of the final map. Throws
/// RenderError when the replay does not reproduce the logged result (wrong
/// scene or a corrupted log).
RenderedEpisode render_episode(const ParsedEpisodeLog& log, const PreparedScene& scene);

/// Writes frame_NNNN.pgm (1-based) and composite.pgm into `dir`. Returns the
/// written paths, frames first.
std::vector<std::filesystem::path> write_rendered(const RenderedEpisode& rendered,
                                                  const std::filesystem::path& dir);

}  // namespace gleam

#endif  // GLEAM_RENDER_HPP
