#include "gleam/render.hpp"

#include <cstdio>
#include <fstream>

#include "gleam/episode.hpp"
#include "gleam/mapping.hpp"

namespace gleam {

namespace {

void draw_polyline(Grid<std::uint8_t>& px, const std::vector<Cell>& points, Cell shift = {0, 0}) {
  auto plot = [&](Cell c) {
    const Cell p{c.x + shift.x, c.y + shift.y};
    if (px.contains(p)) {
      px[p] = kPixelTrajectory;
    }
  };
  if (points.size() == 1) {
    plot(points.front());
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    bresenham_visit(points[i - 1], points[i], plot);
  }
}

}  // namespace

RenderedEpisode render_episode(const ParsedEpisodeLog& log, const PreparedScene& scene) {
  Environment env(scene, log.config, log.start);
  const auto& map = env.map();
  std::vector<Cell> reported{map.cell_at(env.reported_pose().x, env.reported_pose().y)};
  std::vector<Cell> truth{map.cell_at(env.true_pose().x, env.true_pose().y)};

  RenderedEpisode out;
  for (const auto& logged : log.steps) {
    if (env.done()) {
      throw RenderError("log continues after the replayed episode ended");
    }
    const auto& rec = env.step(Decision{logged.action, logged.clamped});
    reported.push_back(map.cell_at(rec.reported_pose.x, rec.reported_pose.y));
    truth.push_back(map.cell_at(rec.true_pose.x, rec.true_pose.y));
    auto frame = to_pixels(env.semantic());
    draw_polyline(frame, reported);
    out.frames.push_back(std::move(frame));
  }
  if (log.result.termination_cause == TerminationCause::BridgeFault) {
    env.abort_bridge(log.result.fault);
  }
  if (!(env.result() == log.result)) {
    throw RenderError("replay of " + log.meta.scene + " episode " + std::to_string(log.meta.episode) +
                      " does not reproduce the logged result");
  }

  const int w = map.width();
  const int h = map.height();
  Grid<std::uint8_t> gt(w, h, kPixelUnknown);
  for (int y = 0; y < scene.grid.height(); ++y) {
    for (int x = 0; x < scene.grid.width(); ++x) {
      gt[map.to_map(Cell{x, y})] = scene.grid.occupied(Cell{x, y}) ? kPixelOccupied : kPixelFree;
    }
  }
  draw_polyline(gt, truth);
  auto final_map = to_pixels(env.semantic());
  draw_polyline(final_map, reported);

  out.composite = Grid<std::uint8_t>(2 * w, h, kPixelUnknown);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.composite.at(x, y) = gt.at(x, y);
      out.composite.at(w + x, y) = final_map.at(x, y);
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_rendered(const RenderedEpisode& rendered,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const Grid<std::uint8_t>& px) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << to_pgm(px);
    if (!f) {
      throw RenderError("cannot write " + path.string());
    }
    written.push_back(path);
  };
  for (std::size_t i = 0; i < rendered.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.pgm", i + 1);
    write(dir / name, rendered.frames[i]);
  }
  write(dir / "composite.pgm", rendered.composite);
  return written;
}

}  // namespace gleam
