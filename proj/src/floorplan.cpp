// Axis-aligned BSP floorplans: rooms are leaves of a binary split tree, each
// split wall gets one door connecting its two subtrees, and rooms are
// optionally cluttered with rectangular obstacles that keep a free ring.

#include <algorithm>
#include <cmath>
#include <optional>

#include "gleam/scene.hpp"

namespace gleam {

namespace {

constexpr int kMinRoomSide = 6;
constexpr int kMaxAttempts = 64;

struct Rect {
  int x0, y0, x1, y1;  // inclusive interior bounds
  int w() const { return x1 - x0 + 1; }
  int h() const { return y1 - y0 + 1; }
  long area() const { return static_cast<long>(w()) * h(); }
};

struct SplitWall {
  bool vertical;  // wall is a column at x = pos
  int pos;
  int lo, hi;     // span along the wall, inclusive
};

std::optional<std::pair<Rect, Rect>> try_split(const Rect& r, bool vertical, Rng& rng, SplitWall& wall) {
  const int lo = vertical ? r.x0 : r.y0;
  const int hi = vertical ? r.x1 : r.y1;
  // both halves keep at least kMinRoomSide cells, wall takes one
  const int smin = lo + kMinRoomSide;
  const int smax = hi - kMinRoomSide;
  if (smin > smax) {
    return std::nullopt;
  }
  const int s = std::uniform_int_distribution<int>(smin, smax)(rng);
  wall.vertical = vertical;
  wall.pos = s;
  if (vertical) {
    wall.lo = r.y0;
    wall.hi = r.y1;
    return std::make_pair(Rect{r.x0, r.y0, s - 1, r.y1}, Rect{s + 1, r.y0, r.x1, r.y1});
  }
  wall.lo = r.x0;
  wall.hi = r.x1;
  return std::make_pair(Rect{r.x0, r.y0, r.x1, s - 1}, Rect{r.x0, s + 1, r.x1, r.y1});
}

std::optional<Grid<std::uint8_t>> build(const FloorplanConfig& cfg, Rng& rng) {
  const int extent = cfg.target_extent;
  std::vector<Rect> leaves{Rect{1, 1, extent - 2, extent - 2}};
  std::vector<SplitWall> walls;

  while (static_cast<int>(leaves.size()) < cfg.room_count) {
    std::vector<std::size_t> order(leaves.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return leaves[a].area() > leaves[b].area();
    });
    bool split = false;
    for (auto idx : order) {
      const Rect r = leaves[idx];
      bool vertical = r.w() > r.h() || (r.w() == r.h() && std::bernoulli_distribution(0.5)(rng));
      SplitWall wall{};
      auto halves = try_split(r, vertical, rng, wall);
      if (!halves) {
        halves = try_split(r, !vertical, rng, wall);
      }
      if (halves) {
        leaves[idx] = halves->first;
        leaves.push_back(halves->second);
        walls.push_back(wall);
        split = true;
        break;
      }
    }
    if (!split) {
      return std::nullopt;
    }
  }

  Grid<std::uint8_t> occ(extent, extent, 1);
  for (const auto& r : leaves) {
    for (int y = r.y0; y <= r.y1; ++y) {
      for (int x = r.x0; x <= r.x1; ++x) {
        occ.at(x, y) = 0;
      }
    }
  }

  // Doors are chosen against the room-only raster so that side cells are
  // always room interior, never another door.
  const Grid<std::uint8_t> rooms = occ;
  for (const auto& wall : walls) {
    auto side_free = [&](int t) {
      if (wall.vertical) {
        return rooms.at(wall.pos - 1, t) == 0 && rooms.at(wall.pos + 1, t) == 0;
      }
      return rooms.at(t, wall.pos - 1) == 0 && rooms.at(t, wall.pos + 1) == 0;
    };
    std::vector<int> starts;
    for (int p = wall.lo; p + cfg.door_width - 1 <= wall.hi; ++p) {
      bool ok = true;
      for (int t = p; t < p + cfg.door_width && ok; ++t) {
        ok = side_free(t);
      }
      if (ok) {
        starts.push_back(p);
      }
    }
    if (starts.empty()) {
      return std::nullopt;
    }
    const int p = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
    for (int t = p; t < p + cfg.door_width; ++t) {
      if (wall.vertical) {
        occ.at(wall.pos, t) = 0;
      } else {
        occ.at(t, wall.pos) = 0;
      }
    }
  }

  if (cfg.clutter_density > 0.0) {
    for (const auto& r : leaves) {
      const long target = std::lround(cfg.clutter_density * static_cast<double>(r.area()));
      long filled = 0;
      // obstacles stay two cells off the walls so a free ring survives
      const int ax0 = r.x0 + 1, ax1 = r.x1 - 1, ay0 = r.y0 + 1, ay1 = r.y1 - 1;
      const int attempts = static_cast<int>(40 + 20 * target);
      for (int a = 0; a < attempts && filled < target; ++a) {
        const int w = std::uniform_int_distribution<int>(2, 4)(rng);
        const int h = std::uniform_int_distribution<int>(2, 4)(rng);
        if (ax1 - ax0 + 1 < w + 2 || ay1 - ay0 + 1 < h + 2) {
          continue;
        }
        const int x = std::uniform_int_distribution<int>(ax0 + 1, ax1 - w)(rng);
        const int y = std::uniform_int_distribution<int>(ay0 + 1, ay1 - h)(rng);
        bool clear = true;
        for (int yy = y - 1; yy <= y + h && clear; ++yy) {
          for (int xx = x - 1; xx <= x + w && clear; ++xx) {
            clear = occ.at(xx, yy) == 0;
          }
        }
        if (!clear) {
          continue;
        }
        for (int yy = y; yy < y + h; ++yy) {
          for (int xx = x; xx < x + w; ++xx) {
            occ.at(xx, yy) = 1;
          }
        }
        filled += static_cast<long>(w) * h;
      }
    }
  }
  return occ;
}

}  // namespace

SceneGrid generate_floorplan(const FloorplanConfig& cfg) {
  if (cfg.room_count < 1) {
    throw SceneError("infeasible floorplan: room_count must be >= 1");
  }
  if (cfg.door_width < 2) {
    throw SceneError("infeasible floorplan: door_width must be >= 2");
  }
  if (cfg.clutter_density < 0.0 || cfg.clutter_density > 0.3) {
    throw SceneError("infeasible floorplan: clutter_density must be in [0, 0.3]");
  }
  if (static_cast<double>(cfg.target_extent) < 16.0 * std::sqrt(static_cast<double>(cfg.room_count))) {
    throw SceneError("infeasible floorplan: target_extent must be >= 16*sqrt(room_count)");
  }
  if (cfg.door_width > kMinRoomSide) {
    throw SceneError("infeasible floorplan: door_width exceeds minimum room side");
  }
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(split_seed(cfg.seed, {hash_label("floorplan"), static_cast<std::uint64_t>(attempt)}));
    auto occ = build(cfg, rng);
    if (occ) {
      return SceneGrid(cfg.target_extent, cfg.target_extent, cfg.cell_size, std::move(occ->data()),
                       "floorplan_" + std::to_string(cfg.seed), cfg.seed);
    }
  }
  throw SceneError("infeasible floorplan: rooms cannot be packed");
}

}  // namespace gleam
