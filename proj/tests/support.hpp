#ifndef GLEAM_TESTS_SUPPORT_HPP
#define GLEAM_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gleam/mapping.hpp"
#include "gleam/planning.hpp"
#include "gleam/scene.hpp"

namespace testsupport {

using gleam::Cell;
using gleam::CellState;
using gleam::SemanticGrid;

// Rectangular room: occupied border, free interior, optional extra walls.
inline gleam::SceneGrid box_room(int w, int h, std::vector<Cell> extra = {},
                                 std::string name = "box") {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
        occ[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
  }
  for (auto c : extra) {
    occ[static_cast<std::size_t>(c.y) * w + c.x] = 1;
  }
  return gleam::SceneGrid(w, h, 0.1, std::move(occ), std::move(name));
}

// Exact path cost (orthogonal, diagonal) compared by Euclidean length.
struct Cost {
  int o = 0;
  int d = 0;
  double len() const { return o + d * std::sqrt(2.0); }
};

// Plain Dijkstra over the same motion model the planner claims to use:
// 8-connected, traversable = Free/Frontier, no corner cutting.
inline gleam::Grid<std::optional<Cost>> dijkstra(const SemanticGrid& g, Cell s) {
  gleam::Grid<std::optional<Cost>> dist(g.width(), g.height());
  auto ok = [&](int x, int y) {
    return g.contains(x, y) && gleam::is_traversable(g.at(x, y));
  };
  if (!ok(s.x, s.y)) {
    return dist;
  }
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = Cost{};
  pq.push({0.0, dist.index(s)});
  gleam::Grid<char> done(g.width(), g.height(), 0);
  while (!pq.empty()) {
    auto [l, i] = pq.top();
    pq.pop();
    const Cell c = dist.cell(i);
    if (done[c]) {
      continue;
    }
    done[c] = 1;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx == 0 && dy == 0) || !ok(c.x + dx, c.y + dy)) {
          continue;
        }
        const bool diag = dx != 0 && dy != 0;
        if (diag && (!ok(c.x + dx, c.y) || !ok(c.x, c.y + dy))) {
          continue;
        }
        Cost nc = *dist[c];
        (diag ? nc.d : nc.o) += 1;
        const Cell n{c.x + dx, c.y + dy};
        if (!dist[n] || nc.len() < dist[n]->len() - 1e-12) {
          dist[n] = nc;
          pq.push({nc.len(), dist.index(n)});
        }
      }
    }
  }
  return dist;
}

// Random tri-state grid with the given occupancy / unknown fractions.
inline SemanticGrid random_tristate(std::mt19937_64& rng, int w, int h, double p_occ,
                                    double p_unknown) {
  SemanticGrid g(w, h, CellState::Free);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : g.data()) {
    const double r = u(rng);
    v = r < p_occ ? CellState::Occupied : r < p_occ + p_unknown ? CellState::Unknown : CellState::Free;
  }
  return g;
}

// Perfect maze (recursive backtracker on odd cells) with a fraction of extra
// walls knocked out so that many alternative routes exist.
inline SemanticGrid maze(std::mt19937_64& rng, int w, int h, double knockout) {
  SemanticGrid g(w, h, CellState::Occupied);
  std::vector<Cell> stack{{1, 1}};
  g.at(1, 1) = CellState::Free;
  const int dirs[4][2] = {{2, 0}, {-2, 0}, {0, 2}, {0, -2}};
  while (!stack.empty()) {
    const Cell c = stack.back();
    std::vector<int> options;
    for (int k = 0; k < 4; ++k) {
      const int nx = c.x + dirs[k][0];
      const int ny = c.y + dirs[k][1];
      if (nx > 0 && ny > 0 && nx < w - 1 && ny < h - 1 && g.at(nx, ny) == CellState::Occupied) {
        options.push_back(k);
      }
    }
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    const int k = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    g.at(c.x + dirs[k][0] / 2, c.y + dirs[k][1] / 2) = CellState::Free;
    g.at(c.x + dirs[k][0], c.y + dirs[k][1]) = CellState::Free;
    stack.push_back(Cell{c.x + dirs[k][0], c.y + dirs[k][1]});
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      if (g.at(x, y) == CellState::Occupied && u(rng) < knockout) {
        g.at(x, y) = CellState::Free;
      }
    }
  }
  return g;
}

// True if the open segment p -> q passes through the interior of the unit
// cell square [cx, cx+1] x [cy, cy+1] (cell units).
inline bool segment_hits_interior(double px, double py, double qx, double qy, int cx, int cy) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = qx - px;
  const double dy = qy - py;
  auto clip = [&](double p, double q) {
    if (p == 0.0) {
      return q > 0.0;
    }
    const double r = q / p;
    if (p < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    return true;
  };
  if (!clip(-dx, px - cx) || !clip(dx, cx + 1 - px) || !clip(-dy, py - cy) ||
      !clip(dy, cy + 1 - py)) {
    return false;
  }
  return t1 - t0 > 1e-9;
}

// Surface cells with a face portion visible from `origin` (cell units): some
// sample point strictly inside one of its faces is reachable by a segment that
// crosses no other occupied cell's interior.
inline std::vector<Cell> visible_surface(const gleam::SceneGrid& scene, double ox, double oy,
                                         int samples = 16) {
  std::vector<Cell> out;
  const auto gt = gleam::ground_truth_surface(scene);
  for (const Cell c : gt.cells) {
    bool seen = false;
    for (int face = 0; face < 4 && !seen; ++face) {
      for (int k = 1; k < samples && !seen; ++k) {
        const double s = static_cast<double>(k) / samples;
        double px = c.x;
        double py = c.y;
        switch (face) {
          case 0: px = c.x + s; break;                 // bottom
          case 1: px = c.x + s; py = c.y + 1; break;   // top
          case 2: py = c.y + s; break;                 // left
          default: px = c.x + 1; py = c.y + s; break;  // right
        }
        bool blocked = false;
        for (int y = 0; y < scene.height() && !blocked; ++y) {
          for (int x = 0; x < scene.width() && !blocked; ++x) {
            if (scene.occupied(Cell{x, y}) &&
                segment_hits_interior(ox, oy, px, py, x, y)) {
              blocked = true;
            }
          }
        }
        seen = !blocked;
      }
    }
    if (seen) {
      out.push_back(c);
    }
  }
  return out;
}

// One cell per step of the dominant axis; on the other axis the integer
// closest to the exact line, ties to the larger value. Found by exhaustive
// search over candidate cells with exact integer distances.
inline std::vector<Cell> line_oracle(Cell a, Cell b) {
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const bool x_major = std::abs(dx) >= std::abs(dy);
  const int n = std::max(std::abs(dx), std::abs(dy));
  std::vector<Cell> out;
  for (int i = 0; i <= n; ++i) {
    if (n == 0) {
      out.push_back(a);
      break;
    }
    // position along the major axis, and the exact minor value num/n
    const int major = (x_major ? a.x : a.y) + i * ((x_major ? dx : dy) >= 0 ? 1 : -1);
    const long num = static_cast<long>(x_major ? a.y : a.x) * n + static_cast<long>(i) * (x_major ? dy : dx);
    int best = 0;
    long best_err = -1;
    for (int cand = std::min(a.x, std::min(a.y, std::min(b.x, b.y))) - 1;
         cand <= std::max(a.x, std::max(a.y, std::max(b.x, b.y))) + 1; ++cand) {
      const long err = std::labs(static_cast<long>(cand) * n - num);
      if (best_err < 0 || err < best_err || (err == best_err && cand > best)) {
        best = cand;
        best_err = err;
      }
    }
    out.push_back(x_major ? Cell{major, best} : Cell{best, major});
  }
  return out;
}

// Free cells with an Unknown 4-neighbour, row-major.
inline std::vector<Cell> naive_frontiers(const SemanticGrid& g) {
  std::vector<Cell> out;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (g.at(x, y) != CellState::Free) {
        continue;
      }
      bool f = false;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx >= 0 && ny >= 0 && nx < g.width() && ny < g.height() && g.at(nx, ny) == CellState::Unknown) {
          f = true;
        }
      }
      if (f) {
        out.push_back(Cell{x, y});
      }
    }
  }
  return out;
}

}  // namespace testsupport

#endif  // GLEAM_TESTS_SUPPORT_HPP
