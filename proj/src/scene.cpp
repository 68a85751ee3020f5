#include "gleam/scene.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gleam {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw SceneError("cannot format value");
  }
  return std::string(buf, end);
}

bool parse_key_value(std::string_view token, std::string_view key, std::string_view& value) {
  if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    return false;
  }
  value = token.substr(key.size() + 1);
  return true;
}

template <class T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw SceneError(std::string("parse error: bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SceneGrid::SceneGrid(int width, int height, double cell_size, std::vector<std::uint8_t> occupied,
                     std::string name, std::uint64_t seed)
    : width_(width),
      height_(height),
      cell_size_(cell_size),
      occupied_(std::move(occupied)),
      name_(std::move(name)),
      seed_(seed) {
  if (width_ < 3 || height_ < 3) {
    throw SceneError("scene must be at least 3x3 cells");
  }
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
    throw SceneError("cell_size must be positive");
  }
  if (occupied_.size() != static_cast<std::size_t>(width_) * height_) {
    throw SceneError("cell buffer does not match dimensions");
  }
  for (auto& v : occupied_) {
    v = v != 0 ? 1 : 0;
  }
  for (int x = 0; x < width_; ++x) {
    if (free(Cell{x, 0}) || free(Cell{x, height_ - 1})) {
      throw SceneError("non-watertight: free cell on the border");
    }
  }
  for (int y = 0; y < height_; ++y) {
    if (free(Cell{0, y}) || free(Cell{width_ - 1, y})) {
      throw SceneError("non-watertight: free cell on the border");
    }
  }
  for (auto v : occupied_) {
    free_count_ += v == 0 ? 1 : 0;
  }
  if (free_count_ == 0) {
    throw SceneError("scene has no free cells");
  }
  if (count_free_components(*this) != 1) {
    throw SceneError("free region is not 4-connected");
  }
}

int count_free_components(const SceneGrid& scene) {
  Grid<std::uint8_t> seen(scene.width(), scene.height(), 0);
  std::vector<Cell> stack;
  int components = 0;
  for (int y = 0; y < scene.height(); ++y) {
    for (int x = 0; x < scene.width(); ++x) {
      const Cell c{x, y};
      if (scene.occupied(c) || seen[c]) {
        continue;
      }
      ++components;
      seen[c] = 1;
      stack.push_back(c);
      while (!stack.empty()) {
        const Cell cur = stack.back();
        stack.pop_back();
        for (const auto& d : kNeighbors4) {
          const Cell n{cur.x + d.x, cur.y + d.y};
          if (scene.free(n) && !seen[n]) {
            seen[n] = 1;
            stack.push_back(n);
          }
        }
      }
    }
  }
  return components;
}

PreparedScene::PreparedScene(SceneGrid g, int start_kernel)
    : grid(std::move(g)),
      surface(ground_truth_surface(grid)),
      start_region(gleam::start_region(grid, start_kernel)) {}

SceneGrid parse_scene(std::string_view text, std::string name) {
  auto next_line = [&text](std::string_view& line) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) {
      return false;
    }
    line = text.substr(0, nl);
    text.remove_prefix(nl + 1);
    return true;
  };

  std::string_view header;
  if (!next_line(header)) {
    throw SceneError("parse error: missing header line");
  }
  std::vector<std::string_view> tokens;
  while (!header.empty()) {
    const auto sp = header.find(' ');
    tokens.push_back(header.substr(0, sp));
    if (sp == std::string_view::npos) {
      break;
    }
    header.remove_prefix(sp + 1);
  }
  std::string_view w_str, h_str, cs_str;
  if (tokens.size() != 5 || tokens[0] != "GLEAMGRID" || tokens[1] != "v1" ||
      !parse_key_value(tokens[2], "width", w_str) || !parse_key_value(tokens[3], "height", h_str) ||
      !parse_key_value(tokens[4], "cell_size", cs_str)) {
    throw SceneError(
        "parse error: header must be 'GLEAMGRID v1 width=<W> height=<H> cell_size=<meters>'");
  }
  const int width = parse_number<int>(w_str, "width");
  const int height = parse_number<int>(h_str, "height");
  const double cell_size = parse_number<double>(cs_str, "cell_size");
  if (width <= 0 || height <= 0) {
    throw SceneError("parse error: dimensions must be positive");
  }

  std::vector<std::uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    std::string_view line;
    if (!next_line(line)) {
      throw SceneError("parse error: expected " + std::to_string(height) + " rows, got " +
                       std::to_string(y));
    }
    if (static_cast<int>(line.size()) != width) {
      throw SceneError("parse error: row " + std::to_string(y) + " has " +
                       std::to_string(line.size()) + " characters, expected " +
                       std::to_string(width));
    }
    for (char ch : line) {
      if (ch == '#') {
        cells.push_back(1);
      } else if (ch == '.') {
        cells.push_back(0);
      } else {
        throw SceneError(std::string("parse error: invalid cell character '") + ch + "' in row " +
                         std::to_string(y));
      }
    }
  }
  if (!text.empty()) {
    throw SceneError("parse error: trailing content after grid rows");
  }
  return SceneGrid(width, height, cell_size, std::move(cells), std::move(name), 0);
}

std::string format_scene(const SceneGrid& scene) {
  std::string out = "GLEAMGRID v1 width=" + std::to_string(scene.width()) +
                    " height=" + std::to_string(scene.height()) +
                    " cell_size=" + format_double(scene.cell_size()) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(scene.width() + 1) * scene.height());
  for (int y = 0; y < scene.height(); ++y) {
    for (int x = 0; x < scene.width(); ++x) {
      out.push_back(scene.occupied(Cell{x, y}) ? '#' : '.');
    }
    out.push_back('\n');
  }
  return out;
}

SceneGrid load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SceneError("cannot open scene file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scene(ss.str(), path.stem().string());
  } catch (const SceneError& e) {
    throw SceneError(path.string() + ": " + e.what());
  }
}

void save_scene(const SceneGrid& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw SceneError("cannot write scene file " + path.string());
  }
  out << format_scene(scene);
}

GroundTruthSurface ground_truth_surface(const SceneGrid& scene) {
  GroundTruthSurface gt;
  gt.width = scene.width();
  gt.height = scene.height();
  gt.cell_size = scene.cell_size();
  for (int y = 0; y < scene.height(); ++y) {
    for (int x = 0; x < scene.width(); ++x) {
      const Cell c{x, y};
      if (!scene.occupied(c)) {
        continue;
      }
      for (const auto& d : kNeighbors8) {
        if (scene.free(Cell{x + d.x, y + d.y})) {
          gt.cells.push_back(c);
          break;
        }
      }
    }
  }
  return gt;
}

StartRegion start_region(const SceneGrid& scene, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw SceneError("start-region kernel must be a positive odd number");
  }
  const int r = kernel / 2;
  StartRegion region;
  region.kernel = kernel;
  for (int y = 0; y < scene.height(); ++y) {
    for (int x = 0; x < scene.width(); ++x) {
      bool ok = true;
      for (int dy = -r; dy <= r && ok; ++dy) {
        for (int dx = -r; dx <= r && ok; ++dx) {
          ok = scene.free(Cell{x + dx, y + dy});
        }
      }
      if (ok) {
        region.cells.push_back(Cell{x, y});
      }
    }
  }
  return region;
}

Pose sample_start_pose(const StartRegion& region, double cell_size, Rng& rng) {
  if (region.cells.empty()) {
    throw SceneError("start region is empty");
  }
  std::uniform_int_distribution<std::size_t> pick(0, region.cells.size() - 1);
  std::uniform_real_distribution<double> heading(0.0, kTwoPi);
  const Cell c = region.cells[pick(rng)];
  const double theta = heading(rng);
  return Pose{(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size, theta};
}

Pose sample_start_pose(const SceneGrid& scene, Rng& rng, int kernel) {
  return sample_start_pose(start_region(scene, kernel), scene.cell_size(), rng);
}

}  // namespace gleam
