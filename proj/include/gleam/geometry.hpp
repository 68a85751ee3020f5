#ifndef GLEAM_GEOMETRY_HPP
#define GLEAM_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gleam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;

/// Integer grid coordinate. Ordered row-major: by y, then x.
struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) {
      return c;
    }
    return a.x <=> b.x;
  }
};

/// SE(2) pose in meters / radians.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) {
    a += kTwoPi;
  } else if (a > kPi) {
    a -= kTwoPi;
  }
  return a;
}

/// Dense row-major 2D array.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw std::invalid_argument("grid dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool contains(int x, int y) const { return contains(Cell{x, y}); }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell(std::size_t i) const {
    return Cell{static_cast<int>(i % static_cast<std::size_t>(width_)),
                static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  T& operator[](Cell c) { return data_[index(c)]; }
  const T& operator[](Cell c) const { return data_[index(c)]; }
  T& at(int x, int y) { return data_[index(Cell{x, y})]; }
  const T& at(int x, int y) const { return data_[index(Cell{x, y})]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

inline constexpr Cell kNeighbors4[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
inline constexpr Cell kNeighbors8[8] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                        {1, 1},  {-1, 1}, {1, -1}, {-1, -1}};

}  // namespace gleam

#endif  // GLEAM_GEOMETRY_HPP
