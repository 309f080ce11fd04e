#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace rwrc {

inline constexpr int kMaxDim = 4;
// Coordinates must stay strictly inside (-kCoordLimit, kCoordLimit).
inline constexpr std::int32_t kCoordLimit = 1 << 15;

// Lattice point of Z^d; unused trailing coordinates are zero.
struct Point {
  std::array<std::int32_t, kMaxDim> c{};

  std::int32_t& operator[](std::size_t i) { return c[i]; }
  std::int32_t operator[](std::size_t i) const { return c[i]; }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

  Point operator+(const Point& o) const {
    Point r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Point operator-(const Point& o) const {
    Point r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
};

Point unit(int axis, int sign = 1);

// Neighbour directions are indexed 0..2d-1: j < d is +e_j, j >= d is -e_{j-d}.
Point neighbor(const Point& x, int d, int dir);
int opposite_dir(int dir, int d);
// Direction index of y - x, or -1 when the points are not nearest neighbours.
int step_dir(const Point& x, const Point& y, int d);

std::int64_t l1_distance(const Point& a, const Point& b);
std::int64_t dot(const Point& a, const Point& b);
double dot(const Point& a, const std::array<double, kMaxDim>& v);
double norm2(const Point& a);
std::string to_string(const Point& p, int d);

bool in_window(const Point& p);

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

// Calls f on every z with ||z - x||_1 <= 1 (the set V_x), x first.
template <class F>
void for_each_vicinity(const Point& x, int d, F&& f) {
  f(x);
  for (int j = 0; j < 2 * d; ++j) f(neighbor(x, d, j));
}

}  // namespace rwrc
