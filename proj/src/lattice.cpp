#include "rwrc/lattice.hpp"

#include <cmath>
#include <cstdlib>

#include "rwrc/hash.hpp"

namespace rwrc {

Point unit(int axis, int sign) {
  Point p;
  p.c[axis] = sign;
  return p;
}

Point neighbor(const Point& x, int d, int dir) {
  Point y = x;
  if (dir < d)
    ++y.c[dir];
  else
    --y.c[dir - d];
  return y;
}

int opposite_dir(int dir, int d) { return dir < d ? dir + d : dir - d; }

int step_dir(const Point& x, const Point& y, int d) {
  int found = -1;
  for (int i = 0; i < kMaxDim; ++i) {
    const std::int64_t diff = std::int64_t{y.c[i]} - x.c[i];
    if (diff == 0) continue;
    if (found != -1 || i >= d || (diff != 1 && diff != -1)) return -1;
    found = diff == 1 ? i : i + d;
  }
  return found;
}

std::int64_t l1_distance(const Point& a, const Point& b) {
  std::int64_t s = 0;
  for (int i = 0; i < kMaxDim; ++i) s += std::llabs(std::int64_t{a.c[i]} - b.c[i]);
  return s;
}

std::int64_t dot(const Point& a, const Point& b) {
  std::int64_t s = 0;
  for (int i = 0; i < kMaxDim; ++i) s += std::int64_t{a.c[i]} * b.c[i];
  return s;
}

double dot(const Point& a, const std::array<double, kMaxDim>& v) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += a.c[i] * v[i];
  return s;
}

double norm2(const Point& a) { return std::sqrt(static_cast<double>(dot(a, a))); }

std::string to_string(const Point& p, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) {
    if (i) s += ',';
    s += std::to_string(p.c[i]);
  }
  return s + ')';
}

bool in_window(const Point& p) {
  for (int i = 0; i < kMaxDim; ++i)
    if (p.c[i] <= -kCoordLimit || p.c[i] >= kCoordLimit) return false;
  return true;
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
  std::uint64_t lo = (std::uint64_t(std::uint32_t(p.c[0])) << 32) | std::uint32_t(p.c[1]);
  std::uint64_t hi = (std::uint64_t(std::uint32_t(p.c[2])) << 32) | std::uint32_t(p.c[3]);
  return static_cast<std::size_t>(mix64(lo ^ mix64(hi + 0x9e3779b97f4a7c15ULL)));
}

}  // namespace rwrc
