#pragma once

#include <cmath>
#include <initializer_list>
#include <memory>
#include <vector>

#include "rwrc/config.hpp"
#include "rwrc/environment.hpp"
#include "rwrc/lattice.hpp"
#include "rwrc/trajectory.hpp"

namespace rwrc::test {

inline Point pt(int x, int y = 0, int z = 0) {
  Point p;
  p[0] = x;
  p[1] = y;
  p[2] = z;
  return p;
}

inline EnvConfig make_cfg(double gamma = 0.5, double lambda = 0.5, double K = 10.0, std::uint64_t seed = 1,
                          int d = 2) {
  EnvConfig cfg;
  cfg.d = d;
  cfg.gamma = gamma;
  cfg.lambda = lambda;
  cfg.K = K;
  cfg.seed = seed;
  cfg.alpha = d + 4.0;
  return cfg;
}

inline std::shared_ptr<ConductanceOverrides> fill(double value) {
  auto o = std::make_shared<ConductanceOverrides>();
  o->fill = value;
  return o;
}

// Enhanced trajectory through the given points; bits[i] is Z at step i (bits[0] unused).
inline Trajectory path(std::initializer_list<Point> pts, std::vector<int> bits = {}) {
  auto it = pts.begin();
  Trajectory t(*it, 0, true);
  std::size_t i = 1;
  for (++it; it != pts.end(); ++it, ++i) t.append(*it, bits.empty() ? true : bits[i] != 0);
  return t;
}

inline Trajectory path(const std::vector<Point>& pts) {
  Trajectory t(pts.front(), 0, true);
  for (std::size_t i = 1; i < pts.size(); ++i) t.append(pts[i], true);
  return t;
}

// Straight path along +e1 of the given length from start.
inline std::vector<Point> straight(const Point& start, int steps) {
  std::vector<Point> out{start};
  for (int i = 0; i < steps; ++i) out.push_back(out.back() + unit(0));
  return out;
}

}  // namespace rwrc::test
