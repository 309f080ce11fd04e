#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "rwrc/environment.hpp"
#include "rwrc/rng.hpp"
#include "rwrc/trajectory.hpp"

namespace rwrc {

// p(x, x+e_j) for the 2d directions, in direction order.
std::vector<double> transition_distribution(const Environment& env, const Point& x);

struct EnhancedTransition {
  std::vector<double> k_channel;  // p_K(x, ·)
  std::vector<double> defect;     // p(x, ·) - p_K(x, ·)
};
EnhancedTransition enhanced_transition(const Environment& env, const Point& x);

struct WalkOptions {
  bool enhanced = false;
  // Sample whole back-and-forth runs on strongly trapping edges at once.
  bool accelerate = true;
  // Acceleration applies when p(a,b) p(b,a) reaches this value.
  double bounce_threshold = 0.5;
  std::size_t max_skeleton = 20'000'000;
};

inline constexpr std::int64_t kNoTimeLimit = std::numeric_limits<std::int64_t>::max() / 4;

// Resumable walker: repeated run() calls extend the same trajectory.
class Walker {
 public:
  Walker(const Environment& env, const Point& start, RngStream rng, const WalkOptions& opts);

  // Advances until duration() >= max_time, an arrival with level key at
  // least stop_level_key, or the skeleton capacity is reached.
  StopReason run(std::int64_t max_time, std::optional<std::int64_t> stop_level_key = std::nullopt);

  const Trajectory& trajectory() const { return traj_; }
  Trajectory take() { return std::move(traj_); }
  // Highest level key reached so far.
  std::int64_t max_level_key() const { return max_key_; }
  bool exhausted() const { return exhausted_; }
  RngStream& rng() { return rng_; }

 private:
  struct SiteState {
    Point x;
    std::array<double, 2 * kMaxDim> w{};
    std::array<double, 2 * kMaxDim> kw{};
  };

  void load(SiteState& s, const Point& x) const;
  int sample(const SiteState& s, int excluded, bool& bit);
  void move(int dir, bool bit);
  bool bounce(std::int64_t max_time);

  const Environment* env_;
  RngStream rng_;
  WalkOptions opts_;
  Trajectory traj_;
  int d_;
  SiteState cur_;
  SiteState prv_;
  int last_dir_ = -1;
  std::int64_t max_key_ = 0;
  bool exhausted_ = false;
};

// Dense walk of exactly `steps` steps (no acceleration).
Trajectory simulate_path(const Environment& env, const Point& x0, RngStream& rng, std::int64_t steps);
Trajectory simulate_enhanced(const Environment& env, const Point& x0, RngStream& rng, std::int64_t steps);

// Orthonormal frame (ℓ̂, f_2, ..., f_d) used for tilted boxes.
struct Frame {
  int d = 2;
  std::array<double, kMaxDim> ell{};
  std::array<std::array<double, kMaxDim>, kMaxDim - 1> f{};
  static Frame from(const EnvConfig& cfg);
  double along(const Point& v) const;
  // max_j |v·f_j|
  double across(const Point& v) const;
};

// 𝓑_y(L, L'): |(x−y)·ℓ̂| ≤ L and |(x−y)·f_j| ≤ L' for j = 2..d.
struct TiltedBox {
  Point center;
  double L = 0.0;
  double Lp = 0.0;
  bool contains(const Frame& frame, const Point& x) const;
};

using PointPredicate = std::function<bool(const Point&)>;

// T_B = inf{n >= 0 : X_n ∈ B}; strict gives T⁺_B = inf{n >= 1 : ...}.
std::optional<std::int64_t> hitting_time(const Trajectory& traj, const PointPredicate& in_set,
                                         bool strict = false);
// T_R = first n with X_n in 𝓗⁺(R) = {x : x·ℓ̂ > R}.
std::optional<std::int64_t> level_hitting_time(const Trajectory& traj, const Environment& env, double R);
// First n with X_n outside the box.
std::optional<std::int64_t> exit_time(const Trajectory& traj, const Frame& frame, const TiltedBox& box);

}  // namespace rwrc
