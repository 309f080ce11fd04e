#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "rwrc/regeneration.hpp"
#include "rwrc/trajectory.hpp"
#include "rwrc/walk.hpp"

namespace rwrc {

// Calls f(step, position) for times 0..min(duration, max_step), expanding
// compressed bounce runs.
template <class F>
void for_each_step(const Trajectory& traj, std::int64_t max_step, F&& f) {
  for (std::size_t i = 0; i < traj.skeleton_size(); ++i) {
    const std::int64_t t0 = traj.time(i);
    if (t0 > max_step) return;
    f(t0, traj.site(i));
    const std::int64_t extra = traj.extra_at(i);
    for (std::int64_t k = 1; k <= extra; ++k) {
      if (t0 + k > max_step) return;
      f(t0 + k, (k & 1) ? traj.site(i - 1) : traj.site(i));
    }
  }
}

// One JSON object per line: {"step": n, "x": [coords]}.
void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj, int d, std::int64_t max_step = kNoTimeLimit);
std::vector<Point> read_trajectory_jsonl(std::istream& is, int d);

// "RWTJ", one byte d, varint position count, zig-zag varint start
// coordinates, then zig-zag varint coordinate deltas per position.
void write_trajectory_binary(std::ostream& os, const Trajectory& traj, int d,
                             std::int64_t max_step = kNoTimeLimit);
std::vector<Point> read_trajectory_binary(std::istream& is, int& d);

// One JSON object per line: {"k", "tau", "point", "chi", "censored"}.
void write_regenerations_jsonl(std::ostream& os, const std::vector<RegenerationRecord>& records, int d);

}  // namespace rwrc
