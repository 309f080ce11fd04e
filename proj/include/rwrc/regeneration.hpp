#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rwrc/environment.hpp"
#include "rwrc/trajectory.hpp"
#include "rwrc/walk.hpp"

namespace rwrc {

// Outcome of D = BACK ∧ ORI measured from an origin time.
struct DOutcome {
  bool finite = false;
  std::int64_t value = 0;  // steps after the origin when finite
  bool by_back = false;
};

// Examines steps origin+1 .. origin+horizon.  The origin must be a skeleton
// arrival time (every time of a dense trajectory is one).
DOutcome detect_D(const Environment& env, const Trajectory& etraj, std::int64_t origin_time,
                  std::int64_t horizon);

enum class CandidateStatus { Confirmed, Failed, Open };

// Fate of a K-open running maximum as a regeneration candidate.
struct CandidateFate {
  std::size_t index = 0;
  std::int64_t time = 0;
  Point point;
  std::int64_t level_key = 0;
  std::int64_t prev_max_key = 0;
  CandidateStatus status = CandidateStatus::Open;
  std::int64_t event_time = 0;  // time of the D event or of confirmation
  bool by_back = false;
};

// Single sweep over the trajectory deciding every candidate with arrival
// time <= horizon.  A candidate is confirmed once the walk reaches level
// X_t·ℓ̂ + confirm_distance with no D event; Open means the trajectory
// (or horizon) ended first.
std::vector<CandidateFate> candidate_fates(const Environment& env, const Trajectory& etraj,
                                           double confirm_distance, std::int64_t horizon);

struct RegenerationRecord {
  std::int64_t tau = 0;
  Point point;
  std::int64_t chi = 1;
  bool censored = false;
  std::size_t index = 0;  // skeleton index of X_τ
  std::int64_t level_key = 0;
  std::int64_t prev_max_key = 0;  // running maximum key just before τ
};

// Regeneration records without the empty-result error: confirmed records
// followed by censored ones.  Consecutive levels differ by at least 2/√d.
std::vector<RegenerationRecord> scan_regenerations(const Environment& env, const Trajectory& etraj,
                                                   double confirm_distance, std::int64_t horizon);

// As scan_regenerations; throws NoRegenerationFound without a confirmed record.
std::vector<RegenerationRecord> extract_regenerations(const Environment& env, const Trajectory& etraj,
                                                      double confirm_distance, std::int64_t horizon);

std::size_t confirmed_count(const std::vector<RegenerationRecord>& records);

// Smallest m >= 1 with {X_i − X_from : from <= i <= to} ⊂ 𝓑(m, m^α).
std::int64_t regeneration_box(const Frame& frame, const Trajectory& traj, std::int64_t from,
                              std::int64_t to, double alpha);

// Calls f(point) for every distinct-in-piece position with time in [t0, t1].
template <class F>
void for_each_position(const Trajectory& traj, std::int64_t t0, std::int64_t t1, F&& f);

// Simulates an enhanced walk until at least `wanted` confirmed records exist
// or a limit is hit; the walk is extended level by level in chunks.
struct RegenerationRun {
  Trajectory traj;
  std::vector<RegenerationRecord> records;
  bool complete = false;  // reached the requested number of confirmed records
};

struct RegenerationRunOptions {
  double confirm_distance = 64.0;
  std::size_t wanted = 1;
  std::int64_t max_time = kNoTimeLimit;
  // The walk also continues until its duration reaches min_time.
  std::int64_t min_time = 0;
  std::int64_t initial_level_chunk = 64;
  WalkOptions walk;
};

RegenerationRun run_until_regenerations(const Environment& env, const Point& start, RngStream rng,
                                        const RegenerationRunOptions& opts);

template <class F>
void for_each_position(const Trajectory& traj, std::int64_t t0, std::int64_t t1, F&& f) {
  if (t1 < t0) return;
  std::size_t i = traj.piece_of(t0);
  for (; i < traj.skeleton_size() && traj.time(i) <= t1; ++i) {
    const std::int64_t start = traj.time(i);
    const std::int64_t end = start + traj.extra_at(i);
    const std::int64_t lo = std::max(start, t0);
    const std::int64_t hi = std::min(end, t1);
    if (lo > hi) continue;
    const bool has_even = ((lo - start) % 2 == 0) || lo < hi;
    const bool has_odd = ((lo - start) % 2 == 1) || lo < hi;
    if (has_even) f(traj.site(i));
    if (has_odd) f(traj.site(i - 1));
  }
}

}  // namespace rwrc
