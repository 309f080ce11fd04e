#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rwrc/environment.hpp"
#include "rwrc/processes.hpp"
#include "rwrc/regeneration.hpp"
#include "rwrc/walk.hpp"

namespace rwrc {

struct PairTrajectory {
  Trajectory walk1;
  Trajectory walk2;
};

// Two dense enhanced walks in one environment with distinct streams.
PairTrajectory simulate_pair(const Environment& env, const Point& u1, const Point& u2,
                             std::uint64_t master_seed, std::array<std::uint64_t, 2> streams,
                             std::int64_t steps);

struct JointRegenRecord {
  double level = 0.0;
  std::int64_t entry_time1 = 0;
  std::int64_t entry_time2 = 0;
  Point point1;
  Point point2;
  bool censored = false;
};

struct JointDWalk {
  bool finite = false;
  std::int64_t value = 0;  // steps after the walk's origin
  // M^i: max level up to the first event (unbounded R); empty if none recorded.
  std::optional<double> M;
  double max_level_seen = 0.0;
};

struct JointDOutcome {
  std::array<JointDWalk, 2> walk;
  bool finite() const { return walk[0].finite || walk[1].finite; }
  // M = M^1 ∧ M^2 when at least one is observed.
  std::optional<double> M() const;
};

// 𝒟•(i)_{≤R} for both walks from the given origin times (skeleton arrivals).
// Throws HorizonTooShort if a walk without an event never enters 𝓗⁺(R).
JointDOutcome detect_joint_D(const Environment& env, const PairTrajectory& pair,
                             std::array<std::int64_t, 2> origin_times, double R);

// Smallest grid value R with 𝒟•_{≤R} finite, or empty (censored).
std::optional<double> estimate_M(const Environment& env, const PairTrajectory& pair,
                                 std::array<std::int64_t, 2> origin_times, const std::vector<double>& R_grid);

// Confirmed joint levels followed by censored ones; no empty-result error.
std::vector<JointRegenRecord> scan_joint_levels(const Environment& env, const PairTrajectory& pair,
                                                const std::vector<RegenerationRecord>& recs1,
                                                const std::vector<RegenerationRecord>& recs2,
                                                double confirm_distance);

std::vector<JointRegenRecord> joint_regeneration_levels(const Environment& env, const PairTrajectory& pair,
                                                        double confirm_distance, std::int64_t horizon);

struct IntersectionReport {
  std::int64_t n = 0;
  std::int64_t I_n = 0;
  std::vector<Point> contributing_sites;
  // Some walk has not left the box through 𝓗⁺(n).
  bool censored = false;
};

// Sites z with both walks visiting 𝓥_z, sorted.
std::vector<Point> intersection_sites(const PairTrajectory& pair, int d);
IntersectionReport intersection_count(const Environment& env, const PairTrajectory& pair, double n,
                                      double alpha, bool keep_sites = false);
IntersectionReport intersection_count_from_sites(const Environment& env, const PairTrajectory& pair,
                                                 const std::vector<Point>& sites, double n, double alpha);
// O(|path1| |path2|) reference count.
std::int64_t intersection_count_bruteforce(const Environment& env, const PairTrajectory& pair, double n,
                                           double alpha);

// JRL≤(n, ε) as 1-based indices into the confirmed joint records.
std::vector<std::size_t> close_jrl_set(const std::vector<JointRegenRecord>& records, double n, double epsilon);

// Unit vector u⃗: component of e2 orthogonal to v̂_0, normalised.
Vec orthogonal_direction(const Vec& v_hat, int d);

bool separation_event(const Environment& env, const PairTrajectory& pair, double n, const Vec& u);
bool separation_event_bruteforce(const Environment& env, const PairTrajectory& pair, double n, const Vec& u);

struct OffsetSeries {
  std::vector<double> values;  // O_0, O_1, ...
  bool truncated = false;
};
OffsetSeries orthogonal_offsets(const Point& start1, const std::vector<RegenerationRecord>& records1,
                                const Point& start2, const std::vector<RegenerationRecord>& records2,
                                const Vec& u, int d);

// Largest base conductance among edges first hit in [τ_i, τ_{i+1}),
// i = 0..m-1 with τ_0 = 0 and m the number of confirmed records.
struct TrapProfile {
  std::vector<double> max_conductance;
  std::vector<std::int64_t> durations;  // τ_{i+1} − τ_i
};
TrapProfile trap_profile(const Environment& env, const Trajectory& etraj,
                         const std::vector<RegenerationRecord>& records);

struct LargeTrapFlags {
  std::vector<bool> flags;  // LT_i(t), i = 0..m-1 (i = 0 is LT(t))
  std::vector<std::size_t> small;  // L_small(n)
  bool truncated = false;          // fewer than n complete intervals
};
LargeTrapFlags large_trap_flags(const Environment& env, const Trajectory& etraj,
                                const std::vector<RegenerationRecord>& records, double t,
                                std::size_t n = 0);

struct CrossingSets {
  std::vector<std::size_t> J1;
  std::vector<std::size_t> J2;
};
// Needs n + 1 confirmed records per walk.
CrossingSets crossing_index_sets(const PairTrajectory& pair, const std::vector<RegenerationRecord>& records1,
                                 const std::vector<RegenerationRecord>& records2, std::size_t n);

}  // namespace rwrc
