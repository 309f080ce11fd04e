#include "rwrc/twowalk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rwrc/errors.hpp"

namespace rwrc {

namespace {

using PointSet = std::unordered_set<Point, PointHash>;

std::size_t skeleton_index_at(const Trajectory& traj, std::int64_t t) {
  const std::size_t i = traj.piece_of(t);
  if (traj.time(i) != t) throw DomainError("origin must be a skeleton arrival time");
  return i;
}

bool box_contains(const Frame& frame, const Point& z, double n, double alpha) {
  const TiltedBox box{Point{}, n, std::pow(n, alpha)};
  return box.contains(frame, z);
}

bool reaches_level(const Environment& env, const Trajectory& traj, double level) {
  for (const Point& x : traj.sites())
    if (env.level(x) > level) return true;
  return false;
}

}  // namespace

PairTrajectory simulate_pair(const Environment& env, const Point& u1, const Point& u2,
                             std::uint64_t master_seed, std::array<std::uint64_t, 2> streams,
                             std::int64_t steps) {
  if (streams[0] == streams[1]) throw ConfigError("the two walks of a pair need distinct rng streams");
  RngStream r1(master_seed, streams[0]);
  RngStream r2(master_seed, streams[1]);
  PairTrajectory p;
  p.walk1 = simulate_enhanced(env, u1, r1, steps);
  p.walk2 = simulate_enhanced(env, u2, r2, steps);
  return p;
}

std::optional<double> JointDOutcome::M() const {
  if (walk[0].M && walk[1].M) return std::min(*walk[0].M, *walk[1].M);
  if (walk[0].M) return walk[0].M;
  return walk[1].M;
}

JointDOutcome detect_joint_D(const Environment& env, const PairTrajectory& pair,
                             std::array<std::int64_t, 2> origin_times, double R) {
  const Trajectory* walks[2] = {&pair.walk1, &pair.walk2};
  std::array<Point, 2> x0;
  std::array<std::size_t, 2> idx;
  for (int i = 0; i < 2; ++i) {
    idx[i] = skeleton_index_at(*walks[i], origin_times[i]);
    x0[i] = walks[i]->site(idx[i]);
  }
  const Point e1 = unit(0);
  const Point below[2] = {x0[0] - e1, x0[1] - e1};
  JointDOutcome out;
  for (int i = 0; i < 2; ++i) {
    const std::int64_t key0 = env.level_key(x0[i]);
    double max_level = env.level(x0[i]);
    bool reached = false;
    JointDWalk& res = out.walk[i];
    walks[i]->for_each_event(idx[i], [&](const StepEvent& ev) {
      const double lev = env.level(ev.to);
      if (lev > R) reached = true;
      max_level = std::max(max_level, lev);
      const bool back = env.level_key(ev.to) <= key0;
      const bool ori = (ev.defect && (l1_distance(ev.from, x0[0]) <= 1 || l1_distance(ev.from, x0[1]) <= 1)) ||
                       l1_distance(ev.to, below[0]) <= 1 || l1_distance(ev.to, below[1]) <= 1;
      if (back || ori) {
        if (!reached) {
          res.finite = true;
          res.value = ev.n - origin_times[i];
        }
        res.M = max_level;
        return false;
      }
      return true;
    });
    res.max_level_seen = max_level;
    if (!res.finite && !reached)
      throw HorizonTooShort("walk " + std::to_string(i + 1) + " ends before entering the half-space above R");
  }
  return out;
}

std::optional<double> estimate_M(const Environment& env, const PairTrajectory& pair,
                                 std::array<std::int64_t, 2> origin_times, const std::vector<double>& R_grid) {
  std::vector<double> grid = R_grid;
  std::sort(grid.begin(), grid.end());
  for (double R : grid) {
    try {
      if (detect_joint_D(env, pair, origin_times, R).finite()) return R;
    } catch (const HorizonTooShort&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<JointRegenRecord> scan_joint_levels(const Environment& env, const PairTrajectory& pair,
                                                const std::vector<RegenerationRecord>& recs1,
                                                const std::vector<RegenerationRecord>& recs2,
                                                double confirm_distance) {
  const double norm = env.ell_norm();
  std::vector<JointRegenRecord> out;
  bool censored_tail = false;
  std::size_t i = 0, j = 0;
  while (i < recs1.size() && j < recs2.size()) {
    const RegenerationRecord& a = recs1[i];
    const RegenerationRecord& b = recs2[j];
    const std::int64_t lo = std::max(a.prev_max_key, b.prev_max_key);
    const std::int64_t hi = std::min(a.level_key, b.level_key);
    if (lo < hi) {
      JointRegenRecord r;
      r.level = static_cast<double>(lo) / norm;
      r.entry_time1 = a.tau;
      r.entry_time2 = b.tau;
      r.point1 = a.point;
      r.point2 = b.point;
      if (censored_tail || a.censored || b.censored) {
        censored_tail = true;
        r.censored = true;
        out.push_back(r);
      } else {
        try {
          const JointDOutcome o = detect_joint_D(env, pair, {a.tau, b.tau}, r.level + confirm_distance);
          if (!o.finite()) out.push_back(r);
        } catch (const HorizonTooShort&) {
          censored_tail = true;
          r.censored = true;
          out.push_back(r);
        }
      }
    }
    if (a.level_key < b.level_key) {
      ++i;
    } else if (b.level_key < a.level_key) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return out;
}

std::vector<JointRegenRecord> joint_regeneration_levels(const Environment& env, const PairTrajectory& pair,
                                                        double confirm_distance, std::int64_t horizon) {
  const auto recs1 = scan_regenerations(env, pair.walk1, confirm_distance, horizon);
  const auto recs2 = scan_regenerations(env, pair.walk2, confirm_distance, horizon);
  auto joint = scan_joint_levels(env, pair, recs1, recs2, confirm_distance);
  std::set<std::int64_t> t1, t2;
  for (const auto& r : recs1) t1.insert(r.tau);
  for (const auto& r : recs2) t2.insert(r.tau);
  std::size_t confirmed = 0;
  for (const auto& r : joint) {
    if (!t1.count(r.entry_time1) || !t2.count(r.entry_time2))
      throw ConsistencyError("joint entry time missing from the per-walk regeneration times");
    confirmed += r.censored ? 0 : 1;
  }
  if (confirmed == 0) throw NoJointLevelFound("no confirmed joint regeneration level");
  return joint;
}

std::vector<Point> intersection_sites(const PairTrajectory& pair, int d) {
  PointSet near1;
  near1.reserve(pair.walk1.skeleton_size() * 2);
  for (const Point& x : pair.walk1.sites()) for_each_vicinity(x, d, [&](const Point& z) { near1.insert(z); });
  PointSet both;
  for (const Point& x : pair.walk2.sites())
    for_each_vicinity(x, d, [&](const Point& z) {
      if (near1.count(z)) both.insert(z);
    });
  std::vector<Point> out(both.begin(), both.end());
  std::sort(out.begin(), out.end());
  return out;
}

IntersectionReport intersection_count_from_sites(const Environment& env, const PairTrajectory& pair,
                                                 const std::vector<Point>& sites, double n, double alpha) {
  const Frame frame = Frame::from(env.config());
  IntersectionReport rep;
  rep.n = static_cast<std::int64_t>(std::llround(n));
  for (const Point& z : sites)
    if (box_contains(frame, z, n, alpha)) ++rep.I_n;
  rep.censored = !reaches_level(env, pair.walk1, n) || !reaches_level(env, pair.walk2, n);
  return rep;
}

IntersectionReport intersection_count(const Environment& env, const PairTrajectory& pair, double n, double alpha,
                                      bool keep_sites) {
  const auto sites = intersection_sites(pair, env.dim());
  IntersectionReport rep = intersection_count_from_sites(env, pair, sites, n, alpha);
  if (keep_sites) {
    const Frame frame = Frame::from(env.config());
    for (const Point& z : sites)
      if (box_contains(frame, z, n, alpha)) rep.contributing_sites.push_back(z);
  }
  return rep;
}

std::int64_t intersection_count_bruteforce(const Environment& env, const PairTrajectory& pair, double n,
                                           double alpha) {
  const int d = env.dim();
  const Frame frame = Frame::from(env.config());
  const auto p1 = pair.walk1.dense();
  const auto p2 = pair.walk2.dense();
  std::set<Point> found;
  for (const Point& a : p1)
    for (const Point& b : p2) {
      if (l1_distance(a, b) > 2) continue;
      for_each_vicinity(a, d, [&](const Point& z) {
        if (l1_distance(z, b) <= 1) found.insert(z);
      });
    }
  std::int64_t count = 0;
  for (const Point& z : found)
    if (box_contains(frame, z, n, alpha)) ++count;
  return count;
}

std::vector<std::size_t> close_jrl_set(const std::vector<JointRegenRecord>& records, double n, double epsilon) {
  std::vector<std::size_t> out;
  const double threshold = std::pow(n, 10.0 * epsilon);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const JointRegenRecord& r = records[k];
    if (r.censored || r.level > n) continue;
    if (norm2(r.point1 - r.point2) <= threshold) out.push_back(k + 1);
  }
  return out;
}

Vec orthogonal_direction(const Vec& v_hat, int d) {
  double nv = 0.0;
  for (int i = 0; i < d; ++i) nv += v_hat[i] * v_hat[i];
  nv = std::sqrt(nv);
  Vec v0{};
  if (nv > 0.0)
    for (int i = 0; i < d; ++i) v0[i] = v_hat[i] / nv;
  else
    v0[0] = 1.0;
  for (int axis : {1, 0}) {
    Vec u{};
    u[axis] = 1.0;
    const double p = v0[axis];
    double nu = 0.0;
    for (int i = 0; i < d; ++i) {
      u[i] -= p * v0[i];
      nu += u[i] * u[i];
    }
    if (nu > 1e-12) {
      nu = std::sqrt(nu);
      for (int i = 0; i < d; ++i) u[i] /= nu;
      return u;
    }
  }
  throw DomainError("cannot build a direction orthogonal to the drift");
}

namespace {

bool levels_related(double l1, double l2, double n) {
  constexpr double eps = 1e-9;
  const double hi = std::max(l1, l2);
  const double lo = std::min(l1, l2);
  return hi - 1.0 <= lo + 1.0 + eps && hi - 1.0 <= n + eps && lo + 1.0 >= -eps;
}

double offset(const Point& x, const Vec& u) { return dot(x, u); }

}  // namespace

bool separation_event(const Environment& env, const PairTrajectory& pair, double n, const Vec& u) {
  const double norm = env.ell_norm();
  auto in_range = [&](const Point& x) {
    const double l = env.level(x);
    return l >= -1.0 - 1e-9 && l <= n + 1.0 + 1e-9;
  };
  PointSet seen1;
  for (const Point& x : pair.walk1.sites())
    if (in_range(x)) seen1.insert(x);
  std::unordered_map<std::int64_t, std::vector<double>> buckets;
  PointSet seen2;
  for (const Point& x : pair.walk2.sites())
    if (in_range(x) && seen2.insert(x).second) buckets[env.level_key(x)].push_back(offset(x, u));
  for (auto& [k, v] : buckets) std::sort(v.begin(), v.end());
  const auto span = static_cast<std::int64_t>(std::floor(2.0 * norm + 1e-9));
  for (const Point& x : seen1) {
    const std::int64_t k1 = env.level_key(x);
    const double l1 = env.level(x);
    const double o1 = offset(x, u);
    for (std::int64_t k2 = k1 - span; k2 <= k1 + span; ++k2) {
      const auto it = buckets.find(k2);
      if (it == buckets.end()) continue;
      if (!levels_related(l1, static_cast<double>(k2) / norm, n)) continue;
      const auto& v = it->second;
      const auto pos = std::lower_bound(v.begin(), v.end(), o1);
      if (pos != v.end() && std::fabs(*pos - o1) < 3.0 - 1e-9) return false;
      if (pos != v.begin() && std::fabs(*(pos - 1) - o1) < 3.0 - 1e-9) return false;
    }
  }
  return true;
}

bool separation_event_bruteforce(const Environment& env, const PairTrajectory& pair, double n, const Vec& u) {
  const auto p1 = pair.walk1.dense();
  const auto p2 = pair.walk2.dense();
  for (const Point& a : p1)
    for (const Point& b : p2)
      if (levels_related(env.level(a), env.level(b), n) && std::fabs(dot(a - b, u)) < 3.0 - 1e-9) return false;
  return true;
}

OffsetSeries orthogonal_offsets(const Point& start1, const std::vector<RegenerationRecord>& records1,
                                const Point& start2, const std::vector<RegenerationRecord>& records2,
                                const Vec& u, int d) {
  (void)d;
  OffsetSeries s;
  s.values.push_back(dot(start1 - start2, u));
  const std::size_t m1 = confirmed_count(records1);
  const std::size_t m2 = confirmed_count(records2);
  const std::size_t m = std::min(m1, m2);
  for (std::size_t j = 0; j < m; ++j) s.values.push_back(dot(records1[j].point - records2[j].point, u));
  s.truncated = m1 != m2;
  return s;
}

TrapProfile trap_profile(const Environment& env, const Trajectory& etraj,
                         const std::vector<RegenerationRecord>& records) {
  const int d = env.dim();
  const std::size_t m = confirmed_count(records);
  TrapProfile prof;
  prof.max_conductance.assign(m, 0.0);
  std::vector<std::int64_t> tau{0};
  for (std::size_t k = 0; k < m; ++k) tau.push_back(records[k].tau);
  for (std::size_t i = 0; i < m; ++i) prof.durations.push_back(tau[i + 1] - tau[i]);
  if (m == 0) return prof;
  PointSet visited;
  std::size_t interval = 0;
  double c[2 * kMaxDim];
  for (std::size_t s = 0; s < etraj.skeleton_size(); ++s) {
    const std::int64_t t = etraj.time(s);
    while (interval < m && t >= tau[interval + 1]) ++interval;
    if (interval >= m) break;
    const Point& x = etraj.site(s);
    if (!visited.insert(x).second) continue;
    env.incident_base(x, c);
    for (int j = 0; j < 2 * d; ++j)
      if (!visited.count(neighbor(x, d, j))) prof.max_conductance[interval] = std::max(prof.max_conductance[interval], c[j]);
  }
  return prof;
}

LargeTrapFlags large_trap_flags(const Environment& env, const Trajectory& etraj,
                                const std::vector<RegenerationRecord>& records, double t, std::size_t n) {
  const TrapProfile prof = trap_profile(env, etraj, records);
  LargeTrapFlags out;
  for (double c : prof.max_conductance) out.flags.push_back(c >= t);
  if (n > 0) {
    const double tn = std::pow(static_cast<double>(n), 3.0 / (4.0 * env.config().gamma));
    const std::size_t avail = prof.max_conductance.empty() ? 0 : prof.max_conductance.size() - 1;
    out.truncated = avail < n;
    for (std::size_t j = 1; j <= std::min(n, avail); ++j)
      if (prof.max_conductance[j] < tn) out.small.push_back(j);
  }
  return out;
}

CrossingSets crossing_index_sets(const PairTrajectory& pair, const std::vector<RegenerationRecord>& records1,
                                 const std::vector<RegenerationRecord>& records2, std::size_t n) {
  if (confirmed_count(records1) < n + 1 || confirmed_count(records2) < n + 1)
    throw InsufficientRecords("crossing sets need n + 1 confirmed records per walk");
  auto one_side = [n](const Trajectory& a, const std::vector<RegenerationRecord>& ra, const Trajectory& b,
                      const std::vector<RegenerationRecord>& rb) {
    PointSet path_b;
    for_each_position(b, 0, rb[n - 1].tau, [&](const Point& x) { path_b.insert(x); });
    std::vector<std::size_t> J;
    for (std::size_t j = 1; j <= n; ++j) {
      bool hit = false;
      for_each_position(a, ra[j - 1].tau, ra[j].tau - 1, [&](const Point& x) { hit = hit || path_b.count(x) > 0; });
      if (hit) J.push_back(j);
    }
    return J;
  };
  CrossingSets cs;
  cs.J1 = one_side(pair.walk1, records1, pair.walk2, records2);
  cs.J2 = one_side(pair.walk2, records2, pair.walk1, records1);
  return cs;
}

}  // namespace rwrc
