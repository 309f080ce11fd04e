#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/regeneration.hpp"
#include "rwrc/stats.hpp"
#include "rwrc/twowalk.hpp"

using namespace rwrc;
using namespace rwrc::test;

namespace {

PairTrajectory make_pair(Trajectory a, Trajectory b) {
  PairTrajectory p;
  p.walk1 = std::move(a);
  p.walk2 = std::move(b);
  return p;
}

PairTrajectory swapped(const PairTrajectory& p) { return make_pair(p.walk2, p.walk1); }

PairTrajectory random_pair(const Environment& env, int i, std::int64_t steps, const Point& u2 = Point{}) {
  return simulate_pair(env, Point{}, u2, 1234, {2ull * i, 2ull * i + 1}, steps);
}

RegenerationRecord rec(std::int64_t tau, const Point& p) {
  RegenerationRecord r;
  r.tau = tau;
  r.point = p;
  r.level_key = p[0];
  return r;
}

}  // namespace

TEST_CASE("pair simulation preconditions") {
  const Environment env(make_cfg());
  CHECK_THROWS_AS(simulate_pair(env, pt(0), pt(0), 1, {3, 3}, 10), ConfigError);
  const PairTrajectory p = simulate_pair(env, pt(0), pt(0, 4), 1, {3, 4}, 0);
  CHECK(p.walk1.dense() == std::vector<Point>{pt(0)});
  CHECK(p.walk2.dense() == std::vector<Point>{pt(0, 4)});
}

TEST_CASE("pair marginals equal single-walk laws") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 71));
  std::vector<double> paired, single;
  for (int i = 0; i < 2000; ++i) {
    paired.push_back(random_pair(env, i, 100).walk1.at(100)[0]);
    RngStream rng(555, i);
    single.push_back(simulate_enhanced(env, pt(0), rng, 100).at(100)[0]);
  }
  CHECK(ks_distance(paired, single) < ks_critical_value(paired.size(), single.size()));
}

TEST_CASE("joint D examples") {
  const Environment env(make_cfg(), fill(1.0));
  const Trajectory far = path(straight(pt(0, 10), 20));
  const auto pair = make_pair(path({pt(0), pt(-1), pt(0)}), far);
  const JointDOutcome o = detect_joint_D(env, pair, {0, 0}, 5.0);
  CHECK(o.walk[0].finite);
  CHECK(o.walk[0].value == 1);
  CHECK_FALSE(o.walk[1].finite);
  CHECK(o.finite());

  const auto mono = make_pair(path(straight(pt(0), 20)), far);
  const JointDOutcome m = detect_joint_D(env, mono, {0, 0}, 5.0);
  CHECK_FALSE(m.finite());
  CHECK_FALSE(m.M().has_value());

  const auto into = make_pair(path(straight(pt(0), 20)), path(straight(pt(-3, 1), 20)));
  const JointDOutcome in = detect_joint_D(env, into, {0, 0}, 5.0);
  CHECK(in.walk[1].finite);
  CHECK(in.walk[1].value == 2);

  const auto short_pair = make_pair(path(straight(pt(0), 3)), far);
  CHECK_THROWS_AS(detect_joint_D(env, short_pair, {0, 0}, 5.0), HorizonTooShort);
}

TEST_CASE("M agrees with the truncated joint event") {
  const Environment env(make_cfg(0.5, 0.7, 3.0, 81));
  const std::vector<double> grid{1, 2, 4, 8, 16};
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    const PairTrajectory p = random_pair(env, i, 4000, pt(0, 2));
    const auto M = estimate_M(env, p, {0, 0}, grid);
    for (double R : grid) {
      try {
        const bool finite = detect_joint_D(env, p, {0, 0}, R).finite();
        CHECK(finite == (M.has_value() && *M <= R));
        ++checked;
      } catch (const HorizonTooShort&) {
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("joint levels are per-walk regeneration levels") {
  const Environment env(make_cfg(0.8, 1.0, 10.0, 5));
  std::size_t found = 0;
  for (int i = 0; i < 20; ++i) {
    const PairTrajectory p = random_pair(env, i, 20000);
    const auto r1 = scan_regenerations(env, p.walk1, 16.0, p.walk1.duration());
    const auto r2 = scan_regenerations(env, p.walk2, 16.0, p.walk2.duration());
    const auto joint = scan_joint_levels(env, p, r1, r2, 16.0);
    std::set<std::int64_t> t1, t2;
    for (const auto& r : r1) t1.insert(r.tau);
    for (const auto& r : r2) t2.insert(r.tau);
    for (std::size_t k = 0; k < joint.size(); ++k) {
      CHECK(t1.count(joint[k].entry_time1));
      CHECK(t2.count(joint[k].entry_time2));
      if (k > 0) CHECK(joint[k].level > joint[k - 1].level);
      CHECK(env.level(joint[k].point1) > joint[k].level);
      CHECK(env.level(joint[k].point2) > joint[k].level);
      found += !joint[k].censored;
    }
  }
  CHECK(found > 0);
}

TEST_CASE("intersection count examples") {
  const Environment env(make_cfg(), fill(1.0));
  const Trajectory line = path({pt(0), pt(1), pt(2)});
  const auto same = make_pair(line, line);
  CHECK(intersection_count(env, same, 100.0, 8.0).I_n == 11);
  CHECK(intersection_count_bruteforce(env, same, 100.0, 8.0) == 11);
  const auto apart = make_pair(line, path({pt(0, 3), pt(1, 3), pt(2, 3)}));
  CHECK(intersection_count(env, apart, 100.0, 8.0).I_n == 0);
  const auto touching = make_pair(line, path({pt(0, 2), pt(1, 2)}));
  const auto rep = intersection_count(env, touching, 100.0, 8.0, true);
  CHECK(rep.I_n == 2);
  CHECK(rep.contributing_sites == std::vector<Point>{pt(0, 1), pt(1, 1)});
}

TEST_CASE("fast intersection counting equals the brute-force count") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 91));
  for (int i = 0; i < 50; ++i) {
    const PairTrajectory p = random_pair(env, i, 200 + 16 * i, pt(0, i % 5));
    for (double n : {4.0, 16.0, 64.0}) {
      const auto fast = intersection_count(env, p, n, 2.0);
      CHECK(fast.I_n == intersection_count_bruteforce(env, p, n, 2.0));
      CHECK(fast.I_n == intersection_count(env, swapped(p), n, 2.0).I_n);
    }
    std::int64_t prev = 0;
    for (double n = 1; n <= 64; n *= 2) {
      const auto c = intersection_count(env, p, n, 8.0).I_n;
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("close joint levels") {
  std::vector<JointRegenRecord> recs(4);
  const double levels[4] = {2, 5, 9, 14};
  const Point offs[4] = {pt(0, 0), pt(0, 3), pt(0, 1), pt(0, 0)};
  for (int k = 0; k < 4; ++k) {
    recs[k].level = levels[k];
    recs[k].point1 = pt(static_cast<int>(levels[k]) + 1, 0);
    recs[k].point2 = recs[k].point1 + offs[k];
  }
  CHECK(close_jrl_set(recs, 10.0, 1.0) == std::vector<std::size_t>{1, 2, 3});
  CHECK(close_jrl_set(recs, 10.0, 1e-9) == std::vector<std::size_t>{1, 3});
  CHECK(close_jrl_set(recs, 20.0, 1e-9) == std::vector<std::size_t>{1, 3, 4});
  recs[0].censored = true;
  CHECK(close_jrl_set(recs, 10.0, 1.0) == std::vector<std::size_t>{2, 3});
}

TEST_CASE("separation examples") {
  const Environment env(make_cfg(), fill(1.0));
  const Vec u{0.0, 1.0};
  const auto apart = make_pair(path(straight(pt(0), 12)), path(straight(pt(0, 10), 12)));
  CHECK(separation_event(env, apart, 10.0, u));
  CHECK(separation_event_bruteforce(env, apart, 10.0, u));
  const Trajectory line = path(straight(pt(0), 12));
  CHECK_FALSE(separation_event(env, make_pair(line, line), 10.0, u));
  const auto close = make_pair(path(straight(pt(0), 12)), path(straight(pt(0, 2), 12)));
  CHECK_FALSE(separation_event(env, close, 10.0, u));
}

TEST_CASE("separation agrees with the brute-force check") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 93));
  const Vec u = orthogonal_direction(Vec{1.0, 0.1}, 2);
  int separated = 0;
  for (int i = 0; i < 50; ++i) {
    const PairTrajectory p = random_pair(env, i, 600, pt(0, 2 + i % 7));
    for (double n : {3.0, 10.0, 30.0}) {
      const bool fast = separation_event(env, p, n, u);
      CHECK(fast == separation_event_bruteforce(env, p, n, u));
      CHECK(fast == separation_event(env, swapped(p), n, u));
      separated += fast;
    }
  }
  CHECK(separated > 0);
  CHECK(separated < 150);
}

TEST_CASE("orthogonal direction and offsets") {
  const Vec u = orthogonal_direction(Vec{2.0, 0.0}, 2);
  CHECK(u[0] == doctest::Approx(0.0));
  CHECK(u[1] == doctest::Approx(1.0));
  const Vec w = orthogonal_direction(Vec{1.0, 1.0}, 2);
  CHECK(w[0] + w[1] == doctest::Approx(0.0));
  CHECK(w[0] * w[0] + w[1] * w[1] == doctest::Approx(1.0));

  std::vector<RegenerationRecord> a{rec(3, pt(2, 1)), rec(8, pt(5, -1)), rec(9, pt(7, 0))};
  auto same = orthogonal_offsets(pt(0), a, pt(0), a, u, 2);
  CHECK(same.values == std::vector<double>{0, 0, 0, 0});
  CHECK_FALSE(same.truncated);
  std::vector<RegenerationRecord> b;
  for (const auto& r : a) b.push_back(rec(r.tau, r.point - pt(0, 3)));
  auto off = orthogonal_offsets(pt(0), a, pt(0, -3), b, u, 2);
  for (double v : off.values) CHECK(v == doctest::Approx(3.0));
  b.pop_back();
  off = orthogonal_offsets(pt(0), a, pt(0, -3), b, u, 2);
  CHECK(off.values.size() == 3);
  CHECK(off.truncated);
}

TEST_CASE("large trap flags") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 41));
  RegenerationRunOptions opts;
  opts.wanted = 400;
  const RegenerationRun run = run_until_regenerations(env, pt(0), RngStream(4, 1), opts);
  REQUIRE(run.complete);
  const std::size_t m = confirmed_count(run.records);
  const auto all = large_trap_flags(env, run.traj, run.records, 0.5);
  CHECK(all.flags.size() == m);
  CHECK(std::all_of(all.flags.begin(), all.flags.end(), [](bool f) { return f; }));
  const TrapProfile prof = trap_profile(env, run.traj, run.records);
  const double top = *std::max_element(prof.max_conductance.begin(), prof.max_conductance.end());
  const auto none = large_trap_flags(env, run.traj, run.records, top * 1.01);
  CHECK(std::none_of(none.flags.begin(), none.flags.end(), [](bool f) { return f; }));

  const auto some = large_trap_flags(env, run.traj, run.records, 200.0);
  std::vector<double> flagged, plain;
  for (std::size_t i = 0; i < m; ++i)
    (some.flags[i] ? flagged : plain).push_back(static_cast<double>(prof.durations[i]));
  REQUIRE(flagged.size() >= 10);
  CHECK(mann_whitney_greater(flagged, plain).p_value < 0.05);

  const auto small = large_trap_flags(env, run.traj, run.records, 1.0, 100);
  CHECK_FALSE(small.truncated);
  const double tn = std::pow(100.0, 3.0 / (4.0 * 0.5));
  for (std::size_t j : small.small) CHECK(prof.max_conductance[j] < tn);
  CHECK(small.small.size() <= 100);
}

TEST_CASE("crossing index sets") {
  const Environment env(make_cfg(), fill(1.0));
  const Trajectory line = path(straight(pt(0), 60));
  const auto recs = extract_regenerations(env, line, 8.0, line.duration());
  REQUIRE(confirmed_count(recs) >= 6);
  const auto same = crossing_index_sets(make_pair(line, line), recs, recs, 5);
  CHECK(same.J1 == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(same.J2 == same.J1);

  const Trajectory other = path(straight(pt(0, 5), 60));
  std::vector<RegenerationRecord> recs2;
  for (const auto& r : recs) recs2.push_back(rec(r.tau, r.point + pt(0, 5)));
  const auto apart = crossing_index_sets(make_pair(line, other), recs, recs2, 5);
  CHECK(apart.J1.empty());
  CHECK(apart.J2.empty());
  CHECK_THROWS_AS(crossing_index_sets(make_pair(line, line), recs, recs, confirmed_count(recs)), InsufficientRecords);
}

TEST_CASE("crossing sets are bounded by intersections and swap under relabelling") {
  const Environment env(make_cfg(0.8, 1.0, 10.0, 33));
  int tested = 0;
  for (int i = 0; i < 100; ++i) {
    const PairTrajectory p = random_pair(env, i, 3000, pt(0, i % 4));
    const auto r1 = scan_regenerations(env, p.walk1, 8.0, p.walk1.duration());
    const auto r2 = scan_regenerations(env, p.walk2, 8.0, p.walk2.duration());
    const std::size_t n = std::min(confirmed_count(r1), confirmed_count(r2));
    if (n < 3) continue;
    const auto cs = crossing_index_sets(p, r1, r2, n - 1);
    const auto sw = crossing_index_sets(swapped(p), r2, r1, n - 1);
    CHECK(cs.J1 == sw.J2);
    CHECK(cs.J2 == sw.J1);
    const auto sites = intersection_sites(p, 2);
    CHECK(cs.J1.size() <= sites.size());
    CHECK(cs.J2.size() <= sites.size());
    ++tested;
  }
  CHECK(tested > 50);
}
