#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/regeneration.hpp"
#include "rwrc/stats.hpp"
#include "rwrc/walk.hpp"

using namespace rwrc;
using namespace rwrc::test;

TEST_CASE("enhanced kernel with K = 1 has no defect") {
  const Environment env(make_cfg(0.5, 0.5, 1.0), fill(1.0));
  const auto et = enhanced_transition(env, pt(0, 0));
  const auto p = transition_distribution(env, pt(0, 0));
  for (int j = 0; j < 4; ++j) {
    CHECK(et.k_channel[j] == doctest::Approx(p[j]).epsilon(1e-15));
    CHECK(et.defect[j] == doctest::Approx(0.0));
  }
  RngStream rng(1, 2);
  const Trajectory t = simulate_enhanced(env, pt(0, 0), rng, 500);
  for (auto b : t.dense_bits()) CHECK(b == 1);
}

TEST_CASE("enhanced kernel splits the plain kernel") {
  for (ChannelMode mode : {ChannelMode::Clamped, ChannelMode::Printed}) {
    EnvConfig cfg = make_cfg(0.4, 0.6, 10.0, 14);
    cfg.channel = mode;
    const Environment env(cfg);
    RngStream rng(4, 4);
    for (int i = 0; i < 5000; ++i) {
      const Point x = pt(static_cast<int>(rng.below(400)) - 200, static_cast<int>(rng.below(400)) - 200);
      const auto et = enhanced_transition(env, x);
      const auto p = transition_distribution(env, x);
      double mass = 0.0, total = 0.0;
      for (int j = 0; j < 4; ++j) {
        CHECK(et.k_channel[j] <= p[j]);
        CHECK(et.defect[j] >= 0.0);
        mass += et.k_channel[j];
        total += et.k_channel[j] + et.defect[j];
      }
      CHECK(mass <= 1.0 + 1e-12);
      CHECK(std::fabs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("printed K-channel at a K-open point ignores the conductances") {
  EnvConfig cfg = make_cfg(0.5, 0.5, 10.0, 1);
  cfg.channel = ChannelMode::Printed;
  auto a = fill(1.0);
  auto b = std::make_shared<ConductanceOverrides>();
  const double va[4] = {1.0, 2.5, 9.0, 0.2};
  const double vb[4] = {7.0, 0.5, 1.0, 10.0};
  for (int j = 0; j < 4; ++j) {
    a->edges[canonical_edge(pt(0), neighbor(pt(0), 2, j))] = va[j];
    b->edges[canonical_edge(pt(0), neighbor(pt(0), 2, j))] = vb[j];
  }
  const Environment ea(cfg, a);
  EnvConfig other = cfg;
  other.seed = 999;
  const Environment eb(other, b);
  REQUIRE(ea.is_k_open(pt(0)));
  REQUIRE(eb.is_k_open(pt(0)));
  const auto ka = enhanced_transition(ea, pt(0)).k_channel;
  const auto kb = enhanced_transition(eb, pt(0)).k_channel;
  for (int j = 0; j < 4; ++j) CHECK(ka[j] == doctest::Approx(kb[j]).epsilon(1e-14));
}

TEST_CASE("bit frequency equals the K-channel mass") {
  const Environment env(make_cfg(0.5, 0.5, 3.0, 6));
  RngStream rng(8, 1);
  const Trajectory t = simulate_enhanced(env, pt(0, 0), rng, 200000);
  const auto pos = t.dense();
  const auto bits = t.dense_bits();
  double expected = 0.0, var = 0.0, observed = 0.0;
  for (std::size_t n = 1; n < pos.size(); ++n) {
    double m = 0.0;
    for (double v : enhanced_transition(env, pos[n - 1]).k_channel) m += v;
    expected += m;
    var += m * (1 - m);
    observed += bits[n];
  }
  CHECK(std::fabs(observed - expected) < 4.0 * std::sqrt(var));
  CHECK(observed < static_cast<double>(pos.size() - 1));
}

TEST_CASE("enhanced and plain walks coincide under a shared stream") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 3));
  for (int s = 0; s < 20; ++s) {
    RngStream a(5, s), b(5, s);
    CHECK(simulate_path(env, pt(0, 0), a, 2000).dense() == simulate_enhanced(env, pt(0, 0), b, 2000).dense());
  }
}

TEST_CASE("detect_D examples") {
  const Environment env(make_cfg(), fill(1.0));
  const DOutcome back = detect_D(env, path({pt(0), pt(-1)}), 0, 1);
  CHECK(back.finite);
  CHECK(back.value == 1);
  CHECK(back.by_back);
  const DOutcome ori = detect_D(env, path({pt(0), pt(1)}, {1, 0}), 0, 1);
  CHECK(ori.finite);
  CHECK(ori.value == 1);
  CHECK_FALSE(ori.by_back);
  const Trajectory clean = path(straight(pt(0), 10));
  CHECK_FALSE(detect_D(env, clean, 0, 10).finite);
  CHECK_THROWS_AS(detect_D(env, clean, 0, 11), HorizonTooShort);
  const Trajectory side = path({pt(0), pt(0, 1), pt(1, 1), pt(1, 2)}, {1, 1, 1, 1});
  CHECK(detect_D(env, side, 0, 3).finite);
  const Trajectory late = path({pt(0), pt(1), pt(2), pt(3)}, {1, 1, 0, 1});
  const DOutcome l = detect_D(env, late, 0, 3);
  CHECK(l.finite);
  CHECK(l.value == 2);
  CHECK_FALSE(detect_D(env, late, 2, 1).finite);
}

TEST_CASE("regeneration records on a straight path") {
  const Environment env(make_cfg(), fill(1.0));
  const Trajectory t = path(straight(pt(0), 200));
  const auto recs = extract_regenerations(env, t, 10.0, t.duration());
  REQUIRE(confirmed_count(recs) > 10);
  for (std::size_t k = 1; k < recs.size(); ++k) {
    CHECK(recs[k].tau > recs[k - 1].tau);
    CHECK(recs[k].point[0] - recs[k - 1].point[0] >= 2);
  }
  CHECK(recs.back().censored);
  const Trajectory short_path = path(straight(pt(0), 5));
  CHECK_THROWS_AS(extract_regenerations(env, short_path, 10.0, 5), NoRegenerationFound);
}

TEST_CASE("regeneration records along a random walk") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 2));
  RegenerationRunOptions opts;
  opts.wanted = 400;
  const RegenerationRun run = run_until_regenerations(env, pt(0), RngStream(7, 1), opts);
  REQUIRE(run.complete);
  const auto& r = run.records;
  const std::size_t m = confirmed_count(r);
  REQUIRE(m >= 400);
  const Frame frame = Frame::from(env.config());
  std::vector<double> inc;
  for (std::size_t k = 0; k < m; ++k) {
    if (k > 0) {
      CHECK(r[k].tau > r[k - 1].tau);
      CHECK(r[k].level_key - r[k - 1].level_key >= 2);
      inc.push_back(static_cast<double>(r[k].tau - r[k - 1].tau));
    }
    CHECK(r[k].chi >= 1);
    CHECK(env.is_k_open(r[k].point));
    CHECK(r[k].level_key > r[k].prev_max_key);
    const std::int64_t from = k == 0 ? 0 : r[k - 1].tau;
    CHECK(r[k].chi == regeneration_box(frame, run.traj, from, r[k].tau, env.config().alpha));
  }
  std::size_t pairs = 0;
  const double rho = lag1_autocorrelation({inc}, &pairs);
  CHECK(std::fabs(rho) < 1.96 / std::sqrt(static_cast<double>(pairs)));
}

TEST_CASE("raising the confirmation distance only removes candidates") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 12));
  for (int s = 0; s < 5; ++s) {
    WalkOptions wo;
    wo.enhanced = true;
    Walker walker(env, pt(0), RngStream(31, s), wo);
    walker.run(kNoTimeLimit, 3000);
    const Trajectory& t = walker.trajectory();
    const auto f32 = candidate_fates(env, t, 32.0, t.duration());
    const auto f128 = candidate_fates(env, t, 128.0, t.duration());
    REQUIRE(f32.size() == f128.size());
    for (std::size_t i = 0; i < f32.size(); ++i) {
      CHECK(f32[i].time == f128[i].time);
      if (f128[i].status == CandidateStatus::Confirmed) CHECK(f32[i].status == CandidateStatus::Confirmed);
    }
    std::set<std::int64_t> a, b;
    for (const auto& r : scan_regenerations(env, t, 32.0, t.duration()))
      if (!r.censored) a.insert(r.tau);
    for (const auto& r : scan_regenerations(env, t, 128.0, t.duration()))
      if (!r.censored) b.insert(r.tau);
    CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
    CHECK(b.size() < a.size());
  }
}

TEST_CASE("regeneration box examples") {
  const EnvConfig cfg = make_cfg();
  const Frame frame = Frame::from(cfg);
  CHECK(regeneration_box(frame, path({pt(0), pt(1)}), 0, 1, 8.0) == 1);
  CHECK(regeneration_box(frame, path({pt(0), pt(0, 1), pt(0, 2)}), 0, 2, 5.0) == 2);
  CHECK(regeneration_box(frame, path({pt(0), pt(0, 1), pt(0, 2)}), 0, 1, 5.0) == 1);
  CHECK(regeneration_box(frame, path(straight(pt(0), 7)), 2, 7, 8.0) == 5);
}

TEST_CASE("box radii have a decreasing survival curve") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 19));
  RegenerationRunOptions opts;
  opts.wanted = 300;
  const RegenerationRun run = run_until_regenerations(env, pt(0), RngStream(3, 3), opts);
  std::vector<std::int64_t> chi;
  for (std::size_t k = 1; k < confirmed_count(run.records); ++k) chi.push_back(run.records[k].chi);
  auto survival = [&](std::int64_t m) {
    return static_cast<double>(std::count_if(chi.begin(), chi.end(), [&](std::int64_t c) { return c > m; })) /
           chi.size();
  };
  double prev = 1.0;
  for (std::int64_t m : {1, 2, 4, 8, 16, 32, 64}) {
    CHECK(survival(m) <= prev);
    prev = survival(m);
  }
  CHECK(survival(64) < survival(2));
}

TEST_CASE("for_each_position visits the dense path") {
  const Environment env(make_cfg(0.3, 0.5, 10.0, 23));
  WalkOptions wo;
  wo.enhanced = true;
  Walker walker(env, pt(0), RngStream(2, 2), wo);
  walker.run(50000);
  const Trajectory& t = walker.trajectory();
  const auto dense = t.dense();
  for (auto [a, b] : {std::pair<std::int64_t, std::int64_t>{0, 50000}, {100, 20000}, {777, 778}, {5, 4}}) {
    std::set<Point> want, got;
    for (std::int64_t n = a; n <= b; ++n) want.insert(dense[static_cast<std::size_t>(n)]);
    for_each_position(t, a, b, [&](const Point& p) { got.insert(p); });
    CHECK(want == got);
  }
}
