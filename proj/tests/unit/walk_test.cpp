#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/regeneration.hpp"
#include "rwrc/stats.hpp"
#include "rwrc/walk.hpp"

using namespace rwrc;
using namespace rwrc::test;

namespace {

double pi_of(const Environment& env, const Point& x) {
  double s = 0.0;
  for (int j = 0; j < 2 * env.dim(); ++j) s += env.biased(canonical_edge(x, neighbor(x, env.dim(), j)));
  return s;
}

Point random_site(RngStream& rng, int range) {
  return pt(static_cast<int>(rng.below(2 * range)) - range, static_cast<int>(rng.below(2 * range)) - range);
}

}  // namespace

TEST_CASE("biased origin with unit conductances") {
  const Environment env(make_cfg(0.5, std::log(2.0)), fill(1.0));
  const auto p = transition_distribution(env, pt(0, 0));
  REQUIRE(p.size() == 4);
  CHECK(p[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(p[3] == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("zero bias gives the uniform kernel") {
  EnvConfig cfg = make_cfg(0.5, 0.0);
  for (int d : {2, 3}) {
    cfg.d = d;
    cfg.alpha = d + 4.0;
    const Environment env(cfg, fill(1.0));
    for (double v : transition_distribution(env, pt(3, -2))) CHECK(v == doctest::Approx(1.0 / (2 * d)).epsilon(1e-15));
  }
}

TEST_CASE("transition laws are normalised, positive and reproducible") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 42));
  RngStream rng(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const Point x = random_site(rng, 3000);
    const auto p = transition_distribution(env, x);
    double s = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      s += v;
    }
    CHECK(std::fabs(s - 1.0) < 1e-12);
    CHECK(p == transition_distribution(env, x));
  }
}

TEST_CASE("detailed balance") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 8));
  RngStream rng(2, 1);
  for (int i = 0; i < 2000; ++i) {
    const Point x = random_site(rng, 40);
    const int dir = static_cast<int>(rng.below(4));
    const Point y = neighbor(x, 2, dir);
    const double c = env.biased(canonical_edge(x, y));
    const double lhs = pi_of(env, x) * transition_distribution(env, x)[dir];
    const double rhs = pi_of(env, y) * transition_distribution(env, y)[opposite_dir(dir, 2)];
    CHECK(lhs == doctest::Approx(c).epsilon(1e-12));
    CHECK(rhs == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("simulate_path basics") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 4));
  RngStream a(9, 3), b(9, 3);
  const Trajectory zero = simulate_path(env, pt(2, 1), a, 0);
  CHECK(zero.duration() == 0);
  CHECK(zero.dense() == std::vector<Point>{pt(2, 1)});
  RngStream c(9, 4), e(9, 4);
  const auto p1 = simulate_path(env, pt(0, 0), c, 500).dense();
  const auto p2 = simulate_path(env, pt(0, 0), e, 500).dense();
  CHECK(p1 == p2);
  REQUIRE(p1.size() == 501);
  for (std::size_t i = 1; i < p1.size(); ++i) CHECK(l1_distance(p1[i - 1], p1[i]) == 1);
  CHECK_THROWS_AS(simulate_path(env, pt(0, 0), b, -1), DomainError);
}

TEST_CASE("walks drift along the bias") {
  const Environment env(make_cfg(0.5, 0.5, 10.0, 11));
  double sum = 0.0;
  int behind = 0;
  const int walks = 10000;
  for (int w = 0; w < walks; ++w) {
    RngStream rng(17, w);
    Walker walker(env, pt(0, 0), rng, WalkOptions{});
    walker.run(1000);
    const Point end = walker.trajectory().at(1000);
    sum += end[0];
    behind += end[0] <= 0;
  }
  CHECK(sum / walks > 0.0);
  CHECK(static_cast<double>(behind) / walks < 0.05);
}

TEST_CASE("hitting and exit times") {
  const EnvConfig cfg = make_cfg();
  const Environment env(cfg, fill(1.0));
  const Trajectory t = path({pt(0), pt(1), pt(2)});
  CHECK(hitting_time(t, [](const Point& x) { return x[0] >= 2; }) == 2);
  CHECK(!hitting_time(t, [](const Point& x) { return x[0] >= 3; }).has_value());
  CHECK(hitting_time(t, [](const Point& x) { return x[0] == 0; }) == 0);
  CHECK(!hitting_time(t, [](const Point& x) { return x[0] == 0; }, true).has_value());
  const Trajectory back = path({pt(0), pt(1), pt(0)});
  CHECK(hitting_time(back, [](const Point& x) { return x[0] == 0; }, true) == 2);
  CHECK(level_hitting_time(t, env, 1.0) == 2);
  CHECK(level_hitting_time(t, env, 0.5) == 1);
  const Frame frame = Frame::from(cfg);
  CHECK(exit_time(t, frame, TiltedBox{pt(0), 1.0, 1.0}) == 2);
  CHECK(!exit_time(t, frame, TiltedBox{pt(0), 2.0, 1.0}).has_value());
}

TEST_CASE("tilted box membership") {
  EnvConfig cfg = make_cfg();
  const Frame frame = Frame::from(cfg);
  const TiltedBox box{pt(1, 1), 2.0, 3.0};
  CHECK(box.contains(frame, pt(3, 4)));
  CHECK_FALSE(box.contains(frame, pt(4, 1)));
  CHECK_FALSE(box.contains(frame, pt(1, 5)));
  cfg.ell_dir = pt(1, 1);
  const Frame diag = Frame::from(cfg);
  CHECK(diag.along(pt(1, 1)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diag.across(pt(1, 1)) == doctest::Approx(0.0));
  CHECK(diag.across(pt(1, -1)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("trap acceleration preserves the hitting time law") {
  EnvConfig cfg = make_cfg(0.5, 0.5, 3.0, 5);
  auto o = std::make_shared<ConductanceOverrides>();
  o->edges[canonical_edge(pt(2, 0), pt(3, 0))] = 400.0;
  o->edges[canonical_edge(pt(4, 1), pt(4, 0))] = 900.0;
  o->edges[canonical_edge(pt(6, 0), pt(7, 0))] = 50.0;
  o->fill = 1.5;
  const Environment env(cfg, o);
  std::vector<double> fast, slow, dfast, dslow;
  for (int w = 0; w < 3000; ++w) {
    for (bool acc : {true, false}) {
      WalkOptions opts;
      opts.enhanced = true;
      opts.accelerate = acc;
      Walker walker(env, pt(0, 0), RngStream(acc ? 1 : 2, w), opts);
      walker.run(kNoTimeLimit, 10);
      const Trajectory& t = walker.trajectory();
      (acc ? fast : slow).push_back(static_cast<double>(t.duration()));
      const DOutcome D = detect_D(env, t, 0, t.duration());
      (acc ? dfast : dslow).push_back(D.finite ? static_cast<double>(D.value) : -1.0);
    }
  }
  CHECK(ks_distance(fast, slow) < ks_critical_value(fast.size(), slow.size(), 0.01));
  CHECK(ks_distance(dfast, dslow) < ks_critical_value(dfast.size(), dslow.size(), 0.01));
}

TEST_CASE("accelerated trajectories are consistent") {
  const Environment env(make_cfg(0.3, 0.5, 10.0, 21));
  WalkOptions opts;
  opts.enhanced = true;
  Walker walker(env, pt(0, 0), RngStream(5, 5), opts);
  walker.run(200000);
  const Trajectory& t = walker.trajectory();
  CHECK(t.duration() == 200000);
  const auto dense = t.dense();
  REQUIRE(dense.size() == 200001);
  for (std::size_t i = 1; i < dense.size(); ++i) REQUIRE(l1_distance(dense[i - 1], dense[i]) == 1);
  for (std::int64_t n : {0, 1, 777, 123456, 200000}) CHECK(t.at(n) == dense[static_cast<std::size_t>(n)]);
  CHECK(!t.bounces().empty());
}
