#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "rwrc/environment.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/processes.hpp"

using namespace rwrc;
using namespace rwrc::test;

namespace {

std::vector<RegenerationRecord> linear_records(int count, std::int64_t c, int step) {
  std::vector<RegenerationRecord> r;
  for (int k = 1; k <= count; ++k) {
    RegenerationRecord rec;
    rec.tau = c * k;
    rec.point = pt(step * k, k % 3 - 1);
    rec.level_key = step * k;
    r.push_back(rec);
  }
  return r;
}

}  // namespace

TEST_CASE("clock value at a grid point") {
  const auto recs = linear_records(8, 5, 2);
  const ProcessSample w = build_processes(recs, pt(0), 4, 1.0, 0.5, Vec{2.0, 0.0}, 2);
  CHECK(w.inv_n == doctest::Approx(16.0));
  CHECK(w.S_at(0.5) == doctest::Approx(10.0 / 16.0));
  CHECK(w.S_at(0.0) == 0.0);
  CHECK(w.Y_at(0.0)[0] == 0.0);
  CHECK(w.Y_at(0.5)[0] == doctest::Approx(4.0 / 4.0));
  CHECK(w.Z_at(0.5)[0] == doctest::Approx((4.0 - 2.0 * 4 * 0.5) / 2.0));
  REQUIRE(w.t_grid.size() == 5);
  for (std::size_t i = 1; i < w.S.size(); ++i) CHECK(w.S[i] >= w.S[i - 1]);
}

TEST_CASE("processes need enough records") {
  const auto recs = linear_records(3, 5, 2);
  CHECK_THROWS_AS(build_processes(recs, pt(0), 4, 1.0, 0.5, Vec{}, 2), InsufficientRecords);
  auto censored = linear_records(6, 5, 2);
  censored[3].censored = censored[4].censored = censored[5].censored = true;
  CHECK_THROWS_AS(build_processes(censored, pt(0), 4, 1.0, 0.5, Vec{}, 2), InsufficientRecords);
  const auto w = build_processes(linear_records(4, 5, 2), pt(0), 4, 1.0, 0.5, std::nullopt, 2);
  CHECK(w.v_hat[0] == doctest::Approx(2.0));
}

TEST_CASE("shifted clock of constant increments") {
  const int n = 5;
  const std::int64_t c = 7;
  const auto recs = linear_records(20, c, 1);
  const ProcessSample w = build_processes(recs, pt(0), n, 3.0, 0.5, Vec{1.0, 0.0}, 2);
  const ProcessSample s = shift_process(w);
  const double inv = 25.0;
  CHECK(s.S_at(0.0) == 0.0);
  CHECK(s.Z_at(0.0)[0] == 0.0);
  CHECK(s.Z_at(0.0)[1] == 0.0);
  for (double t : {0.2, 0.5, 1.0, 1.3, 2.6}) {
    CAPTURE(t);
    CHECK(s.S_at(t) == doctest::Approx(c * (std::floor(t * n + 1 + 1e-9) - 1) / inv));
    CHECK(s.S_at(t) == doctest::Approx(w.S_at(t + 1.0 / n) - w.S_at(1.0 / n)));
    CHECK(s.Z_at(t)[1] == doctest::Approx(w.Z_at(t + 1.0 / n)[1] - w.Z_at(1.0 / n)[1]));
    CHECK(s.Z_at(t)[0] == doctest::Approx(w.Z_at(t + 1.0 / n)[0] - w.Z_at(1.0 / n)[0]));
  }
  const ProcessSample ss = shift_process(s);
  for (double t : {0.0, 0.4, 1.2, 2.4}) {
    CAPTURE(t);
    CHECK(ss.S_at(t) == doctest::Approx(w.S_at(t + 2.0 / n) - w.S_at(2.0 / n)));
    CHECK(ss.Z_at(t)[1] == doctest::Approx(w.Z_at(t + 2.0 / n)[1] - w.Z_at(2.0 / n)[1]));
  }
  CHECK(s.t_grid.size() + 1 == w.t_grid.size());
  CHECK_THROWS_AS(s.S_at(3.0), GridTooShort);
}

TEST_CASE("shift needs at least one step") {
  const ProcessSample w = build_processes({}, pt(0), 4, 0.0, 0.5, Vec{}, 2);
  CHECK_THROWS_AS(shift_process(w), GridTooShort);
}

TEST_CASE("process csv layout") {
  const ProcessSample w = build_processes(linear_records(4, 5, 2), pt(0), 4, 1.0, 0.5, Vec{2.0, 0.0}, 2);
  std::ostringstream os;
  write_process_csv(os, w);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,Y1,Y2,Z1,Z2,S");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 5);
}
