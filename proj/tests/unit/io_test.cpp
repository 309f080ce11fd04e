#include <doctest.h>

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rwrc/regeneration.hpp"
#include "rwrc/trajectory_io.hpp"
#include "rwrc/walk.hpp"

using namespace rwrc;
using namespace rwrc::test;

namespace {

Trajectory accelerated(std::uint64_t seed, std::int64_t steps) {
  static const Environment env(make_cfg(0.3, 0.5, 10.0, 8));
  WalkOptions wo;
  wo.enhanced = true;
  Walker w(env, pt(5, -3), RngStream(seed, 0), wo);
  w.run(steps);
  return w.take();
}

}  // namespace

TEST_CASE("jsonl trajectory round trip") {
  const Trajectory t = accelerated(1, 20000);
  std::stringstream ss;
  write_trajectory_jsonl(ss, t, 2);
  CHECK(read_trajectory_jsonl(ss, 2) == t.dense());
  std::stringstream part;
  write_trajectory_jsonl(part, t, 2, 10);
  const auto head = read_trajectory_jsonl(part, 2);
  CHECK(head.size() == 11);
  std::string first;
  std::istringstream again(part.str());
  std::getline(again, first);
  const auto j = nlohmann::json::parse(first);
  CHECK(j["step"] == 0);
  CHECK(j["x"] == nlohmann::json::array({5, -3}));
}

TEST_CASE("binary trajectory round trip") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Trajectory t = accelerated(seed, 30000);
    std::stringstream ss;
    write_trajectory_binary(ss, t, 2);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "RWTJ");
    CHECK(static_cast<int>(bytes[4]) == 2);
    int d = 0;
    CHECK(read_trajectory_binary(ss, d) == t.dense());
    CHECK(d == 2);
  }
  std::stringstream bad("XXXX");
  int d = 0;
  CHECK_THROWS(read_trajectory_binary(bad, d));
}

TEST_CASE("step expansion matches the dense path") {
  const Trajectory t = accelerated(4, 5000);
  const auto dense = t.dense();
  std::vector<Point> got;
  std::int64_t expect = 0;
  for_each_step(t, 5000, [&](std::int64_t n, const Point& p) {
    CHECK(n == expect++);
    got.push_back(p);
  });
  CHECK(got == dense);
}

TEST_CASE("regeneration jsonl fields") {
  RegenerationRecord a;
  a.tau = 12;
  a.point = pt(4, -1);
  a.chi = 3;
  RegenerationRecord b = a;
  b.tau = 20;
  b.censored = true;
  std::stringstream ss;
  write_regenerations_jsonl(ss, {a, b}, 2);
  std::string line;
  std::getline(ss, line);
  auto j = nlohmann::json::parse(line);
  CHECK(j["k"] == 1);
  CHECK(j["tau"] == 12);
  CHECK(j["point"] == nlohmann::json::array({4, -1}));
  CHECK(j["chi"] == 3);
  CHECK(j["censored"] == false);
  std::getline(ss, line);
  j = nlohmann::json::parse(line);
  CHECK(j["k"] == 2);
  CHECK(j["censored"] == true);
}
