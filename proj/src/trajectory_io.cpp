#include "rwrc/trajectory_io.hpp"

#include <array>
#include <json.hpp>
#include <string>

#include "rwrc/errors.hpp"

namespace rwrc {

namespace {

using nlohmann::json;

json coords(const Point& p, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(p[i]);
  return a;
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t get_varint(std::istream& is) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw Error("truncated trajectory file");
    v |= static_cast<std::uint64_t>(c & 0x7f) << shift;
    if (!(c & 0x80)) return v;
  }
  throw Error("malformed varint in trajectory file");
}

}  // namespace

void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj, int d, std::int64_t max_step) {
  for_each_step(traj, max_step, [&](std::int64_t n, const Point& x) {
    os << json{{"step", n}, {"x", coords(x, d)}}.dump() << '\n';
  });
}

std::vector<Point> read_trajectory_jsonl(std::istream& is, int d) {
  std::vector<Point> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const auto& x = j.at("x");
    if (static_cast<int>(x.size()) != d) throw Error("trajectory record has the wrong dimension");
    Point p;
    for (int i = 0; i < d; ++i) p[i] = x[static_cast<std::size_t>(i)].get<std::int32_t>();
    out.push_back(p);
  }
  return out;
}

void write_trajectory_binary(std::ostream& os, const Trajectory& traj, int d, std::int64_t max_step) {
  std::string body;
  std::uint64_t count = 0;
  Point prev;
  for_each_step(traj, max_step, [&](std::int64_t, const Point& x) {
    for (int i = 0; i < d; ++i) put_varint(body, zigzag(static_cast<std::int64_t>(x[i]) - prev[i]));
    prev = x;
    ++count;
  });
  std::string head = "RWTJ";
  head.push_back(static_cast<char>(d));
  put_varint(head, count);
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
}

std::vector<Point> read_trajectory_binary(std::istream& is, int& d) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || std::string(magic.data(), 4) != "RWTJ") throw Error("not an RWTJ file");
  d = is.get();
  if (d < 1 || d > kMaxDim) throw Error("bad dimension in trajectory file");
  const std::uint64_t count = get_varint(is);
  std::vector<Point> out;
  Point cur;
  for (std::uint64_t k = 0; k < count; ++k) {
    for (int i = 0; i < d; ++i) cur[i] = static_cast<std::int32_t>(cur[i] + unzigzag(get_varint(is)));
    out.push_back(cur);
  }
  return out;
}

void write_regenerations_jsonl(std::ostream& os, const std::vector<RegenerationRecord>& records, int d) {
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    os << json{{"k", k + 1}, {"tau", r.tau}, {"point", coords(r.point, d)}, {"chi", r.chi}, {"censored", r.censored}}
              .dump()
       << '\n';
  }
}

}  // namespace rwrc
