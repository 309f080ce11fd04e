#include "rwrc/trajectory.hpp"

#include <algorithm>

#include "rwrc/errors.hpp"

namespace rwrc {

Trajectory::Trajectory(const Point& start, std::uint64_t stream_id, bool enhanced)
    : stream_id_(stream_id), enhanced_(enhanced) {
  sites_.push_back(start);
  times_.push_back(0);
  if (enhanced_) bits_.push_back(1);
}

std::int64_t Trajectory::duration() const {
  if (sites_.empty()) return 0;
  if (!bounces_.empty() && bounces_.back().index + 1 == sites_.size())
    return times_.back() + bounces_.back().extra;
  return times_.back();
}

const Bounce* Trajectory::bounce_at(std::size_t i) const {
  if (extra_at(i) == 0) return nullptr;
  auto it = std::lower_bound(bounces_.begin(), bounces_.end(), i,
                             [](const Bounce& b, std::size_t v) { return b.index < v; });
  if (it == bounces_.end() || it->index != i) return nullptr;
  return &*it;
}

std::int64_t Trajectory::extra_at(std::size_t i) const {
  if (i + 1 < times_.size()) return times_[i + 1] - times_[i] - 1;
  return duration() - times_[i];
}

Point Trajectory::piece_end(std::size_t i) const {
  return (extra_at(i) & 1) ? sites_[i - 1] : sites_[i];
}

std::size_t Trajectory::piece_of(std::int64_t n) const {
  if (n < 0 || n > duration()) throw HorizonTooShort("time index beyond the recorded trajectory");
  auto it = std::upper_bound(times_.begin(), times_.end(), n);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

Point Trajectory::at(std::int64_t n) const {
  const std::size_t i = piece_of(n);
  const std::int64_t k = n - times_[i];
  return (k & 1) ? sites_[i - 1] : sites_[i];
}

bool Trajectory::bit_at(std::int64_t n) const {
  if (bits_.empty()) return true;
  const std::size_t i = piece_of(n);
  const std::int64_t k = n - times_[i];
  if (k == 0) return bits_[i] != 0;
  const Bounce* b = bounce_at(i);
  return !(b && (k == b->defect_back || k == b->defect_forth));
}

std::vector<Point> Trajectory::dense() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(duration() + 1));
  auto it = bounces_.begin();
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    out.push_back(sites_[i]);
    if (it != bounces_.end() && it->index == i) {
      for (std::int64_t k = 1; k <= it->extra; ++k) out.push_back((k & 1) ? sites_[i - 1] : sites_[i]);
      ++it;
    }
  }
  return out;
}

std::vector<std::uint8_t> Trajectory::dense_bits() const {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(duration() + 1));
  auto it = bounces_.begin();
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    out.push_back(bit(i) ? 1 : 0);
    if (it != bounces_.end() && it->index == i) {
      for (std::int64_t k = 1; k <= it->extra; ++k)
        out.push_back((k == it->defect_back || k == it->defect_forth) ? 0 : 1);
      ++it;
    }
  }
  return out;
}

void Trajectory::append(const Point& p, bool bit) {
  const std::int64_t t = duration() + 1;
  sites_.push_back(p);
  times_.push_back(t);
  if (enhanced_) bits_.push_back(bit ? 1 : 0);
}

void Trajectory::append_bounce(std::int64_t extra, std::int64_t defect_back, std::int64_t defect_forth) {
  if (extra <= 0) return;
  if (sites_.size() < 2) throw ConsistencyError("a bounce needs a preceding step");
  bounces_.push_back(Bounce{sites_.size() - 1, extra, defect_back, defect_forth});
}

void Trajectory::reserve(std::size_t n) {
  sites_.reserve(n);
  times_.reserve(n);
  if (enhanced_) bits_.reserve(n);
}

}  // namespace rwrc
