#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rwrc/lattice.hpp"

namespace rwrc {

// A run of back-and-forth steps on the edge {sites[index-1], sites[index]}
// that starts right after the arrival at sites[index].  Step k = 1..extra
// goes to sites[index-1] for odd k and back to sites[index] for even k.
struct Bounce {
  std::size_t index = 0;
  std::int64_t extra = 0;
  // First odd (resp. even) k whose bit is 0; 0 when there is none.
  std::int64_t defect_back = 0;
  std::int64_t defect_forth = 0;
};

// One step X_{n-1} -> X_n as seen by first-passage queries.
struct StepEvent {
  std::int64_t n = 0;
  Point from;
  Point to;
  bool defect = false;  // Z_n = 0
  bool skeleton = false;
  std::size_t index = 0;  // skeleton piece the step belongs to
};

enum class StopReason { None, Steps, Level, Capacity };

// Walk path stored as a skeleton of arrivals plus compressed bounce runs.
// A walk simulated without trap acceleration has no bounces and its
// skeleton is the dense position sequence.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(const Point& start, std::uint64_t stream_id, bool enhanced);

  const Point& start() const { return sites_.front(); }
  std::uint64_t stream_id() const { return stream_id_; }
  bool enhanced() const { return enhanced_; }

  std::size_t skeleton_size() const { return sites_.size(); }
  const std::vector<Point>& sites() const { return sites_; }
  const std::vector<std::int64_t>& times() const { return times_; }
  const std::vector<Bounce>& bounces() const { return bounces_; }
  const Point& site(std::size_t i) const { return sites_[i]; }
  std::int64_t time(std::size_t i) const { return times_[i]; }
  // Z at the arrival of skeleton entry i (i >= 1); true for plain walks.
  bool bit(std::size_t i) const { return bits_.empty() || bits_[i] != 0; }

  // Last recorded time index.
  std::int64_t duration() const;
  Point at(std::int64_t n) const;
  bool bit_at(std::int64_t n) const;
  std::vector<Point> dense() const;
  std::vector<std::uint8_t> dense_bits() const;

  std::int64_t extra_at(std::size_t i) const;
  const Bounce* bounce_at(std::size_t i) const;
  // Position at the last time of skeleton piece i.
  Point piece_end(std::size_t i) const;
  // Skeleton index whose piece [times[i], times[i] + extra_i] contains n.
  std::size_t piece_of(std::int64_t n) const;

  StopReason stop_reason() const { return stop_; }
  void set_stop_reason(StopReason r) { stop_ = r; }

  void append(const Point& p, bool bit);
  void append_bounce(std::int64_t extra, std::int64_t defect_back, std::int64_t defect_forth);
  void reserve(std::size_t n);

  // Calls f(const StepEvent&) for each step after time(from_index) whose
  // arrival is a first visit within its piece: every skeleton arrival, the
  // first two steps of each bounce, and the first defect step in each
  // direction of each bounce.  Stops early when f returns false.
  template <class F>
  void for_each_event(std::size_t from_index, F&& f) const;

 private:
  template <class F>
  bool emit_bounce(const Bounce& b, F& f) const;

  std::vector<Point> sites_;
  std::vector<std::int64_t> times_;
  std::vector<std::uint8_t> bits_;
  std::vector<Bounce> bounces_;
  std::uint64_t stream_id_ = 0;
  bool enhanced_ = false;
  StopReason stop_ = StopReason::None;
};

template <class F>
bool Trajectory::emit_bounce(const Bounce& b, F& f) const {
  const Point& hi = sites_[b.index];
  const Point& lo = sites_[b.index - 1];
  const std::int64_t t0 = times_[b.index];
  StepEvent ev;
  ev.index = b.index;
  ev.skeleton = false;
  ev.n = t0 + 1;
  ev.from = hi;
  ev.to = lo;
  ev.defect = b.defect_back == 1;
  if (!f(static_cast<const StepEvent&>(ev))) return false;
  if (b.extra >= 2) {
    ev.n = t0 + 2;
    ev.from = lo;
    ev.to = hi;
    ev.defect = b.defect_forth == 2;
    if (!f(static_cast<const StepEvent&>(ev))) return false;
  }
  std::int64_t ks[2] = {b.defect_back > 2 ? b.defect_back : 0, b.defect_forth > 2 ? b.defect_forth : 0};
  if (ks[0] && ks[1] && ks[1] < ks[0]) std::swap(ks[0], ks[1]);
  for (std::int64_t k : ks) {
    if (!k) continue;
    ev.n = t0 + k;
    ev.defect = true;
    ev.from = (k & 1) ? hi : lo;
    ev.to = (k & 1) ? lo : hi;
    if (!f(static_cast<const StepEvent&>(ev))) return false;
  }
  return true;
}

template <class F>
void Trajectory::for_each_event(std::size_t from_index, F&& f) const {
  auto it = std::lower_bound(bounces_.begin(), bounces_.end(), from_index,
                             [](const Bounce& b, std::size_t v) { return b.index < v; });
  if (it != bounces_.end() && it->index == from_index) {
    if (!emit_bounce(*it, f)) return;
    ++it;
  }
  Point prev_end = piece_end(from_index);
  for (std::size_t i = from_index + 1; i < sites_.size(); ++i) {
    StepEvent ev;
    ev.n = times_[i];
    ev.from = prev_end;
    ev.to = sites_[i];
    ev.defect = !bit(i);
    ev.skeleton = true;
    ev.index = i;
    if (!f(static_cast<const StepEvent&>(ev))) return;
    prev_end = sites_[i];
    if (it != bounces_.end() && it->index == i) {
      if (!emit_bounce(*it, f)) return;
      if (it->extra & 1) prev_end = sites_[i - 1];
      ++it;
    }
  }
}

}  // namespace rwrc
