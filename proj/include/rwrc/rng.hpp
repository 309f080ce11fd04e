#pragma once

#include <cstdint>
#include <random>

namespace rwrc {

// Private randomness stream keyed by (master seed, stream id).  All
// variates are produced by explicit transforms of the raw 64-bit output so
// the sequence is identical across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t next_u64() { return engine_(); }
  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // (0, 1]
  double uniform_pos() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  double exponential();
  double normal();
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::uint64_t stream_id_;
};

}  // namespace rwrc
