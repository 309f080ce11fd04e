#include "rwrc/rng.hpp"

#include <cmath>
#include <numbers>

namespace rwrc {

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) : stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::exponential() { return -std::log(uniform_pos()); }

double RngStream::normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
  return r * std::cos(2.0 * std::numbers::pi * uniform());
}

std::uint64_t RngStream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t t = -n % n;
    while (low < t) {
      m = static_cast<unsigned __int128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace rwrc
