#include <bit>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "rwrc/errors.hpp"
#include "rwrc/stats.hpp"

namespace rwrc {

MeanCI truncated_sum_moment(double gamma, std::int64_t n, double p, double cap_exponent, std::size_t reps,
                            RngStream& rng) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (n < 1 || reps < 2) throw DomainError("truncated moment needs n >= 1 and reps >= 2");
  const double nn = static_cast<double>(n);
  const double inv_gamma = 1.0 / gamma;
  const double norm = std::pow(nn, -inv_gamma);
  const double cap = std::pow(nn, -cap_exponent * inv_gamma);
  std::vector<double> values(reps);
  for (auto& v : values) {
    double s = 0.0;
    for (std::int64_t j = 0; j < n; ++j) s += std::min(std::pow(rng.uniform_pos(), -inv_gamma) * norm, cap);
    v = std::pow(s, p);
  }
  return mean_ci(values);
}

TailProbability centered_sum_tail(std::int64_t n, double threshold, std::uint64_t reps, RngStream& rng) {
  if (n < 1 || reps < 1) throw DomainError("tail estimate needs n >= 1 and reps >= 1");
  const std::int64_t words = n / 64;
  const int rest = static_cast<int>(n % 64);
  const std::uint64_t mask = rest == 0 ? 0 : (~std::uint64_t{0} >> (64 - rest));
  TailProbability t;
  t.reps = reps;
  for (std::uint64_t r = 0; r < reps; ++r) {
    std::int64_t ones = 0;
    for (std::int64_t w = 0; w < words; ++w) ones += std::popcount(rng.next_u64());
    if (rest) ones += std::popcount(rng.next_u64() & mask);
    const double s = static_cast<double>(2 * ones - n);
    if (s > threshold) ++t.hits;
  }
  const double h = static_cast<double>(t.hits);
  const double m = static_cast<double>(reps);
  t.estimate = h / m;
  t.ci_low = t.hits == 0 ? 0.0 : boost::math::ibeta_inv(h, m - h + 1.0, 0.025);
  t.ci_high = t.hits == reps ? 1.0 : boost::math::ibeta_inv(h + 1.0, m - h, 0.975);
  return t;
}

}  // namespace rwrc
