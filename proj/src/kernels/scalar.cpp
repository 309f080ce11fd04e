#include <bit>
#include <cstdint>

#include "kmath_impl.hpp"
#include "rwrc/kernels.hpp"

namespace rwrc {
namespace kmath {

using namespace detail;

double exp(double x) {
  if (x > kExpMax) x = kExpMax;
  if (x < kExpMin) x = kExpMin;
  const double kd = (x * kLog2e + kShift) - kShift;
  const double r = (x - kd * kLn2Hi) - kd * kLn2Lo;
  double p = kExpCoef[0];
  for (int i = 1; i < kExpCoefCount; ++i) p = p * r + kExpCoef[i];
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::int64_t k = std::bit_cast<std::int64_t>(kd + kShift) - std::bit_cast<std::int64_t>(kShift);
  const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
  return p * scale;
}

double log(double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  std::int64_t e = static_cast<std::int64_t>((bits >> 52) & 0x7ff) - 1023;
  double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) | 0x3ff0000000000000ULL);
  if (m > kSqrt2) {
    m *= 0.5;
    e += 1;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double p = kLogCoef[0];
  for (int i = 1; i < kLogCoefCount; ++i) p = p * s2 + kLogCoef[i];
  const double t = s2 * p;
  const double two_s = s + s;
  const double logm = two_s + two_s * t;
  const double ed = static_cast<double>(e);
  return ed * kLn2Hi + (logm + ed * kLn2Lo);
}

std::uint64_t edge_hash(std::uint64_t mixed_seed, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t z = mixed_seed ^ lo;
  z ^= z >> 30;
  z *= kMixC1;
  z ^= z >> 27;
  z *= kMixC2;
  z ^= z >> 31;
  z += hi;
  z ^= z >> 30;
  z *= kMixC1;
  z ^= z >> 27;
  z *= kMixC2;
  z ^= z >> 31;
  return z;
}

double hash_to_unit(std::uint64_t h) { return (static_cast<double>(h >> 12) + 1.0) * kTwoM52; }

}  // namespace kmath

namespace {

void edge_conductances_scalar(std::uint64_t mixed_seed, const std::uint64_t* lo, const std::uint64_t* hi,
                              std::size_t n, double inv_gamma, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double u = kmath::hash_to_unit(kmath::edge_hash(mixed_seed, lo[i], hi[i]));
    out[i] = kmath::exp(-kmath::log(u) * inv_gamma);
  }
}

double reduce_lanes(const double acc[4]) { return (acc[0] + acc[1]) + (acc[2] + acc[3]); }

double sum_exp_neg_scalar(const double* x, std::size_t n, double rate) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += kmath::exp(-(rate * x[i]));
  return reduce_lanes(acc);
}

double sum_log_scaled_scalar(const double* x, std::size_t n, double scale) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += kmath::log(x[i] * scale);
  return reduce_lanes(acc);
}

void exp_batch_scalar(const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kmath::exp(x[i]);
}

void log_batch_scalar(const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kmath::log(x[i]);
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{"scalar", edge_conductances_scalar, sum_exp_neg_scalar,
                             sum_log_scaled_scalar, exp_batch_scalar, log_batch_scalar};
  return set;
}

}  // namespace rwrc
