#include <immintrin.h>

#include <cstdint>

#include "kmath_impl.hpp"
#include "rwrc/kernels.hpp"

namespace rwrc {
namespace {

using namespace kmath::detail;

inline __m256i mul64_const(__m256i a, std::uint64_t c) {
  const __m256i b = _mm256_set1_epi64x(static_cast<long long>(c));
  const __m256i b_hi = _mm256_set1_epi64x(static_cast<long long>(c >> 32));
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i c1 = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b);
  const __m256i c2 = _mm256_mul_epu32(a, b_hi);
  return _mm256_add_epi64(lo, _mm256_slli_epi64(_mm256_add_epi64(c1, c2), 32));
}

inline __m256i mix_v(__m256i z) {
  z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
  z = mul64_const(z, kMixC1);
  z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
  z = mul64_const(z, kMixC2);
  return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

inline __m256d exp_v(__m256d x) {
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpMax));
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpMin));
  const __m256d shift = _mm256_set1_pd(kShift);
  const __m256d t = _mm256_add_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), shift);
  const __m256d kd = _mm256_sub_pd(t, shift);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(kd, _mm256_set1_pd(kLn2Hi)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(kd, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kExpCoef[0]);
  for (int i = 1; i < kExpCoefCount; ++i)
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoef[i]));
  const __m256d one = _mm256_set1_pd(1.0);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), one);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), one);
  const __m256i k = _mm256_sub_epi64(_mm256_castpd_si256(t), _mm256_castpd_si256(shift));
  const __m256i sbits = _mm256_slli_epi64(_mm256_add_epi64(k, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(sbits));
}

inline __m256d log_v(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // Biased exponent as an exact double via the 1.5 * 2^52 trick.
  const __m256i ebits = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
  const __m256d shift = _mm256_set1_pd(kShift);
  __m256d ed = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_add_epi64(ebits, _mm256_castpd_si256(shift))), shift);
  ed = _mm256_sub_pd(ed, _mm256_set1_pd(1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  ed = _mm256_add_pd(ed, _mm256_and_pd(big, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(kLogCoef[0]);
  for (int i = 1; i < kLogCoefCount; ++i)
    p = _mm256_add_pd(_mm256_mul_pd(p, s2), _mm256_set1_pd(kLogCoef[i]));
  const __m256d t = _mm256_mul_pd(s2, p);
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d logm = _mm256_add_pd(two_s, _mm256_mul_pd(two_s, t));
  return _mm256_add_pd(_mm256_mul_pd(ed, _mm256_set1_pd(kLn2Hi)),
                       _mm256_add_pd(logm, _mm256_mul_pd(ed, _mm256_set1_pd(kLn2Lo))));
}

double reduce_v(__m256d acc, const double tail[4]) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  for (int i = 0; i < 4; ++i) lanes[i] += tail[i];
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

void edge_conductances_avx2(std::uint64_t mixed_seed, const std::uint64_t* lo, const std::uint64_t* hi,
                            std::size_t n, double inv_gamma, double* out) {
  const __m256i seed = _mm256_set1_epi64x(static_cast<long long>(mixed_seed));
  // 2^52 as the magic constant: the 52-bit hash top fits its mantissa exactly.
  const __m256d shift = _mm256_set1_pd(0x1p52);
  const __m256d neg_inv_gamma = _mm256_set1_pd(-inv_gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i vlo = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lo + i));
    const __m256i vhi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hi + i));
    __m256i z = mix_v(_mm256_xor_si256(seed, vlo));
    z = mix_v(_mm256_add_epi64(z, vhi));
    const __m256i top = _mm256_srli_epi64(z, 12);
    const __m256d topd =
        _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(top, _mm256_castpd_si256(shift))), shift);
    const __m256d u = _mm256_mul_pd(_mm256_add_pd(topd, _mm256_set1_pd(1.0)), _mm256_set1_pd(kTwoM52));
    // -(log u) * g and log(u) * (-g) round identically.
    _mm256_storeu_pd(out + i, exp_v(_mm256_mul_pd(log_v(u), neg_inv_gamma)));
  }
  for (; i < n; ++i) {
    const double u = kmath::hash_to_unit(kmath::edge_hash(mixed_seed, lo[i], hi[i]));
    out[i] = kmath::exp(-kmath::log(u) * inv_gamma);
  }
}

double sum_exp_neg_avx2(const double* x, std::size_t n, double rate) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d vr = _mm256_set1_pd(rate);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, exp_v(_mm256_xor_pd(_mm256_mul_pd(vr, _mm256_loadu_pd(x + i)), sign)));
  double tail[4] = {0.0, 0.0, 0.0, 0.0};
  for (; i < n; ++i) tail[i & 3] += kmath::exp(-(rate * x[i]));
  return reduce_v(acc, tail);
}

double sum_log_scaled_avx2(const double* x, std::size_t n, double scale) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, log_v(_mm256_mul_pd(_mm256_loadu_pd(x + i), vs)));
  double tail[4] = {0.0, 0.0, 0.0, 0.0};
  for (; i < n; ++i) tail[i & 3] += kmath::log(x[i] * scale);
  return reduce_v(acc, tail);
}

void exp_batch_avx2(const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_v(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = kmath::exp(x[i]);
}

void log_batch_avx2(const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, log_v(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = kmath::log(x[i]);
}

}  // namespace

const KernelSet& avx2_kernel_table() {
  static const KernelSet set{"avx2", edge_conductances_avx2, sum_exp_neg_avx2, sum_log_scaled_avx2,
                             exp_batch_avx2, log_batch_avx2};
  return set;
}

}  // namespace rwrc
