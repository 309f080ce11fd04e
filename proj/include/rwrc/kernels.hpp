#pragma once

#include <cstddef>
#include <cstdint>

namespace rwrc {

// Batch kernels with a scalar reference and an AVX2 variant.  Both variants
// use the same polynomial exp/log and the same four-lane reduction order,
// so their outputs are bit-identical.
struct KernelSet {
  const char* name;
  // out[i] = U_i^{-inv_gamma} with U_i derived from (mixed_seed, lo[i], hi[i]).
  void (*edge_conductances)(std::uint64_t mixed_seed, const std::uint64_t* lo,
                            const std::uint64_t* hi, std::size_t n, double inv_gamma,
                            double* out);
  // Σ exp(-rate * x[i]).
  double (*sum_exp_neg)(const double* x, std::size_t n, double rate);
  // Σ log(x[i] * scale).
  double (*sum_log_scaled)(const double* x, std::size_t n, double scale);
  void (*exp_batch)(const double* x, std::size_t n, double* out);
  void (*log_batch)(const double* x, std::size_t n, double* out);
};

const KernelSet& scalar_kernels();
// Null when the AVX2 translation unit is absent or the CPU lacks AVX2.
const KernelSet* avx2_kernels();
// Active set: AVX2 when available unless RWRC_KERNELS=scalar.
const KernelSet& kernels();

namespace kmath {

// Reference scalar elementary functions shared by every kernel variant.
double exp(double x);
double log(double x);

// Edge hash: (mixed_seed, packed lo, packed hi) -> uniform in (0, 1].
std::uint64_t edge_hash(std::uint64_t mixed_seed, std::uint64_t lo, std::uint64_t hi);
double hash_to_unit(std::uint64_t h);

}  // namespace kmath

}  // namespace rwrc
