#include <cstdlib>
#include <cstring>

#include "rwrc/kernels.hpp"

namespace rwrc {

#ifdef RWRC_HAVE_AVX2_TU
const KernelSet& avx2_kernel_table();
#endif

const KernelSet* avx2_kernels() {
#ifdef RWRC_HAVE_AVX2_TU
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &avx2_kernel_table();
#endif
  return nullptr;
}

const KernelSet& kernels() {
  static const KernelSet* active = [] {
    const char* pick = std::getenv("RWRC_KERNELS");
    if (pick && std::strcmp(pick, "scalar") == 0) return &scalar_kernels();
    const KernelSet* v = avx2_kernels();
    return v ? v : &scalar_kernels();
  }();
  return *active;
}

}  // namespace rwrc
