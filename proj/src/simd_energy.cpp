#include "chlab/simd_energy.hpp"

namespace chlab::simd {

EnergyTriple energy_accum_scalar(const double* widths, const double* u_left,
                                 const double* u_right, std::size_t n) {
  EnergyTriple acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = widths[i];
    const double ul = u_left[i];
    const double ur = u_right[i];
    acc.e_u += w * (ul * ul + ul * ur + ur * ur) * (1.0 / 3.0);
    const double d = ur - ul;
    const double s2w = d * d / w;  // w * slope^2
    if (d > 0.0) {
      acc.e_plus += s2w;
    } else if (d < 0.0) {
      acc.e_minus += s2w;
    }
  }
  return acc;
}

EnergyAccumFn select_energy_accum() {
#if defined(__x86_64__)
  if (__builtin_cpu_supports("avx2")) return &energy_accum_avx2;
#endif
  return &energy_accum_scalar;
}

const char* selected_energy_accum_name() {
#if defined(__x86_64__)
  if (select_energy_accum() == &energy_accum_avx2) return "avx2";
#endif
  return "scalar";
}

}  // namespace chlab::simd
