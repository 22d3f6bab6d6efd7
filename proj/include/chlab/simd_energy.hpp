#pragma once

#include <cstddef>

namespace chlab::simd {

/// Accumulated cell-wise energies of a piecewise-linear profile:
///   e_u     = sum_i  w_i (uL_i^2 + uL_i uR_i + uR_i^2) / 3   (= int u^2)
///   e_plus  = sum_i  w_i max(s_i, 0)^2,  s_i = (uR_i - uL_i) / w_i
///   e_minus = sum_i  w_i min(s_i, 0)^2
struct EnergyTriple {
  double e_u = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

using EnergyAccumFn = EnergyTriple (*)(const double* widths,
                                       const double* u_left,
                                       const double* u_right, std::size_t n);

/// Portable reference kernel.
EnergyTriple energy_accum_scalar(const double* widths, const double* u_left,
                                 const double* u_right, std::size_t n);

#if defined(__x86_64__)
/// AVX2 variant; only call when the CPU supports AVX2.
EnergyTriple energy_accum_avx2(const double* widths, const double* u_left,
                               const double* u_right, std::size_t n);
#endif

/// Best kernel for the running CPU (decided once).
EnergyAccumFn select_energy_accum();

/// Dispatching entry point used by the profile module.
inline EnergyTriple energy_accum(const double* widths, const double* u_left,
                                 const double* u_right, std::size_t n) {
  static const EnergyAccumFn fn = select_energy_accum();
  return fn(widths, u_left, u_right, n);
}

/// Name of the selected kernel ("scalar" or "avx2"), for diagnostics.
const char* selected_energy_accum_name();

}  // namespace chlab::simd
