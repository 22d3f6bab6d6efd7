#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "chlab/simd_energy.hpp"

using namespace chlab::simd;

TEST_CASE("dispatched kernel matches the scalar reference") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> width(1e-6, 2.0);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (const std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 64ul, 1001ul}) {
    std::vector<double> w(n), ul(n), ur(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = width(rng);
      ul[i] = val(rng);
      ur[i] = val(rng);
      if (i % 5 == 0) ur[i] = ul[i];  // exercise the zero-slope branch
    }
    const EnergyTriple ref =
        energy_accum_scalar(w.data(), ul.data(), ur.data(), n);
    const EnergyTriple got = energy_accum(w.data(), ul.data(), ur.data(), n);
    CHECK(got.e_u == doctest::Approx(ref.e_u).epsilon(1e-13));
    CHECK(got.e_plus == doctest::Approx(ref.e_plus).epsilon(1e-13));
    CHECK(got.e_minus == doctest::Approx(ref.e_minus).epsilon(1e-13));
  }
}

TEST_CASE("a kernel variant is selected") {
  const std::string name = selected_energy_accum_name();
  CHECK((name == "scalar" || name == "avx2"));
}

#if defined(__x86_64__)
TEST_CASE("avx2 variant agrees with scalar when available") {
  if (!__builtin_cpu_supports("avx2")) return;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> width(1e-6, 2.0);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  const std::size_t n = 517;
  std::vector<double> w(n), ul(n), ur(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = width(rng);
    ul[i] = val(rng);
    ur[i] = val(rng);
  }
  const EnergyTriple ref =
      energy_accum_scalar(w.data(), ul.data(), ur.data(), n);
  const EnergyTriple got =
      energy_accum_avx2(w.data(), ul.data(), ur.data(), n);
  CHECK(got.e_u == doctest::Approx(ref.e_u).epsilon(1e-13));
  CHECK(got.e_plus == doctest::Approx(ref.e_plus).epsilon(1e-13));
  CHECK(got.e_minus == doctest::Approx(ref.e_minus).epsilon(1e-13));
}
#endif
