#include <cmath>
#include <random>

#include <stdexcept>

#include <doctest.h>

#include "chlab/kernel.hpp"

using namespace chlab;

TEST_CASE("kernel constants") {
  const KernelSpec ch = KernelSpec::camassa_holm();
  CHECK(ch.a == 1.0);
  CHECK(ch.b == 0.5);
  CHECK(ch.L == 1.0);
  CHECK(ch.C1 == 1.0);
  CHECK(ch.C2 == 2.0);
  CHECK(ch.C3 == 1.0);

  const KernelSpec hs = KernelSpec::hunter_saxton();
  CHECK(hs.a == 0.0);
  CHECK(hs.b == 0.5);
  CHECK(hs.L == 0.0);
  CHECK(hs.C1 == 1.0);
  CHECK(hs.C2 == 0.0);
  CHECK(hs.C3 == 0.0);
}

TEST_CASE("eval_A pointwise") {
  const KernelSpec ch = KernelSpec::camassa_holm();
  CHECK(eval_A(ch, 1.0, 0.0) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(eval_A(ch, 0.0, 1.0) == doctest::Approx(-0.5 * std::exp(-1.0)));
  CHECK(eval_A(ch, 0.0, 0.0) == 0.0);  // sgn(0) = 0

  const KernelSpec hs = KernelSpec::hunter_saxton();
  CHECK(eval_A(hs, 1.0, 0.0) == 1.0);
  CHECK(eval_A(hs, 0.0, 1.0) == 0.0);
  CHECK(eval_A(hs, 0.0, 0.0) == 1.0);  // y <= x
}

TEST_CASE("eval_L_smooth") {
  const KernelSpec ch = KernelSpec::camassa_holm();
  CHECK(eval_L_smooth(ch, 0.0, std::log(2.0)) == doctest::Approx(-0.25));
  CHECK(eval_L_smooth(ch, 0.0, 0.0) == doctest::Approx(-0.5));
  const KernelSpec hs = KernelSpec::hunter_saxton();
  CHECK(eval_L_smooth(hs, 0.3, -4.0) == 0.0);
}

TEST_CASE("decomposition reconstructs the difference quotient") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> gap(1e-8, 4.0);
  for (const KernelSpec& spec :
       {KernelSpec::camassa_holm(), KernelSpec::hunter_saxton()}) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double zeta = pos(rng);
      const double eta = zeta + gap(rng);
      const double y = pos(rng);
      const KernelDecomposition d = decompose_K(spec, zeta, eta, y);
      const double quotient =
          (eval_A(spec, eta, y) - eval_A(spec, zeta, y)) / (eta - zeta);
      worst = std::max(worst, std::abs(d.sum() - quotient));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("decomposition term bounds") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> gap(1e-6, 4.0);
  for (const KernelSpec& spec :
       {KernelSpec::camassa_holm(), KernelSpec::hunter_saxton()}) {
    for (int i = 0; i < 10000; ++i) {
      const double zeta = pos(rng);
      const double h = gap(rng);
      const double y = pos(rng);
      const KernelDecomposition d = decompose_K(spec, zeta, zeta + h, y);
      CHECK(std::abs(d.L_term) <= spec.L * 0.5 + 1e-12);
      CHECK(std::abs(d.L1) <= spec.C1 / h + 1e-12);
      CHECK(std::abs(d.L2) <= spec.C2 + 1e-12);
      CHECK(std::abs(d.L3) <= spec.C3 * h + 1e-12);
    }
  }
}

TEST_CASE("one-sided Lipschitz minima") {
  const LipschitzReport ch =
      verify_one_sided_lipschitz(KernelSpec::camassa_holm(), 10000, 0);
  CHECK(ch.pass);
  CHECK(ch.min_quotient >= -1.0 - 1e-10);

  const LipschitzReport hs =
      verify_one_sided_lipschitz(KernelSpec::hunter_saxton(), 10000, 0);
  CHECK(hs.pass);
  CHECK(hs.min_quotient >= -1e-10);
}

TEST_CASE("decompose_K rejects inverted pairs") {
  CHECK_THROWS_AS(decompose_K(KernelSpec::camassa_holm(), 1.0, 1.0, 0.0),
                  std::invalid_argument);
}
