#include <cmath>
#include <sstream>

#include <doctest.h>

#include "chlab/exact.hpp"
#include "chlab/profile.hpp"

using namespace chlab;

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(WaveProfile({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(WaveProfile({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(WaveProfile({0.0, 1.0}, {1.0, 1.0}, -1.0),
                  std::invalid_argument);
}

TEST_CASE("value_at and one-sided slopes") {
  const WaveProfile p({-1.0, 0.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(p.value_at(-0.5) == doctest::Approx(0.5));
  CHECK(p.value_at(1.0) == doctest::Approx(0.5));
  CHECK(p.value_at(-3.0) == 0.0);
  CHECK(p.value_at(5.0) == 0.0);
  const auto [l, r] = p.one_sided_slopes(0.0);
  CHECK(l == doctest::Approx(1.0));
  CHECK(r == doctest::Approx(-0.5));
}

TEST_CASE("energy split of a unit ramp") {
  // u rises with slope 1 on [0,1] then falls with slope -2 on [1,1.5].
  const WaveProfile p({0.0, 1.0, 1.5}, {0.0, 1.0, 0.0});
  const EnergySplit full = total_energy(p);
  CHECK(full.e_plus == doctest::Approx(1.0));   // 1^2 * 1
  CHECK(full.e_minus == doctest::Approx(2.0));  // 2^2 * 0.5
  // int u^2 = 1/3 + 1/3/2 = 0.5
  CHECK(full.e_u == doctest::Approx(0.5));

  // Partial window cutting both cells.
  const EnergySplit part = energy_split(p, 0.5, 1.25);
  CHECK(part.e_plus == doctest::Approx(0.5));
  CHECK(part.e_minus == doctest::Approx(4.0 * 0.25));
  CHECK_THROWS_AS(energy_split(p, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("convolution against the single-peakon closed form") {
  // For u = c e^{-|x|}:  P(x) = c^2 (e^{-|x|} - e^{-2|x|}/2).
  const double c = 1.3;
  const WaveProfile p = single_peakon(c, 0.0, MeshRequest{}.refined(4.0));
  for (const double x : {0.0, 0.35, -1.2, 2.7}) {
    const auto [P, Px] = convolve_P_at(p, x);
    const double ax = std::abs(x);
    const double exact = c * c * (std::exp(-ax) - 0.5 * std::exp(-2 * ax));
    CHECK(P == doctest::Approx(exact).epsilon(1e-4));
    const double exact_dx =
        -(x >= 0 ? 1.0 : -1.0) * c * c *
        (std::exp(-ax) - std::exp(-2 * ax));
    CHECK(Px == doctest::Approx(exact_dx).epsilon(2e-4));
  }
}

TEST_CASE("convolution P at peakon crest equals c^2/2") {
  const double c = 2.0;
  const WaveProfile p = single_peakon(c, 0.0, MeshRequest{}.refined(4.0));
  const auto [P, Px] = convolve_P_at(p, 0.0);
  CHECK(P == doctest::Approx(c * c / 2).epsilon(1e-5));
  CHECK(Px == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("oleinik ratio") {
  const WaveProfile p({0.0, 1.0, 1.5}, {0.0, 1.0, 0.0}, 2.0);
  CHECK(oleinik_ratio(p) == doctest::Approx(1.0 / 1.5));
  const WaveProfile q({0.0, 1.0}, {0.0, 1.0}, 0.0);
  CHECK_THROWS_AS(oleinik_ratio(q), std::invalid_argument);
}

TEST_CASE("profile CSV round-trips bit-exactly") {
  const WaveProfile p = single_peakon(1.7, 0.3);
  std::stringstream ss;
  write_profile_csv(ss, p);
  const WaveProfile q = read_profile_csv(ss);
  REQUIRE(q.nodes().size() == p.nodes().size());
  CHECK(q.time_stamp() == p.time_stamp());
  for (std::size_t i = 0; i < p.nodes().size(); ++i) {
    CHECK(q.nodes()[i] == p.nodes()[i]);
    CHECK(q.values()[i] == p.values()[i]);
  }
}
