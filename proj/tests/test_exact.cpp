#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "chlab/exact.hpp"
#include "chlab/profile.hpp"

using namespace chlab;

namespace {
const PeakonAntipeakonParams kRef = derive_params(2.0, std::log(0.75));
}

TEST_CASE("derive_params reference values") {
  CHECK(kRef.h0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kRef.t_collision == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(derive_params(-1.0, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(derive_params(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("p, q satisfy their evolution equations") {
  // qdot = p (1 - e^q), pdot = p^2 e^q / 2, and the conserved quantity
  // p^2 (1 - e^q) = h0^2.
  for (const double t : {0.0, 0.3, 0.8, 1.05}) {
    double p, q;
    pq_at(kRef, t, p, q);
    CHECK(p * p * (1.0 - std::exp(q)) ==
          doctest::Approx(kRef.h0 * kRef.h0).epsilon(1e-12));
    CHECK(q < 0.0);
    CHECK(p > 0.0);

    const double dt = 1e-6;
    double p2, q2, p0, q0;
    pq_at(kRef, t + dt, p2, q2);
    pq_at(kRef, t - dt, p0, q0);
    const double qdot = (q2 - q0) / (2 * dt);
    const double pdot = (p2 - p0) / (2 * dt);
    CHECK(qdot == doctest::Approx(p * (1.0 - std::exp(q))).epsilon(1e-6));
    CHECK(pdot ==
          doctest::Approx(0.5 * p * p * std::exp(q)).epsilon(1e-6));
  }
}

TEST_CASE("pq_at is stable near the collision") {
  double p, q;
  pq_at(kRef, kRef.t_collision - 1e-10, p, q);
  CHECK(p > 1e9);            // p ~ 2/(T-t)
  CHECK(q < 0.0);
  CHECK(std::isfinite(q));
  CHECK(p * p * -std::expm1(q) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("total energy is conserved and equals h0^2") {
  const MeshRequest mesh = MeshRequest{}.refined(4.0);
  for (const double t : {0.0, 0.5, 1.0, 1.09, 1.2, 1.8}) {
    const WaveProfile prof = peakon_antipeakon_profile(kRef, t, mesh);
    const EnergySplit e = total_energy(prof);
    CHECK(e.e_u + e.e_plus + e.e_minus ==
          doctest::Approx(kRef.h0 * kRef.h0).epsilon(2e-5));
  }
}

TEST_CASE("conservative prolongation mirrors the profile") {
  const double s = 0.4;
  for (const double x : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
    CHECK(peakon_antipeakon_value(kRef, kRef.t_collision + s, x) ==
          doctest::Approx(-peakon_antipeakon_value(
                              kRef, kRef.t_collision - s, x))
              .epsilon(1e-12));
  }
  // u(T, .) = 0
  CHECK(peakon_antipeakon_value(kRef, kRef.t_collision, 0.3) == 0.0);
}

TEST_CASE("profile is odd in x") {
  const WaveProfile prof = peakon_antipeakon_profile(kRef, 0.6);
  for (const double x : {0.1, 0.5, 1.3}) {
    CHECK(prof.value_at(x) == doctest::Approx(-prof.value_at(-x))
                                  .epsilon(1e-9));
  }
}

TEST_CASE("single peakon rides at speed c") {
  const double c = 1.5;
  const WaveProfile prof = single_peakon(c, 2.0);
  CHECK(prof.value_at(2.0 * c) == doctest::Approx(c));
  CHECK(single_peakon_value(c, 2.0, 2.0 * c + 1.0) ==
        doctest::Approx(c * std::exp(-1.0)));
}

TEST_CASE("graded mesh keeps crests as nodes") {
  const auto nodes = build_graded_mesh({-0.25, 0.25}, 0.5, -3.0, 3.0, {});
  CHECK(std::count(nodes.begin(), nodes.end(), -0.25) == 1);
  CHECK(std::count(nodes.begin(), nodes.end(), 0.25) == 1);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK(nodes.front() == -3.0);
  CHECK(nodes.back() == 3.0);
}

TEST_CASE("time_reverse flips and reorders a trajectory") {
  std::vector<WaveProfile> traj;
  for (const double t : {0.0, 0.5, 1.0}) {
    traj.push_back(peakon_antipeakon_profile(kRef, t));
  }
  const auto rev = time_reverse(traj, 1.0);
  REQUIRE(rev.size() == 3);
  CHECK(rev.front().time_stamp() == doctest::Approx(0.0));
  CHECK(rev.back().time_stamp() == doctest::Approx(1.0));
  CHECK(rev.front().values()[10] == doctest::Approx(-traj.back().values()[10]));
  CHECK_THROWS_AS(time_reverse(traj, 2.0), std::invalid_argument);
}
