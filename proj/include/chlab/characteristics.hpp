#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chlab/solver.hpp"

namespace chlab {

enum class Side { Leftmost, Rightmost, Plain };

struct CharSample {
  double t;
  double x;
  double u;
  std::optional<double> v;  // slope along the curve, when computed
};

/// A characteristic curve x(t) with x' = u(t, x(t)), sampled on a uniform
/// time grid. Leftmost/Rightmost curves are obtained as limits of curves
/// started at perturbed points (see trace).
class Characteristic {
 public:
  Characteristic(double start, Side side, std::vector<CharSample> samples);

  double start() const { return start_; }
  Side side() const { return side_; }
  const std::vector<CharSample>& samples() const { return samples_; }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

  double x_at(double t) const;
  double u_at(double t) const;
  std::optional<double> v_at(double t) const;

 private:
  std::size_t bracket(double t) const;
  double start_;
  Side side_;
  std::vector<CharSample> samples_;
};

struct TraceOptions {
  int samples = 257;  // stored samples, including both endpoints
  double rtol = 1e-9;
  double atol = 1e-12;
  // Side limits: curves started at start -/+ eps for each entry; the two
  // smallest are Richardson-combined.
  std::vector<double> side_eps = {1e-4, 1e-5, 1e-6};
};

/// Traces x' = u over [t0, t1] from `start`. For Leftmost/Rightmost the
/// start is approached from the left/right as a limit. Throws OutOfSpan
/// outside the handle span.
Characteristic trace(const SolutionHandle& handle, double start, double t0,
                     double t1, Side side = Side::Plain,
                     const TraceOptions& opts = {});

struct SlopeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VAlongOptions {
  double slope_tol = 1e-6;  // start-point one-sided slope agreement
  double v_blowup = 1e8;    // halt when |v| exceeds this
  int substeps = 4;         // RK4 sub-steps per characteristic sample
};

struct VAlongResult {
  Characteristic curve;  // v filled where computed
  bool blew_up = false;
  double t_stop = 0.0;
};

/// Integrates v' = u^2 - v^2/2 - P along an already-traced characteristic.
/// v(t0) comes from the profile slope at the start; starting on a kink
/// raises SlopeMismatch.
VAlongResult v_along(const SolutionHandle& handle, const Characteristic& curve,
                     const VAlongOptions& opts = {});

struct CharacteristicPair {
  Characteristic zeta;
  Characteristic eta;
  std::vector<double> t;
  std::vector<double> h;      // eta - zeta
  std::vector<double> p;      // u(eta) - u(zeta)
  std::vector<double> omega;  // p / h
  bool collided = false;      // h reached h_floor; series truncated there
  double t_stop = 0.0;
};

constexpr double kPairHFloor = 1e-10;

/// Leftmost characteristics from zeta_start < eta_start with the derived
/// (h, p, omega) series; terminates early when h <= h_floor.
CharacteristicPair pair_series(const SolutionHandle& handle, double zeta_start,
                               double eta_start, double t0, double t1,
                               const TraceOptions& opts = {});

struct ArgumentOutOfRange : std::domain_error {
  using std::domain_error::domain_error;
};

/// omega(t0+dt) >= sqrt(LC) tan(-sqrt(LC) dt + arctan(omega0/sqrt(LC))).
/// Throws ArgumentOutOfRange when the tangent argument leaves (-pi/2,pi/2).
double omega_lower_bound(double omega0, double dt, double L, double C);

/// T_max = pi/(8 sqrt(LC)), Omega(t) = sqrt(LC) tan(sqrt(LC) t - pi/2);
/// requires LC > 0 and 0 <= t < T_max.
std::pair<double, double> t_max_and_Omega(double L, double C, double t);

struct FlowMap {
  double t;
  std::vector<double> starts;
  std::vector<double> ends;  // M_t(start), Leftmost convention
  bool monotone;
};

FlowMap flow_map(const SolutionHandle& handle, std::span<const double> starts,
                 double t, const TraceOptions& opts = {});

struct VFloorViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct V2MReport {
  double lhs;       // v^2(t) M_t'(zeta)
  double rhs;       // v^2(0) M_0' exp(int 2(u^2-P)/v)
  double rel_err;
  double ratio;     // lhs / (v^2(0) M_0')
  double bound_lo;  // exp(-2t((sup u)^2 + sup P)/V1)
  double bound_hi;
  bool bound_ok;
};

/// Checks the v^2 M' identity and the two-sided exponential bound along a
/// characteristic whose v stays away from 0 (|v| >= v_floor, else
/// VFloorViolated). M' is a centered difference of the flow map with step
/// fd_eps.
V2MReport v2mprime_check(const SolutionHandle& handle, const VAlongResult& vr,
                         double t, double v_floor = 0.1, double fd_eps = 1e-5);

/// True iff for probes eta = zeta +/- 1/(kN), k = 1..probes, all omega
/// samples on [0, t] lie within [-N, N] (small numerical slack).
bool uniqueness_diagnostic(const SolutionHandle& handle, double zeta, double N,
                           double t, int probes = 3);

/// CSV: columns t,x,u,v (v empty when absent).
void write_characteristic_csv(std::ostream& os, const Characteristic& c);
/// CSV: columns zeta,M_t.
void write_flow_map_csv(std::ostream& os, const FlowMap& fm);

}  // namespace chlab
