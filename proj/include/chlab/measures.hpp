#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "chlab/characteristics.hpp"
#include "chlab/solver.hpp"

namespace chlab {

struct WindowInverted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonCauchy : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RegimeViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Energies of the moving window [alpha(t), beta(t)].
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> e_plus;   // int_window (u_x^+)^2
  std::vector<double> e_minus;  // int_window (u_x^-)^2
  std::vector<double> e_u;      // int_window u^2
};

/// energy_split on the window cut out by two traced characteristics.
/// Throws WindowInverted when beta(t) < alpha(t) at a sample.
EnergyLedger ledger(const SolutionHandle& handle, const Characteristic& alpha,
                    const Characteristic& beta, std::span<const double> times,
                    const MeshRequest& mesh = {});

enum class LimitSide { Left, Right };

struct OneSidedLimit {
  double at;
  LimitSide side;
  double value;
  double convergence_order_estimate;
  double uncertainty;
};

/// Extrapolates lim_{s->at^side} series(s) from geometric approach times
/// at -/+ 2^{-k} delta, k = 0..K. Requires K >= 6 (InsufficientSamples);
/// throws NonCauchy when successive differences fail to decay.
OneSidedLimit one_sided_limit(const std::function<double(double)>& series,
                              double at, LimitSide side, double delta = 0.1,
                              int K = 10);

/// Nonnegative step function sum_i c_i 1_{[a_i, a_{i+1})}; zero outside.
struct StepFunction {
  std::vector<double> breakpoints;   // a_0 < ... < a_I
  std::vector<double> coefficients;  // c_0 ... c_{I-1}, >= 0

  double value_at(double x) const;
  bool empty() const { return coefficients.empty(); }

  /// Indicator of [a, b) (coefficient 1).
  static StepFunction indicator(double a, double b);
};

/// Step approximation of a continuous, compactly supported phi >= 0 on
/// [a, b]: coefficients are phi quantized to multiples of eps, so the
/// sup-error is <= eps/2 and neighboring coefficients differ by <= eps.
StepFunction step_approximate(const std::function<double(double)>& phi,
                              double a, double b, double eps);

/// phi-weighted energies: int phi (u_x^+)^2, int phi (u_x^-)^2, int phi u^2.
EnergySplit weighted_split(const WaveProfile& profile, const StepFunction& phi);
/// Smooth-phi variant (per-cell Simpson quadrature of phi).
EnergySplit weighted_split(const WaveProfile& profile,
                           const std::function<double(double)>& phi, double a,
                           double b);

struct MeasureAtom {
  double t;
  double mass;         // mu^+: right limit - value; mu^-: value - left limit
  double uncertainty;  // extrapolation uncertainty of the one-sided limit
};

struct MeasureBin {
  double t0;
  double t1;
  double increment;
};

struct MeasureReport {
  std::vector<MeasureAtom> atoms;
  std::vector<MeasureBin> bins;
  double total_variation = 0.0;
};

struct MuOptions {
  double delta = 0.05;          // geometric approach span
  int K = 10;                   // approach levels
  double noise_factor = 10.0;   // masses below factor*uncertainty -> 0
  MeshRequest mesh = {};
};

/// Atoms of mu^+ and mu^- at the candidate times, phi-averaged. The two
/// reports are returned as {mu_plus, mu_minus}; masses below the noise
/// threshold are suppressed (reported as exact 0 atoms omitted).
std::pair<MeasureReport, MeasureReport> mu_atoms(
    const SolutionHandle& handle, const StepFunction& phi,
    std::span<const double> t_candidates, const MuOptions& opts = {});

/// Binned signed increments of t -> int phi (u_x^sign)^2 on the time grid;
/// total_variation = sum |increments|. sign: +1 or -1.
MeasureReport nu_measure(const SolutionHandle& handle, const StepFunction& phi,
                         int sign, std::span<const double> time_grid,
                         const MeshRequest& mesh = {});

struct BvReport {
  double lhs;      // E^+(t2)
  double rhs;      // E^+(t1) - (t2-t1) * (K_slack * window + int u_x^2(t1))
  double slack;    // lhs - rhs
  double k_slack;
  double dt_eps;   // largest admissible t2 - t1
  bool ok;
};

/// Checks the short-time lower bound for E^+ between two traced
/// characteristics. L comes from the kernel, C is the solution's energy
/// bound (sup_t int a u^2 + b u_x^2). Throws RegimeViolated when t2 - t1
/// exceeds the admissible step.
BvReport bv_lower_bound_check(const SolutionHandle& handle,
                              const Characteristic& alpha,
                              const Characteristic& beta, double t1, double t2,
                              const KernelSpec& spec, double C,
                              const MeshRequest& mesh = {});

/// CSV: columns t,e_plus,e_minus.
void write_ledger_csv(std::ostream& os, const EnergyLedger& ledger);
EnergyLedger read_ledger_csv(std::istream& is);

/// JSON: {"atoms":[{"t":..,"mass":..}], "bins":[{"t0":..,"t1":..,
/// "increment":..}], "total_variation":..}.
void write_measure_json(std::ostream& os, const MeasureReport& report);
MeasureReport read_measure_json(std::istream& is);

}  // namespace chlab
