#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chlab {

/// Piecewise-linear spatial snapshot of u. The interpolant is supported on
/// [nodes.front(), nodes.back()] and taken to be 0 outside.
class WaveProfile {
 public:
  WaveProfile(std::vector<double> nodes, std::vector<double> values,
              double time_stamp = 0.0);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  double time_stamp() const { return time_stamp_; }

  std::size_t cell_count() const { return nodes_.size() - 1; }
  double x_min() const { return nodes_.front(); }
  double x_max() const { return nodes_.back(); }

  /// Slope of cell i; throws std::out_of_range for an invalid index.
  double slope(std::size_t cell) const;

  /// u(x); 0 outside the support.
  double value_at(double x) const;

  /// One-sided slopes at x (left derivative, right derivative); 0 outside.
  std::pair<double, double> one_sided_slopes(double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  double time_stamp_;
};

struct EnergySplit {
  double e_plus = 0.0;   // int (u_x^+)^2
  double e_minus = 0.0;  // int (u_x^-)^2
  double e_u = 0.0;      // int u^2
};

/// Exact cell-wise integrals of (u_x^+)^2, (u_x^-)^2 and u^2 over
/// [alpha,beta] intersected with the support. Throws std::invalid_argument
/// when beta < alpha.
EnergySplit energy_split(const WaveProfile& profile, double alpha, double beta);

/// Split over the whole support.
EnergySplit total_energy(const WaveProfile& profile);

/// Exact convolution P = (1/2) e^{-|x|} * (u^2 + u_x^2/2) and its spatial
/// derivative, evaluated at each query point. Per cell u is linear, so the
/// integrand is quadratic and each cell contributes a closed-form term.
std::vector<std::pair<double, double>> convolve_P(
    const WaveProfile& profile, std::span<const double> queries);

/// Convenience single-point version: returns {P(x), P_x(x)}.
std::pair<double, double> convolve_P_at(const WaveProfile& profile, double x);

/// max cell slope divided by (1 + 1/t); requires time_stamp > 0.
double oleinik_ratio(const WaveProfile& profile);

/// CSV serialization: "# t=<value>" comment line, then header "x,u" and one
/// node per row. Round-trips doubles bit-exactly.
void write_profile_csv(std::ostream& os, const WaveProfile& profile);
WaveProfile read_profile_csv(std::istream& is);

}  // namespace chlab
