#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chlab/exact.hpp"
#include "chlab/kernel.hpp"
#include "chlab/profile.hpp"

namespace chlab {

enum class SourceKind {
  ExactPeakonAntipeakon,
  SinglePeakon,
  Zero,
  Multipeakon,
  Reversed,
  FromFile,
};

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

struct OutOfSpan : std::domain_error {
  using std::domain_error::domain_error;
};

/// Two peakons came within gap_floor of each other and no conservative
/// continuation is available for the configuration.
struct CollisionImminent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable time-parametrized weak solution on [0, t_end].
class Solution {
 public:
  Solution();
  virtual ~Solution();

  virtual SourceKind kind() const = 0;
  virtual double t_end() const = 0;

  /// Snapshot at time t; throws OutOfSpan outside [0, t_end].
  virtual WaveProfile profile_at(double t, const MeshRequest& mesh = {})
      const = 0;

  /// Pointwise u(t, x); default goes through a cached profile.
  virtual double u_at(double t, double x) const;

  /// {P(t,x), P_x(t,x)} through the exact convolution on a cached profile.
  virtual std::pair<double, double> P_at(double t, double x) const;

  /// One-sided slopes {u_x(t, x-), u_x(t, x+)}; default reads them off a
  /// cached profile, closed-form solutions override with exact values.
  virtual std::pair<double, double> slopes_at(double t, double x) const;

  /// Cached snapshot on the default mesh (thread-safe LRU, ~64 entries).
  std::shared_ptr<const WaveProfile> cached_profile(double t) const;

  void check_span(double t) const;

 private:
  struct Cache;
  mutable std::shared_ptr<Cache> cache_;
};

/// Shared-ownership descriptor; carries the energy bound C once computed.
class SolutionHandle {
 public:
  SolutionHandle() = default;
  explicit SolutionHandle(std::shared_ptr<const Solution> impl)
      : impl_(std::move(impl)) {}

  const Solution& operator*() const { return *impl_; }
  const Solution* operator->() const { return impl_.get(); }
  explicit operator bool() const { return static_cast<bool>(impl_); }
  std::shared_ptr<const Solution> shared() const { return impl_; }

  std::optional<double> energy_sup_value;  // C = sup_t int a u^2 + b u_x^2
 private:
  std::shared_ptr<const Solution> impl_;
};

/// Generators.
SolutionHandle make_zero_solution(double t_end);
SolutionHandle make_single_peakon(double c, double t_end);
SolutionHandle make_exact_peakon_antipeakon(const PeakonAntipeakonParams& p,
                                            double t_end);
/// u^{bT}: time reversal of `base` around T (requires T <= base span).
SolutionHandle make_reversed(SolutionHandle base, double T);

struct MultipeakonState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;
};

struct MultipeakonOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double gap_floor = 1e-6;  // switch to the exact regime below this gap
};

/// One adaptive step of the N-peakon ODE system of size at most dt.
/// Throws CollisionImminent when the minimum pairwise gap drops below
/// gap_floor during the step.
MultipeakonState multipeakon_step(const MultipeakonState& state, double dt,
                                  const MultipeakonOptions& opts = {});

/// Full trajectory on [0, t_end]; collisions of an antisymmetric pair are
/// bridged by the closed-form conservative continuation, any other
/// collision throws CollisionImminent.
SolutionHandle make_multipeakon(const MultipeakonState& initial, double t_end,
                                const MultipeakonOptions& opts = {});

/// Trajectory loaded from sampled frames; between frames the profile is
/// interpolated linearly in time.
SolutionHandle make_from_frames(std::vector<WaveProfile> frames,
                                SourceKind original_kind = SourceKind::FromFile);

/// max over sample_times of int a u^2 + b u_x^2; stored on the handle.
double energy_sup(SolutionHandle& handle, std::span<const double> sample_times,
                  const KernelSpec& spec = KernelSpec::camassa_holm());

/// Trajectory file: `# source=<enum> T_end=<real>` header, then profile CSV
/// blocks separated by blank lines.
void write_trajectory(std::ostream& os, SourceKind kind, double t_end,
                      const std::vector<WaveProfile>& frames);

struct Trajectory {
  SourceKind kind;
  double t_end;
  std::vector<WaveProfile> frames;
};

Trajectory read_trajectory(std::istream& is);

}  // namespace chlab
