#pragma once

#include <span>
#include <utility>
#include <vector>

#include "chlab/profile.hpp"

namespace chlab {

/// Spatial discretization request for sampling closed-form solutions.
/// Nodes are graded geometrically toward wave crests (which are always
/// nodes themselves) and spaced uniformly in the far field.
struct MeshRequest {
  double spacing = 0.04;       // far-field spacing
  double grading_ratio = 1.2;  // geometric growth away from crests
  double floor_scale = 1e-9;   // floor gap = floor_scale * crest separation
  double tail_cut = 1e-12;     // domain ends where |u| drops below this

  MeshRequest refined(double factor) const {
    MeshRequest r = *this;
    r.spacing /= factor;
    r.floor_scale /= factor;
    return r;
  }
};

/// Graded node set covering [lo,hi]; every crest is a node.
std::vector<double> build_graded_mesh(const std::vector<double>& crests,
                                      double crest_scale, double lo, double hi,
                                      const MeshRequest& req);

/// Conservative peakon-antipeakon interaction
///   u(t,x) = p1(t) e^{-|x-q1(t)|} - p1(t) e^{-|x+q1(t)|},
/// p1 = p/2, q1 = q/2, with blow-up at t_collision and the conservative
/// prolongation u(t,x) = -u(2T-t,x) for t > T.
struct PeakonAntipeakonParams {
  double p0;           // p(0) > 0
  double q0;           // q(0) < 0
  double h0;           // H0, h0^2 = p0^2 (1 - e^{q0})
  double t_collision;  // T = (1/H0) log((p0+H0)/(p0-H0))
};

/// Throws std::invalid_argument unless p0 > 0 and q0 < 0.
PeakonAntipeakonParams derive_params(double p0, double q0);

/// Closed-form p(t), q(t) for t < t_collision (valid for any t < T,
/// including t < 0). Evaluated in a cancellation-free form near T.
void pq_at(const PeakonAntipeakonParams& params, double t, double& p,
           double& q);

/// Snapshot at time t >= 0; at t == T (within rounding) the profile is
/// identically zero, for t > T the negated time-mirror is returned.
WaveProfile peakon_antipeakon_profile(const PeakonAntipeakonParams& params,
                                      double t, const MeshRequest& mesh = {});

/// u(t,x) without meshing.
double peakon_antipeakon_value(const PeakonAntipeakonParams& params, double t,
                               double x);

/// Closed-form nonlocal pressure of a sum of peakons u = sum p_i e^{-|x-q_i|}:
///   P = (1/2) e^{-|x|} * (u^2 + u_x^2/2),
/// returned together with its spatial derivative as {P, P_x}. Exact up to
/// rounding; the pairwise convolutions reduce to elementary exponentials.
std::pair<double, double> peakons_P_at(std::span<const double> q,
                                       std::span<const double> p, double x);

/// One-sided slopes {u_x(x-), u_x(x+)} of a sum of peakons.
std::pair<double, double> peakons_slopes_at(std::span<const double> q,
                                            std::span<const double> p,
                                            double x);

/// Traveling peakon u = c e^{-|x-ct|}.
WaveProfile single_peakon(double c, double t, const MeshRequest& mesh = {});
double single_peakon_value(double c, double t, double x);

/// u^{bT}(t,x) = -u(T-t,x) applied to a sampled trajectory; the result is
/// again a weak-solution trajectory. Throws if the samples do not cover
/// [0,T].
std::vector<WaveProfile> time_reverse(const std::vector<WaveProfile>& traj,
                                      double T);

}  // namespace chlab
