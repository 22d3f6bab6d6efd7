#pragma once

#include <cstdint>

namespace chlab {

enum class KernelId { CamassaHolm, HunterSaxton };

/// Coefficients of the nonlocal transport equation
///   u_t + u u_x = \int A(x,y) [a u^2(y) + b u_x^2(y)] dy
/// together with the one-sided Lipschitz constant L of A in its first
/// argument and the constants (C1,C2,C3) of the four-term difference
/// quotient decomposition.
struct KernelSpec {
  KernelId id;
  double a;
  double b;
  double L;
  double C1;
  double C2;
  double C3;

  static KernelSpec camassa_holm();
  static KernelSpec hunter_saxton();
};

/// Pointwise terms of K(y) = (A(eta,y) - A(zeta,y)) / (eta - zeta),
/// split as K = L_term + L1 + L2 + L3.
struct KernelDecomposition {
  double L_term;
  double L1;
  double L2;
  double L3;

  double sum() const { return L_term + L1 + L2 + L3; }
};

/// A(x,y). Camassa-Holm: (1/2) sgn(x-y) e^{-|x-y|} with sgn(0) = 0,
/// Hunter-Saxton: 1 iff y <= x.
double eval_A(const KernelSpec& spec, double x, double y);

/// Smooth part of the decomposition. Camassa-Holm: -(1/2) e^{-|zeta-y|};
/// Hunter-Saxton: 0.
double eval_L_smooth(const KernelSpec& spec, double zeta, double y);

/// Decomposes the difference quotient for a pair zeta < eta at point y.
/// Throws std::invalid_argument if eta <= zeta.
KernelDecomposition decompose_K(const KernelSpec& spec, double zeta,
                                double eta, double y);

struct LipschitzReport {
  double min_quotient;
  bool pass;
};

/// Samples random (x1 < x2, y) triples and reports the minimum difference
/// quotient of A; pass iff min >= -L - tol.
LipschitzReport verify_one_sided_lipschitz(const KernelSpec& spec,
                                           int samples,
                                           std::uint64_t seed = 0,
                                           double tol = 1e-10);

}  // namespace chlab
