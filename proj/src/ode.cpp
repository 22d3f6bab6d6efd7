#include "chlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chlab {

namespace {

// Dormand-Prince 5(4) coefficients (RK45 with FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (continuous extension of order 4).
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

}  // namespace

std::vector<double> OdeSolution::at(double t) const {
  if (t <= nodes_.front().t) return nodes_.front().y;
  if (t >= nodes_.back().t) return nodes_.back().y;
  const auto it = std::lower_bound(
      nodes_.begin(), nodes_.end(), t,
      [](const OdeNode& n, double tv) { return n.t < tv; });
  const OdeNode& hi = *it;
  const OdeNode& lo = *(it - 1);
  const double h = hi.t - lo.t;
  const double s = (t - lo.t) / h;
  std::vector<double> out(lo.y.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r2 = hi.y[i] - lo.y[i];
    const double r3 = h * lo.dy[i] - r2;
    const double r4 = r2 - h * hi.dy[i] - r3;
    const double r5 = hi.c5[i];
    out[i] = lo.y[i] +
             s * (r2 + (1 - s) * (r3 + s * (r4 + (1 - s) * r5)));
  }
  return out;
}

OdeSolution integrate(const OdeRhs& rhs, std::vector<double> y0, double t0,
                      double t1, const OdeOptions& opts,
                      const OdeObserver& observer) {
  if (!(t1 > t0)) {
    throw std::invalid_argument("integrate: requires t1 > t0");
  }
  const std::size_t n = y0.size();
  const double span = t1 - t0;
  const double hmax = opts.max_step > 0.0 ? opts.max_step : span;

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> ytmp(n), y5(n);

  double t = t0;
  std::vector<double> y = std::move(y0);
  rhs(t, y, k1);

  std::vector<OdeNode> nodes;
  nodes.push_back({t, y, k1, {}});

  double h = std::min({opts.initial_step, hmax, span});
  bool halted = false;

  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    if (t >= t1) break;
    h = std::min(h, t1 - t);
    if (!(h > std::abs(t) * 1e-15 + 1e-300)) {
      throw std::runtime_error("integrate: step size underflow");
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] +
                h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    rhs(t + h, y5, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(ei) / sc);
    }

    if (err <= 1.0) {  // accept
      std::vector<double> c5(n);
      for (std::size_t i = 0; i < n; ++i) {
        c5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                     d6 * k6[i] + d7 * k7[i]);
      }
      t += h;
      y.swap(y5);
      k1.swap(k7);  // FSAL
      nodes.push_back({t, y, k1, std::move(c5)});
      if (observer && !observer(t, y)) {
        halted = true;
        break;
      }
    }
    const double fac =
        err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h = std::min(hmax, h * std::clamp(fac, 0.2, 5.0));
  }

  if (!halted && t < t1) {
    throw std::runtime_error("integrate: max_steps exhausted");
  }
  return OdeSolution(std::move(nodes), halted);
}

}  // namespace chlab
