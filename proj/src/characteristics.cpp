#include "chlab/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "chlab/ode.hpp"

namespace chlab {

Characteristic::Characteristic(double start, Side side,
                               std::vector<CharSample> samples)
    : start_(start), side_(side), samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw std::invalid_argument("Characteristic: need >= 2 samples");
  }
}

std::size_t Characteristic::bracket(double t) const {
  const auto it = std::lower_bound(
      samples_.begin(), samples_.end(), t,
      [](const CharSample& s, double tv) { return s.t < tv; });
  std::size_t i = static_cast<std::size_t>(it - samples_.begin());
  if (i == 0) return 0;
  if (i >= samples_.size()) return samples_.size() - 2;
  return i - 1;
}

double Characteristic::x_at(double t) const {
  const std::size_t i = bracket(t);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  const double lam = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
  return a.x + lam * (b.x - a.x);
}

double Characteristic::u_at(double t) const {
  const std::size_t i = bracket(t);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  const double lam = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
  return a.u + lam * (b.u - a.u);
}

std::optional<double> Characteristic::v_at(double t) const {
  const std::size_t i = bracket(t);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  if (!a.v || !b.v) return std::nullopt;
  const double lam = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
  return *a.v + lam * (*b.v - *a.v);
}

namespace {

// Position samples of the curve started at x0, on a uniform grid.
std::vector<double> trace_positions(const SolutionHandle& handle, double x0,
                                    double t0, double t1,
                                    const TraceOptions& opts) {
  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  const auto rhs = [&](double t, const std::vector<double>& y,
                       std::vector<double>& dy) {
    dy[0] = handle->u_at(t, y[0]);
  };
  const OdeSolution sol = integrate(rhs, {x0}, t0, t1, oo);
  std::vector<double> xs(static_cast<std::size_t>(opts.samples));
  const std::size_t m = xs.size() - 1;
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / m;
    xs[i] = sol.at(t)[0];
  }
  return xs;
}

}  // namespace

Characteristic trace(const SolutionHandle& handle, double start, double t0,
                     double t1, Side side, const TraceOptions& opts) {
  handle->check_span(t0);
  handle->check_span(t1);
  if (!(t1 > t0)) {
    throw std::invalid_argument("trace: requires t1 > t0");
  }
  if (opts.samples < 2) {
    throw std::invalid_argument("trace: need >= 2 samples");
  }

  std::vector<double> xs;
  if (side == Side::Plain) {
    xs = trace_positions(handle, start, t0, t1, opts);
  } else {
    // Limit of curves from perturbed starts; combine the two smallest
    // perturbations by Richardson extrapolation (linear in eps).
    std::vector<double> eps = opts.side_eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    if (eps.size() < 2) {
      throw std::invalid_argument("trace: need >= 2 side_eps entries");
    }
    const double sgn = side == Side::Leftmost ? -1.0 : 1.0;
    const double e1 = eps[eps.size() - 2], e2 = eps.back();
    const auto x1 =
        trace_positions(handle, start + sgn * e1, t0, t1, opts);
    const auto x2 =
        trace_positions(handle, start + sgn * e2, t0, t1, opts);
    const double r = e1 / e2;
    xs.resize(x2.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = (r * x2[i] - x1[i]) / (r - 1.0);
    }
  }

  std::vector<CharSample> samples(xs.size());
  const std::size_t m = xs.size() - 1;
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / m;
    samples[i] = {t, xs[i], handle->u_at(t, xs[i]), std::nullopt};
  }
  return Characteristic(start, side, std::move(samples));
}

VAlongResult v_along(const SolutionHandle& handle, const Characteristic& curve,
                     const VAlongOptions& opts) {
  std::vector<CharSample> samples = curve.samples();
  const double t0 = samples.front().t;
  const double x0 = samples.front().x;

  const auto [sl, sr] = handle->slopes_at(t0, x0);
  const double scale = std::max({1.0, std::abs(sl), std::abs(sr)});
  if (std::abs(sl - sr) > opts.slope_tol * scale) {
    throw SlopeMismatch("v_along: one-sided slopes disagree at start");
  }
  double v = 0.5 * (sl + sr);

  const auto rhs_v = [&](double t, double x, double vv) {
    const double u = handle->u_at(t, x);
    const double P = handle->P_at(t, x).first;
    return u * u - 0.5 * vv * vv - P;
  };

  VAlongResult out{curve, false, curve.t_end()};
  samples[0].v = v;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double ta = samples[i].t, tb = samples[i + 1].t;
    const int n = std::max(opts.substeps, 1);
    bool blew = false;
    for (int s = 0; s < n && !blew; ++s) {
      const double h = (tb - ta) / n;
      const double t = ta + s * h;
      const double k1 = rhs_v(t, curve.x_at(t), v);
      const double k2 = rhs_v(t + 0.5 * h, curve.x_at(t + 0.5 * h),
                              v + 0.5 * h * k1);
      const double k3 = rhs_v(t + 0.5 * h, curve.x_at(t + 0.5 * h),
                              v + 0.5 * h * k2);
      const double k4 = rhs_v(t + h, curve.x_at(t + h), v + h * k3);
      v += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
      blew = !(std::abs(v) <= opts.v_blowup);
    }
    if (blew) {
      out.blew_up = true;
      out.t_stop = tb;
      break;
    }
    samples[i + 1].v = v;
  }
  out.curve = Characteristic(curve.start(), curve.side(), std::move(samples));
  return out;
}

CharacteristicPair pair_series(const SolutionHandle& handle, double zeta_start,
                               double eta_start, double t0, double t1,
                               const TraceOptions& opts) {
  if (!(eta_start > zeta_start)) {
    throw std::invalid_argument("pair_series: requires eta_start > zeta_start");
  }
  Characteristic zc = trace(handle, zeta_start, t0, t1, Side::Leftmost, opts);
  Characteristic ec = trace(handle, eta_start, t0, t1, Side::Leftmost, opts);

  CharacteristicPair pair{std::move(zc), std::move(ec), {}, {}, {}, {},
                          false, t1};
  const auto& zs = pair.zeta.samples();
  const auto& es = pair.eta.samples();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double h = es[i].x - zs[i].x;
    if (h <= kPairHFloor) {
      pair.collided = true;
      pair.t_stop = zs[i].t;
      break;
    }
    pair.t.push_back(zs[i].t);
    pair.h.push_back(h);
    pair.p.push_back(es[i].u - zs[i].u);
    pair.omega.push_back(pair.p.back() / h);
  }
  if (pair.t.empty()) {
    throw std::runtime_error("pair_series: pair collided at the first sample");
  }
  return pair;
}

double omega_lower_bound(double omega0, double dt, double L, double C) {
  if (dt == 0.0) return omega0;
  const double lc = L * C;
  if (!(lc > 0.0)) {
    throw ArgumentOutOfRange("omega_lower_bound: requires L*C > 0");
  }
  const double s = std::sqrt(lc);
  const double arg = -s * dt + std::atan(omega0 / s);
  if (!(arg > -std::numbers::pi / 2 && arg < std::numbers::pi / 2)) {
    throw ArgumentOutOfRange(
        "omega_lower_bound: tangent argument outside principal branch");
  }
  return s * std::tan(arg);
}

std::pair<double, double> t_max_and_Omega(double L, double C, double t) {
  const double lc = L * C;
  if (!(lc > 0.0)) {
    throw ArgumentOutOfRange("t_max_and_Omega: requires L*C > 0");
  }
  const double s = std::sqrt(lc);
  const double t_max = std::numbers::pi / (8.0 * s);
  if (!(t >= 0.0 && t <= t_max)) {
    throw ArgumentOutOfRange("t_max_and_Omega: requires 0 <= t <= T_max");
  }
  return {t_max, s * std::tan(s * t - std::numbers::pi / 2)};
}

FlowMap flow_map(const SolutionHandle& handle, std::span<const double> starts,
                 double t, const TraceOptions& opts) {
  FlowMap fm;
  fm.t = t;
  fm.starts.assign(starts.begin(), starts.end());
  fm.ends.reserve(starts.size());
  for (const double z : starts) {
    fm.ends.push_back(
        trace(handle, z, 0.0, t, Side::Leftmost, opts).samples().back().x);
  }
  fm.monotone = std::is_sorted(fm.ends.begin(), fm.ends.end(),
                               [](double a, double b) { return a < b; });
  return fm;
}

V2MReport v2mprime_check(const SolutionHandle& handle, const VAlongResult& vr,
                         double t, double v_floor, double fd_eps) {
  const Characteristic& c = vr.curve;
  const double t0 = c.t_begin();
  if (!(t > t0 && t <= c.t_end() + 1e-12)) {
    throw std::invalid_argument("v2mprime_check: t outside traced range");
  }

  double sup_abs_v = 0.0;
  for (const auto& s : c.samples()) {
    if (s.t > t + 1e-12) break;
    if (!s.v || std::abs(*s.v) < v_floor) {
      throw VFloorViolated("v2mprime_check: |v| below v_floor on [t0, t]");
    }
    sup_abs_v = std::max(sup_abs_v, std::abs(*s.v));
  }

  // M_t' by centered difference of the flow map around the start.
  // The two positions differ by O(fd_eps * M'), so the traces need far
  // tighter tolerances than the difference being resolved.
  const double zeta = c.start();
  TraceOptions topts;
  topts.rtol = 1e-12;
  topts.atol = 1e-14;
  const auto left = trace(handle, zeta - fd_eps, t0, t, Side::Plain, topts);
  const auto right = trace(handle, zeta + fd_eps, t0, t, Side::Plain, topts);
  const double mprime =
      (right.samples().back().x - left.samples().back().x) / (2.0 * fd_eps);

  // Trapezoid quadrature of 2(u^2 - P)/v along the curve, and sup u / sup P
  // for the exponential bound.
  double integral = 0.0;
  double sup_u2 = 0.0, sup_P = 0.0;
  double prev_t = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (const auto& s : c.samples()) {
    if (s.t > t + 1e-12) break;
    const double P = handle->P_at(s.t, s.x).first;
    const double f = 2.0 * (s.u * s.u - P) / *s.v;
    if (have_prev) integral += 0.5 * (f + prev_f) * (s.t - prev_t);
    prev_t = s.t;
    prev_f = f;
    have_prev = true;
    sup_u2 = std::max(sup_u2, s.u * s.u);
    sup_P = std::max(sup_P, P);
  }

  const double v0 = *c.samples().front().v;
  const double vt = *c.v_at(t);
  V2MReport rep;
  rep.lhs = vt * vt * mprime;
  rep.rhs = v0 * v0 * std::exp(integral);
  rep.rel_err = std::abs(rep.lhs - rep.rhs) /
                std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
  rep.ratio = rep.lhs / (v0 * v0);
  const double expo = 2.0 * (t - t0) * (sup_u2 + sup_P) / v_floor;
  rep.bound_lo = std::exp(-expo);
  rep.bound_hi = std::exp(expo);
  rep.bound_ok = rep.ratio >= rep.bound_lo && rep.ratio <= rep.bound_hi;
  return rep;
}

bool uniqueness_diagnostic(const SolutionHandle& handle, double zeta, double N,
                           double t, int probes) {
  const double n_eff = std::max(N, 1e-9);
  const double slack = 1e-9;
  for (int k = 1; k <= probes; ++k) {
    const double d = 1.0 / (k * n_eff);
    for (const double eta : {zeta - d, zeta + d}) {
      const double lo = std::min(zeta, eta), hi = std::max(zeta, eta);
      CharacteristicPair pair = pair_series(handle, lo, hi, 0.0, t);
      if (pair.collided) return false;
      for (const double w : pair.omega) {
        if (std::abs(w) > N + slack) return false;
      }
    }
  }
  return true;
}

void write_characteristic_csv(std::ostream& os, const Characteristic& c) {
  os.precision(17);
  os << "t,x,u,v\n";
  for (const auto& s : c.samples()) {
    os << s.t << ',' << s.x << ',' << s.u << ',';
    if (s.v) os << *s.v;
    os << '\n';
  }
}

void write_flow_map_csv(std::ostream& os, const FlowMap& fm) {
  os.precision(17);
  os << "zeta,M_t\n";
  for (std::size_t i = 0; i < fm.starts.size(); ++i) {
    os << fm.starts[i] << ',' << fm.ends[i] << '\n';
  }
}

}  // namespace chlab
