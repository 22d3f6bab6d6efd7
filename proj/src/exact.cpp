#include "chlab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chlab {

std::vector<double> build_graded_mesh(const std::vector<double>& crests,
                                      double crest_scale, double lo, double hi,
                                      const MeshRequest& req) {
  const double floor_gap =
      std::max(req.floor_scale * std::max(crest_scale, 1e-6), 1e-300);
  std::vector<double> pts;
  pts.push_back(lo);
  pts.push_back(hi);
  const double span = hi - lo;
  for (const double c : crests) {
    if (c < lo || c > hi) continue;
    pts.push_back(c);
    for (double off = floor_gap; off < span; off *= req.grading_ratio) {
      if (off > req.spacing) break;
      if (c + off < hi) pts.push_back(c + off);
      if (c - off > lo) pts.push_back(c - off);
    }
  }
  const int backbone = static_cast<int>(span / req.spacing);
  for (int i = 1; i < backbone; ++i) {
    pts.push_back(lo + span * i / backbone);
  }
  std::sort(pts.begin(), pts.end());

  // Dedupe, never dropping a crest node.
  const double min_gap = 0.4 * floor_gap;
  std::vector<double> nodes;
  nodes.reserve(pts.size());
  auto is_crest = [&](double v) {
    for (const double c : crests) {
      if (v == c) return true;
    }
    return false;
  };
  for (const double v : pts) {
    if (nodes.empty() || v - nodes.back() >= min_gap) {
      nodes.push_back(v);
    } else if (is_crest(v) && !is_crest(nodes.back())) {
      nodes.back() = v;
    }
  }
  if (nodes.size() < 2) nodes = {lo, hi};
  return nodes;
}

PeakonAntipeakonParams derive_params(double p0, double q0) {
  if (!(p0 > 0.0)) {
    throw std::invalid_argument("derive_params: requires p0 > 0");
  }
  if (!(q0 < 0.0)) {
    throw std::invalid_argument("derive_params: requires q0 < 0");
  }
  const double h0 = p0 * std::sqrt(-std::expm1(q0));
  const double t_collision = std::log((p0 + h0) / (p0 - h0)) / h0;
  return {p0, q0, h0, t_collision};
}

void pq_at(const PeakonAntipeakonParams& params, double t, double& p,
           double& q) {
  const double h0 = params.h0;
  const double z = h0 * (t - params.t_collision);  // z < 0 for t < T
  // p = H0 (1 + e^z) / (1 - e^z); the momentum invariant p^2(1 - e^q) = H0^2
  // then gives q without the catastrophic log cancellation near T.
  p = h0 * (1.0 + std::exp(z)) / (-std::expm1(z));
  const double r = h0 / p;
  q = std::log1p(-r * r);
}

double peakon_antipeakon_value(const PeakonAntipeakonParams& params, double t,
                               double x) {
  const double T = params.t_collision;
  if (t > T) return -peakon_antipeakon_value(params, 2.0 * T - t, x);
  if (t == T) return 0.0;
  double p, q;
  pq_at(params, t, p, q);
  const double p1 = 0.5 * p, q1 = 0.5 * q;
  return p1 * std::exp(-std::abs(x - q1)) - p1 * std::exp(-std::abs(x + q1));
}

WaveProfile peakon_antipeakon_profile(const PeakonAntipeakonParams& params,
                                      double t, const MeshRequest& mesh) {
  const double T = params.t_collision;
  const double rel = std::abs(t - T) / std::max(1.0, T);
  if (rel < 1e-13) {
    return WaveProfile({-1.0, 1.0}, {0.0, 0.0}, t);
  }
  const double ts = t < T ? t : 2.0 * T - t;  // source branch time
  double p, q;
  pq_at(params, ts, p, q);
  const double p1 = 0.5 * p, q1 = 0.5 * q;  // q1 < 0
  const double tail = std::log(std::max(p1, 1.0) / mesh.tail_cut) + 1.0;
  const double lo = q1 - tail, hi = -q1 + tail;
  auto nodes = build_graded_mesh({q1, 0.0, -q1}, -q, lo, hi, mesh);
  std::vector<double> values(nodes.size());
  const double sign = t < T ? 1.0 : -1.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    values[i] = sign * (p1 * std::exp(-std::abs(x - q1)) -
                        p1 * std::exp(-std::abs(x + q1)));
  }
  return WaveProfile(std::move(nodes), std::move(values), t);
}

double single_peakon_value(double c, double t, double x) {
  return c * std::exp(-std::abs(x - c * t));
}

WaveProfile single_peakon(double c, double t, const MeshRequest& mesh) {
  if (c == 0.0) return WaveProfile({-1.0, 1.0}, {0.0, 0.0}, t);
  const double crest = c * t;
  const double tail = std::log(std::max(std::abs(c), 1.0) / mesh.tail_cut) + 1.0;
  auto nodes = build_graded_mesh({crest}, 1.0, crest - tail, crest + tail, mesh);
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    values[i] = single_peakon_value(c, t, nodes[i]);
  }
  return WaveProfile(std::move(nodes), std::move(values), t);
}

namespace {

struct ValDer {
  double v;
  double d;
};

// The pressure of a peakon sum splits over crest pairs a <= b into three
// convolutions of e^{-|x-y|} against e^{-|y-a|-|y-b|} restricted to
// y < a, a < y < b and y > b. Each is an elementary exponential in x,
// and every exponent below is <= 0 within its case, so nothing overflows.

// int_{-inf}^{a} e^{-|x-y|} e^{2y-a-b} dy
ValDer conv_left(double a, double b, double x) {
  if (x <= a) {
    const double t1 = std::exp(x - b);
    const double t2 = std::exp(2.0 * x - a - b);
    return {t1 - (2.0 / 3.0) * t2, t1 - (4.0 / 3.0) * t2};
  }
  const double v = std::exp(2.0 * a - b - x) / 3.0;
  return {v, -v};
}

// int_{b}^{inf} e^{-|x-y|} e^{a+b-2y} dy
ValDer conv_right(double a, double b, double x) {
  if (x >= b) {
    const double t1 = std::exp(a - x);
    const double t2 = std::exp(a + b - 2.0 * x);
    return {t1 - (2.0 / 3.0) * t2, -t1 + (4.0 / 3.0) * t2};
  }
  const double v = std::exp(a - 2.0 * b + x) / 3.0;
  return {v, v};
}

// e^{a-b} int_{a}^{b} e^{-|x-y|} dy
ValDer conv_mid(double a, double b, double x) {
  if (x < a) {
    const double v = std::exp(x - b) - std::exp(x + a - 2.0 * b);
    return {v, v};
  }
  if (x > b) {
    const double v = std::exp(a - x) - std::exp(2.0 * a - b - x);
    return {v, -v};
  }
  const double w = std::exp(a - b);
  const double e1 = std::exp(a - x);
  const double e2 = std::exp(x - b);
  return {w * (2.0 - e1 - e2), w * (e1 - e2)};
}

}  // namespace

std::pair<double, double> peakons_P_at(std::span<const double> q,
                                       std::span<const double> p, double x) {
  if (q.size() != p.size()) {
    throw std::invalid_argument("peakons_P_at: size mismatch");
  }
  double P = 0.0, Px = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i; j < q.size(); ++j) {
      const double coeff = (i == j ? 1.0 : 2.0) * p[i] * p[j];
      const double a = std::min(q[i], q[j]);
      const double b = std::max(q[i], q[j]);
      const ValDer l = conv_left(a, b, x);
      const ValDer r = conv_right(a, b, x);
      const ValDer m = conv_mid(a, b, x);
      P += coeff * (0.75 * (l.v + r.v) + 0.25 * m.v);
      Px += coeff * (0.75 * (l.d + r.d) + 0.25 * m.d);
    }
  }
  return {P, Px};
}

std::pair<double, double> peakons_slopes_at(std::span<const double> q,
                                            std::span<const double> p,
                                            double x) {
  if (q.size() != p.size()) {
    throw std::invalid_argument("peakons_slopes_at: size mismatch");
  }
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double e = p[i] * std::exp(-std::abs(x - q[i]));
    left += x <= q[i] ? e : -e;
    right += x < q[i] ? e : -e;
  }
  return {left, right};
}

std::vector<WaveProfile> time_reverse(const std::vector<WaveProfile>& traj,
                                      double T) {
  if (traj.empty()) {
    throw std::invalid_argument("time_reverse: empty trajectory");
  }
  double t_min = traj.front().time_stamp(), t_max = t_min;
  for (const auto& p : traj) {
    t_min = std::min(t_min, p.time_stamp());
    t_max = std::max(t_max, p.time_stamp());
  }
  const double slack = 1e-9 * std::max(1.0, T);
  if (t_min > slack || t_max < T - slack) {
    throw std::invalid_argument("time_reverse: trajectory does not cover [0,T]");
  }
  std::vector<WaveProfile> out;
  out.reserve(traj.size());
  for (auto it = traj.rbegin(); it != traj.rend(); ++it) {
    const double tb = T - it->time_stamp();
    if (tb < 0.0) continue;
    std::vector<double> vals = it->values();
    for (double& v : vals) v = -v;
    out.emplace_back(it->nodes(), std::move(vals), tb);
  }
  return out;
}

}  // namespace chlab
