#include "chlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace chlab {

EnergyLedger ledger(const SolutionHandle& handle, const Characteristic& alpha,
                    const Characteristic& beta, std::span<const double> times,
                    const MeshRequest& mesh) {
  EnergyLedger out;
  for (const double t : times) {
    const double a = alpha.x_at(t);
    const double b = beta.x_at(t);
    if (b < a) {
      throw WindowInverted("ledger: beta(t) < alpha(t) at t = " +
                           std::to_string(t));
    }
    const WaveProfile profile = handle->profile_at(t, mesh);
    const EnergySplit e = energy_split(profile, a, b);
    out.times.push_back(t);
    out.e_plus.push_back(e.e_plus);
    out.e_minus.push_back(e.e_minus);
    out.e_u.push_back(e.e_u);
  }
  return out;
}

OneSidedLimit one_sided_limit(const std::function<double(double)>& series,
                              double at, LimitSide side, double delta,
                              int K) {
  if (K < 6) {
    throw InsufficientSamples("one_sided_limit: need K >= 6 approach levels");
  }
  if (!(delta > 0.0)) {
    throw InsufficientSamples("one_sided_limit: delta must be > 0");
  }
  const double sgn = side == LimitSide::Right ? 1.0 : -1.0;
  std::vector<double> f(static_cast<std::size_t>(K) + 1);
  double scale = 0.0;
  for (int k = 0; k <= K; ++k) {
    f[k] = series(at + sgn * std::ldexp(delta, -k));
    scale = std::max(scale, std::abs(f[k]));
  }
  const double floor = 1e-11 * scale + 1e-14;

  std::vector<double> d(f.size() - 1);
  for (std::size_t k = 0; k + 1 < f.size(); ++k) d[k] = f[k + 1] - f[k];
  int last = -1;  // last difference above the hard floor
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::abs(d[k]) > floor) last = static_cast<int>(k);
  }

  OneSidedLimit out{at, side, f.back(), 0.0, 0.0};
  if (last < 0) {  // constant to within noise
    out.uncertainty = floor;
    return out;
  }

  // Pick the level where the differences bottom out: the first one within
  // 50% of the smallest significant difference. Later levels are treated
  // as an empirical noise plateau (mesh resolution etc.). This also rides
  // out an isolated jump inside the approach window, as long as enough
  // decaying levels remain beyond it.
  double dmin = std::abs(d[0]);
  for (int k = 1; k <= last; ++k) dmin = std::min(dmin, std::abs(d[k]));
  int m = 0;
  while (std::abs(d[m]) > 1.5 * dmin + floor) ++m;
  double noise = floor;
  for (int k = m + 1; k <= last; ++k) {
    noise = std::max(noise, std::abs(d[k]));
  }
  double dmax = 0.0;
  for (int k = 0; k <= last; ++k) dmax = std::max(dmax, std::abs(d[k]));
  const bool decaying =
      m >= 2 && std::abs(d[m]) <= 0.95 * std::abs(d[m - 1]) + floor &&
      std::abs(d[m - 1]) <= 0.95 * std::abs(d[m - 2]) + floor;
  if (!decaying || noise > 0.05 * dmax + floor) {
    throw NonCauchy("one_sided_limit: successive differences fail to decay");
  }
  const double ratio = std::abs(d[m] / d[m - 1]);
  const double r = std::min(ratio, 0.95);
  out.value = f[m + 1] - d[m] * d[m] / (d[m] - d[m - 1]);
  out.convergence_order_estimate = -std::log2(std::max(ratio, 1e-12));
  out.uncertainty = std::abs(d[m]) * r / (1.0 - r) + noise;
  return out;
}

// ---------------------------------------------------------------------------
// Step functions

double StepFunction::value_at(double x) const {
  if (empty()) return 0.0;
  if (x < breakpoints.front() || x >= breakpoints.back()) return 0.0;
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return coefficients[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

StepFunction StepFunction::indicator(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("indicator: requires b > a");
  return StepFunction{{a, b}, {1.0}};
}

StepFunction step_approximate(const std::function<double(double)>& phi,
                              double a, double b, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("step_approximate: eps must be > 0");
  }
  if (!(b > a)) {
    throw std::invalid_argument("step_approximate: requires b > a");
  }
  const auto level = [&](double x) -> long {
    return std::lround(phi(x) / eps);
  };

  const int grid = 4096;
  std::vector<double> bps;
  std::vector<long> levels;
  double x_prev = a;
  long l_prev = level(a);
  bps.push_back(a);
  levels.push_back(l_prev);
  for (int i = 1; i <= grid; ++i) {
    const double x = a + (b - a) * i / grid;
    long l = level(x);
    if (l != l_prev) {
      // bisect to the change point
      double lo = x_prev, hi = x;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (level(mid) == l_prev) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      bps.push_back(hi);
      levels.push_back(level(hi));
      l_prev = levels.back();
    }
    x_prev = x;
  }
  bps.push_back(b);

  // Trim zero-coefficient intervals at both ends.
  std::size_t first = 0, last = levels.size();
  while (first < last && levels[first] == 0) ++first;
  while (last > first && levels[last - 1] == 0) --last;
  StepFunction out;
  if (first == last) return out;
  out.breakpoints.assign(bps.begin() + first, bps.begin() + last + 1);
  for (std::size_t i = first; i < last; ++i) {
    out.coefficients.push_back(eps * static_cast<double>(levels[i]));
  }
  return out;
}

EnergySplit weighted_split(const WaveProfile& profile,
                           const StepFunction& phi) {
  EnergySplit acc;
  for (std::size_t i = 0; i < phi.coefficients.size(); ++i) {
    const double c = phi.coefficients[i];
    if (c == 0.0) continue;
    const EnergySplit e =
        energy_split(profile, phi.breakpoints[i], phi.breakpoints[i + 1]);
    acc.e_plus += c * e.e_plus;
    acc.e_minus += c * e.e_minus;
    acc.e_u += c * e.e_u;
  }
  return acc;
}

EnergySplit weighted_split(const WaveProfile& profile,
                           const std::function<double(double)>& phi, double a,
                           double b) {
  EnergySplit acc;
  const auto& x = profile.nodes();
  const auto& u = profile.values();
  for (std::size_t c = 0; c < profile.cell_count(); ++c) {
    const double lo = std::max(a, x[c]);
    const double hi = std::min(b, x[c + 1]);
    const double w = hi - lo;
    if (w <= 0.0) continue;
    const double s = profile.slope(c);
    const double ul = u[c] + s * (lo - x[c]);
    const double ur = u[c] + s * (hi - x[c]);
    const double um = 0.5 * (ul + ur);
    const double pl = phi(lo), pm = phi(0.5 * (lo + hi)), pr = phi(hi);
    const double phi_int = w * (pl + 4.0 * pm + pr) / 6.0;  // Simpson
    const double u2_int =
        w * (pl * ul * ul + 4.0 * pm * um * um + pr * ur * ur) / 6.0;
    acc.e_u += u2_int;
    if (s > 0.0) {
      acc.e_plus += s * s * phi_int;
    } else if (s < 0.0) {
      acc.e_minus += s * s * phi_int;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// mu / nu measures

std::pair<MeasureReport, MeasureReport> mu_atoms(
    const SolutionHandle& handle, const StepFunction& phi,
    std::span<const double> t_candidates, const MuOptions& opts) {
  MeasureReport mu_plus, mu_minus;
  const double span = handle->t_end();
  const auto f_plus = [&](double s) {
    return weighted_split(handle->profile_at(s, opts.mesh), phi).e_plus;
  };
  const auto f_minus = [&](double s) {
    return weighted_split(handle->profile_at(s, opts.mesh), phi).e_minus;
  };

  for (const double t : t_candidates) {
    {  // mu^+: right limit - value
      const double room = span - t;
      const double delta = std::min(opts.delta, 0.9 * room);
      if (delta > 1e-12) {
        const OneSidedLimit lim =
            one_sided_limit(f_plus, t, LimitSide::Right, delta, opts.K);
        const double mass = lim.value - f_plus(t);
        if (std::abs(mass) >= opts.noise_factor * lim.uncertainty) {
          mu_plus.atoms.push_back({t, mass, lim.uncertainty});
          mu_plus.total_variation += std::abs(mass);
        }
      }
    }
    {  // mu^-: value - left limit
      const double delta = std::min(opts.delta, 0.9 * t);
      if (delta > 1e-12) {
        const OneSidedLimit lim =
            one_sided_limit(f_minus, t, LimitSide::Left, delta, opts.K);
        const double mass = f_minus(t) - lim.value;
        if (std::abs(mass) >= opts.noise_factor * lim.uncertainty) {
          mu_minus.atoms.push_back({t, mass, lim.uncertainty});
          mu_minus.total_variation += std::abs(mass);
        }
      }
    }
  }
  return {std::move(mu_plus), std::move(mu_minus)};
}

MeasureReport nu_measure(const SolutionHandle& handle, const StepFunction& phi,
                         int sign, std::span<const double> time_grid,
                         const MeshRequest& mesh) {
  if (time_grid.size() < 2) {
    throw InsufficientSamples("nu_measure: need at least two grid times");
  }
  if (!std::is_sorted(time_grid.begin(), time_grid.end())) {
    throw std::invalid_argument("nu_measure: time grid must increase");
  }
  const auto f = [&](double s) {
    const EnergySplit e = weighted_split(handle->profile_at(s, mesh), phi);
    return sign >= 0 ? e.e_plus : e.e_minus;
  };
  MeasureReport rep;
  double prev = f(time_grid[0]);
  for (std::size_t i = 1; i < time_grid.size(); ++i) {
    const double cur = f(time_grid[i]);
    rep.bins.push_back({time_grid[i - 1], time_grid[i], cur - prev});
    rep.total_variation += std::abs(cur - prev);
    prev = cur;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// BV lower bound

namespace {

// sup |u|^2 and sup P over a few snapshots.
void sup_constants(const SolutionHandle& handle, double t1, double t2,
                   const MeshRequest& mesh, double& sup_u2, double& sup_P) {
  sup_u2 = 0.0;
  sup_P = 0.0;
  for (const double t : {t1, 0.5 * (t1 + t2), t2}) {
    const WaveProfile profile = handle->profile_at(t, mesh);
    for (const double v : profile.values()) {
      sup_u2 = std::max(sup_u2, v * v);
    }
    std::vector<double> queries;
    for (std::size_t i = 0; i < profile.nodes().size(); i += 8) {
      queries.push_back(profile.nodes()[i]);
    }
    for (const auto& [P, Px] : convolve_P(profile, queries)) {
      sup_P = std::max(sup_P, P);
    }
  }
}

}  // namespace

BvReport bv_lower_bound_check(const SolutionHandle& handle,
                              const Characteristic& alpha,
                              const Characteristic& beta, double t1, double t2,
                              const KernelSpec& spec, double C,
                              const MeshRequest& mesh) {
  if (!(0.0 < t1 && t1 < t2)) {
    throw std::invalid_argument("bv_lower_bound_check: requires 0 < t1 < t2");
  }
  const double lc = std::max(spec.L * C, 1e-300);
  const double sqlc = std::sqrt(lc);
  double sup_u2, sup_P;
  sup_constants(handle, t1, t2, mesh, sup_u2, sup_P);

  const double v4 = 4.0 * (sup_u2 + sup_P);
  const double dt_eps =
      (std::atan(v4 / sqlc) - std::atan(v4 / (2.0 * sqlc))) / sqlc;
  const double dt = t2 - t1;
  if (dt > dt_eps) {
    throw RegimeViolated("bv_lower_bound_check: t2 - t1 exceeds " +
                         std::to_string(dt_eps));
  }
  const double v_tilde = std::max(sqlc, v4 + sup_u2);
  const double k_slack =
      2.0 * v_tilde * (sup_u2 + sup_P) * std::exp(dt * v_tilde);

  const WaveProfile prof1 = handle->profile_at(t1, mesh);
  const WaveProfile prof2 = handle->profile_at(t2, mesh);
  const double a1 = alpha.x_at(t1), b1 = beta.x_at(t1);
  const double a2 = alpha.x_at(t2), b2 = beta.x_at(t2);
  if (b1 < a1 || b2 < a2) {
    throw WindowInverted("bv_lower_bound_check: window inverted");
  }
  const EnergySplit e1 = energy_split(prof1, a1, b1);
  const EnergySplit e2 = energy_split(prof2, a2, b2);

  BvReport rep;
  rep.lhs = e2.e_plus;
  rep.rhs = e1.e_plus -
            dt * (k_slack * (b1 - a1) + e1.e_plus + e1.e_minus);
  rep.slack = rep.lhs - rep.rhs;
  rep.k_slack = k_slack;
  rep.dt_eps = dt_eps;
  rep.ok = rep.lhs >= rep.rhs - 1e-12 * std::max(1.0, std::abs(rep.rhs));
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

void write_ledger_csv(std::ostream& os, const EnergyLedger& l) {
  os.precision(17);
  os << "t,e_plus,e_minus\n";
  for (std::size_t i = 0; i < l.times.size(); ++i) {
    os << l.times[i] << ',' << l.e_plus[i] << ',' << l.e_minus[i] << '\n';
  }
}

EnergyLedger read_ledger_csv(std::istream& is) {
  EnergyLedger l;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
    char* end = nullptr;
    const double t = std::strtod(line.c_str(), &end);
    if (*end != ',') throw std::runtime_error("read_ledger_csv: bad row");
    const double ep = std::strtod(end + 1, &end);
    if (*end != ',') throw std::runtime_error("read_ledger_csv: bad row");
    const double em = std::strtod(end + 1, nullptr);
    l.times.push_back(t);
    l.e_plus.push_back(ep);
    l.e_minus.push_back(em);
    l.e_u.push_back(0.0);
  }
  return l;
}

void write_measure_json(std::ostream& os, const MeasureReport& report) {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : report.atoms) {
    j["atoms"].push_back(
        {{"t", a.t}, {"mass", a.mass}, {"uncertainty", a.uncertainty}});
  }
  j["bins"] = nlohmann::json::array();
  for (const auto& b : report.bins) {
    j["bins"].push_back(
        {{"t0", b.t0}, {"t1", b.t1}, {"increment", b.increment}});
  }
  j["total_variation"] = report.total_variation;
  os << j.dump(2) << '\n';
}

MeasureReport read_measure_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  MeasureReport rep;
  for (const auto& a : j.at("atoms")) {
    rep.atoms.push_back({a.at("t").get<double>(), a.at("mass").get<double>(),
                         a.value("uncertainty", 0.0)});
  }
  for (const auto& b : j.at("bins")) {
    rep.bins.push_back({b.at("t0").get<double>(), b.at("t1").get<double>(),
                        b.at("increment").get<double>()});
  }
  rep.total_variation = j.at("total_variation").get<double>();
  return rep;
}

}  // namespace chlab
