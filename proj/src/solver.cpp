#include "chlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <list>
#include <mutex>
#include <ostream>
#include <sstream>
#include <variant>

#include "chlab/ode.hpp"

namespace chlab {

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::ExactPeakonAntipeakon: return "ExactPeakonAntipeakon";
    case SourceKind::SinglePeakon: return "SinglePeakon";
    case SourceKind::Zero: return "Zero";
    case SourceKind::Multipeakon: return "Multipeakon";
    case SourceKind::Reversed: return "Reversed";
    case SourceKind::FromFile: return "FromFile";
  }
  return "FromFile";
}

SourceKind source_kind_from_string(const std::string& name) {
  if (name == "ExactPeakonAntipeakon") return SourceKind::ExactPeakonAntipeakon;
  if (name == "SinglePeakon") return SourceKind::SinglePeakon;
  if (name == "Zero") return SourceKind::Zero;
  if (name == "Multipeakon") return SourceKind::Multipeakon;
  if (name == "Reversed") return SourceKind::Reversed;
  if (name == "FromFile") return SourceKind::FromFile;
  throw std::invalid_argument("unknown source kind: " + name);
}

// ---------------------------------------------------------------------------
// Profile cache

struct Solution::Cache {
  static constexpr std::size_t capacity = 64;
  std::mutex mutex;
  std::list<std::pair<double, std::shared_ptr<const WaveProfile>>> lru;
};

Solution::Solution() : cache_(std::make_shared<Cache>()) {}
Solution::~Solution() = default;

void Solution::check_span(double t) const {
  const double slack = 1e-9 * std::max(1.0, t_end());
  if (t < -slack || t > t_end() + slack) {
    throw OutOfSpan("time " + std::to_string(t) + " outside span [0, " +
                    std::to_string(t_end()) + "]");
  }
}

std::shared_ptr<const WaveProfile> Solution::cached_profile(double t) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    for (auto it = cache_->lru.begin(); it != cache_->lru.end(); ++it) {
      if (it->first == t) {
        cache_->lru.splice(cache_->lru.begin(), cache_->lru, it);
        return it->second;
      }
    }
  }
  // The cache feeds pointwise evaluation and the P convolution, so it uses
  // a finer mesh than plain snapshots.
  auto profile =
      std::make_shared<const WaveProfile>(profile_at(t, MeshRequest{}.refined(4.0)));
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->lru.emplace_front(t, profile);
  if (cache_->lru.size() > Cache::capacity) cache_->lru.pop_back();
  return profile;
}

double Solution::u_at(double t, double x) const {
  return cached_profile(t)->value_at(x);
}

std::pair<double, double> Solution::P_at(double t, double x) const {
  return convolve_P_at(*cached_profile(t), x);
}

std::pair<double, double> Solution::slopes_at(double t, double x) const {
  return cached_profile(t)->one_sided_slopes(x);
}

// ---------------------------------------------------------------------------
// Closed-form generators

namespace {

class ZeroSolution final : public Solution {
 public:
  explicit ZeroSolution(double t_end) : t_end_(t_end) {}
  SourceKind kind() const override { return SourceKind::Zero; }
  double t_end() const override { return t_end_; }
  WaveProfile profile_at(double t, const MeshRequest&) const override {
    check_span(t);
    return WaveProfile({-1.0, 1.0}, {0.0, 0.0}, std::max(t, 0.0));
  }
  double u_at(double, double) const override { return 0.0; }
  std::pair<double, double> P_at(double, double) const override {
    return {0.0, 0.0};
  }
  std::pair<double, double> slopes_at(double, double) const override {
    return {0.0, 0.0};
  }

 private:
  double t_end_;
};

class SinglePeakonSolution final : public Solution {
 public:
  SinglePeakonSolution(double c, double t_end) : c_(c), t_end_(t_end) {}
  SourceKind kind() const override { return SourceKind::SinglePeakon; }
  double t_end() const override { return t_end_; }
  WaveProfile profile_at(double t, const MeshRequest& mesh) const override {
    check_span(t);
    return single_peakon(c_, std::max(t, 0.0), mesh);
  }
  double u_at(double t, double x) const override {
    return single_peakon_value(c_, t, x);
  }
  std::pair<double, double> P_at(double t, double x) const override {
    const double q = c_ * std::clamp(t, 0.0, t_end_);
    return peakons_P_at({&q, 1}, {&c_, 1}, x);
  }
  std::pair<double, double> slopes_at(double t, double x) const override {
    const double q = c_ * std::clamp(t, 0.0, t_end_);
    return peakons_slopes_at({&q, 1}, {&c_, 1}, x);
  }

 private:
  double c_;
  double t_end_;
};

class ExactPeakonAntipeakonSolution final : public Solution {
 public:
  ExactPeakonAntipeakonSolution(const PeakonAntipeakonParams& p, double t_end)
      : params_(p), t_end_(t_end) {}
  SourceKind kind() const override {
    return SourceKind::ExactPeakonAntipeakon;
  }
  double t_end() const override { return t_end_; }
  WaveProfile profile_at(double t, const MeshRequest& mesh) const override {
    check_span(t);
    return peakon_antipeakon_profile(params_, std::max(t, 0.0), mesh);
  }
  double u_at(double t, double x) const override {
    return peakon_antipeakon_value(params_, std::max(t, 0.0), x);
  }
  std::pair<double, double> P_at(double t, double x) const override {
    const double T = params_.t_collision;
    double tau = std::max(t, 0.0);
    if (tau > T) tau = 2.0 * T - tau;  // P is even under the prolongation
    if (std::abs(tau - T) < 1e-13 * std::max(1.0, T)) return {0.0, 0.0};
    double p, q;
    pq_at(params_, tau, p, q);
    const double qs[2] = {0.5 * q, -0.5 * q};
    const double ps[2] = {0.5 * p, -0.5 * p};
    return peakons_P_at(qs, ps, x);
  }
  std::pair<double, double> slopes_at(double t, double x) const override {
    const double T = params_.t_collision;
    double tau = std::max(t, 0.0);
    double sign = 1.0;
    if (tau > T) {
      tau = 2.0 * T - tau;  // slopes flip with u under the prolongation
      sign = -1.0;
    }
    if (std::abs(tau - T) < 1e-13 * std::max(1.0, T)) return {0.0, 0.0};
    double p, q;
    pq_at(params_, tau, p, q);
    const double qs[2] = {0.5 * q, -0.5 * q};
    const double ps[2] = {0.5 * p, -0.5 * p};
    const auto [l, r] = peakons_slopes_at(qs, ps, x);
    return {sign * l, sign * r};
  }

 private:
  PeakonAntipeakonParams params_;
  double t_end_;
};

class ReversedSolution final : public Solution {
 public:
  ReversedSolution(SolutionHandle base, double T)
      : base_(std::move(base)), T_(T) {
    if (!base_ || T > base_->t_end() + 1e-9 * std::max(1.0, T)) {
      throw std::invalid_argument(
          "make_reversed: T must lie within the base span");
    }
  }
  SourceKind kind() const override { return SourceKind::Reversed; }
  double t_end() const override { return T_; }
  WaveProfile profile_at(double t, const MeshRequest& mesh) const override {
    check_span(t);
    t = std::clamp(t, 0.0, T_);
    WaveProfile fwd = base_->profile_at(T_ - t, mesh);
    std::vector<double> vals = fwd.values();
    for (double& v : vals) v = -v;
    return WaveProfile(fwd.nodes(), std::move(vals), t);
  }
  double u_at(double t, double x) const override {
    return -base_->u_at(T_ - std::clamp(t, 0.0, T_), x);
  }
  std::pair<double, double> P_at(double t, double x) const override {
    // P depends on u^2 and u_x^2 only, so negation leaves it unchanged
    return base_->P_at(T_ - std::clamp(t, 0.0, T_), x);
  }
  std::pair<double, double> slopes_at(double t, double x) const override {
    const auto [l, r] = base_->slopes_at(T_ - std::clamp(t, 0.0, T_), x);
    return {-l, -r};
  }

 private:
  SolutionHandle base_;
  double T_;
};

class FromFramesSolution final : public Solution {
 public:
  FromFramesSolution(std::vector<WaveProfile> frames, SourceKind kind)
      : frames_(std::move(frames)), kind_(kind) {
    if (frames_.empty()) {
      throw std::invalid_argument("make_from_frames: no frames");
    }
    std::sort(frames_.begin(), frames_.end(),
              [](const WaveProfile& a, const WaveProfile& b) {
                return a.time_stamp() < b.time_stamp();
              });
  }
  SourceKind kind() const override { return kind_; }
  double t_end() const override { return frames_.back().time_stamp(); }
  WaveProfile profile_at(double t, const MeshRequest&) const override {
    check_span(t);
    const double slack = 1e-12 * std::max(1.0, t_end());
    if (t <= frames_.front().time_stamp() + slack) return frames_.front();
    if (t >= frames_.back().time_stamp() - slack) return frames_.back();
    std::size_t hi = 1;
    while (frames_[hi].time_stamp() < t) ++hi;
    const WaveProfile& f0 = frames_[hi - 1];
    const WaveProfile& f1 = frames_[hi];
    if (std::abs(f0.time_stamp() - t) <= slack) return f0;
    if (std::abs(f1.time_stamp() - t) <= slack) return f1;
    const double lam =
        (t - f0.time_stamp()) / (f1.time_stamp() - f0.time_stamp());
    std::vector<double> nodes;
    nodes.reserve(f0.nodes().size() + f1.nodes().size());
    std::merge(f0.nodes().begin(), f0.nodes().end(), f1.nodes().begin(),
               f1.nodes().end(), std::back_inserter(nodes));
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<double> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      vals[i] = (1.0 - lam) * f0.value_at(nodes[i]) +
                lam * f1.value_at(nodes[i]);
    }
    return WaveProfile(std::move(nodes), std::move(vals), t);
  }

 private:
  std::vector<WaveProfile> frames_;
  SourceKind kind_;
};

}  // namespace

SolutionHandle make_zero_solution(double t_end) {
  return SolutionHandle(std::make_shared<ZeroSolution>(t_end));
}

SolutionHandle make_single_peakon(double c, double t_end) {
  return SolutionHandle(std::make_shared<SinglePeakonSolution>(c, t_end));
}

SolutionHandle make_exact_peakon_antipeakon(const PeakonAntipeakonParams& p,
                                            double t_end) {
  return SolutionHandle(
      std::make_shared<ExactPeakonAntipeakonSolution>(p, t_end));
}

SolutionHandle make_reversed(SolutionHandle base, double T) {
  return SolutionHandle(
      std::make_shared<ReversedSolution>(std::move(base), T));
}

SolutionHandle make_from_frames(std::vector<WaveProfile> frames,
                                SourceKind original_kind) {
  return SolutionHandle(
      std::make_shared<FromFramesSolution>(std::move(frames), original_kind));
}

// ---------------------------------------------------------------------------
// Multipeakon

namespace {

// y = [q_0..q_{N-1}, p_0..p_{N-1}]
void peakon_rhs(const std::vector<double>& y, std::vector<double>& dy) {
  const std::size_t n = y.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    double dq = 0.0, dp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = y[i] - y[j];
      const double e = std::exp(-std::abs(d));
      dq += y[n + j] * e;
      if (d > 0.0) {
        dp += y[n + j] * e;
      } else if (d < 0.0) {
        dp -= y[n + j] * e;
      }
    }
    dy[i] = dq;
    dy[n + i] = y[n + i] * dp;
  }
}

double min_gap(const std::vector<double>& y, std::size_t n) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      g = std::min(g, std::abs(y[i] - y[j]));
    }
  }
  return g;
}

// True when the closest pair is still approaching each other.
bool approaching(const std::vector<double>& y, std::size_t n) {
  if (n < 2) return false;
  std::size_t bi = 0, bj = 1;
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(y[i] - y[j]) < g) {
        g = std::abs(y[i] - y[j]);
        bi = i;
        bj = j;
      }
    }
  }
  std::vector<double> dy(y.size());
  peakon_rhs(y, dy);
  const double rel = (y[bj] - y[bi]) * (dy[bj] - dy[bi]);
  return rel < 0.0;  // gap shrinking
}

struct OdeSeg {
  double t0, t1;
  OdeSolution sol;
};

struct ExactSeg {
  double t0, t1;
  PeakonAntipeakonParams params;  // local time is t - t0
};

using Segment = std::variant<OdeSeg, ExactSeg>;

class MultipeakonSolution final : public Solution {
 public:
  MultipeakonSolution(std::vector<Segment> segs, std::size_t n, double t_end)
      : segs_(std::move(segs)), n_(n), t_end_(t_end) {}

  SourceKind kind() const override { return SourceKind::Multipeakon; }
  double t_end() const override { return t_end_; }

  WaveProfile profile_at(double t, const MeshRequest& mesh) const override {
    check_span(t);
    t = std::clamp(t, 0.0, t_end_);
    const Segment& seg = locate(t);
    if (const auto* e = std::get_if<ExactSeg>(&seg)) {
      WaveProfile local =
          peakon_antipeakon_profile(e->params, t - e->t0, mesh);
      return WaveProfile(local.nodes(), local.values(), t);
    }
    const auto& o = std::get<OdeSeg>(seg);
    const std::vector<double> y = o.sol.at(t);
    std::vector<double> crests(y.begin(), y.begin() + n_);
    std::sort(crests.begin(), crests.end());
    double pmax = 1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      pmax = std::max(pmax, std::abs(y[n_ + i]));
    }
    const double tail = std::log(pmax / mesh.tail_cut) + 1.0;
    double scale = 1.0;
    if (n_ >= 2) scale = std::max(min_gap(y, n_), 1e-12);
    auto nodes = build_graded_mesh(crests, scale, crests.front() - tail,
                                   crests.back() + tail, mesh);
    std::vector<double> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double u = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        u += y[n_ + j] * std::exp(-std::abs(nodes[i] - y[j]));
      }
      vals[i] = u;
    }
    return WaveProfile(std::move(nodes), std::move(vals), t);
  }

  double u_at(double t, double x) const override {
    t = std::clamp(t, 0.0, t_end_);
    const Segment& seg = locate(t);
    if (const auto* e = std::get_if<ExactSeg>(&seg)) {
      return peakon_antipeakon_value(e->params, t - e->t0, x);
    }
    const auto& o = std::get<OdeSeg>(seg);
    const std::vector<double> y = o.sol.at(t);
    double u = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      u += y[n_ + j] * std::exp(-std::abs(x - y[j]));
    }
    return u;
  }

  std::pair<double, double> P_at(double t, double x) const override {
    const std::vector<double> y = state_at(std::clamp(t, 0.0, t_end_));
    return peakons_P_at({y.data(), n_}, {y.data() + n_, n_}, x);
  }
  std::pair<double, double> slopes_at(double t, double x) const override {
    const std::vector<double> y = state_at(std::clamp(t, 0.0, t_end_));
    return peakons_slopes_at({y.data(), n_}, {y.data() + n_, n_}, x);
  }

  std::vector<double> state_at(double t) const {
    const Segment& seg = locate(t);
    if (const auto* o = std::get_if<OdeSeg>(&seg)) return o->sol.at(t);
    const auto& e = std::get<ExactSeg>(seg);
    double p, q;
    const double tau = t - e.t0;
    const double T = e.params.t_collision;
    const double sign = tau <= T ? 1.0 : -1.0;
    pq_at(e.params, tau <= T ? tau : 2.0 * T - tau, p, q);
    return {0.5 * q, -0.5 * q, sign * 0.5 * p, -sign * 0.5 * p};
  }

 private:
  const Segment& locate(double t) const {
    for (const Segment& s : segs_) {
      const double t1 = std::visit([](const auto& x) { return x.t1; }, s);
      if (t <= t1) return s;
    }
    return segs_.back();
  }

  std::vector<Segment> segs_;
  std::size_t n_;
  double t_end_;
};

}  // namespace

MultipeakonState multipeakon_step(const MultipeakonState& state, double dt,
                                  const MultipeakonOptions& opts) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("multipeakon_step: dt must be > 0");
  }
  const std::size_t n = state.q.size();
  if (n == 0 || state.p.size() != n) {
    throw std::invalid_argument("multipeakon_step: inconsistent state");
  }
  std::vector<double> y(2 * n);
  std::copy(state.q.begin(), state.q.end(), y.begin());
  std::copy(state.p.begin(), state.p.end(), y.begin() + n);

  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  oo.initial_step = std::min(dt, 1e-3);
  const auto rhs = [](double, const std::vector<double>& yv,
                      std::vector<double>& dyv) { peakon_rhs(yv, dyv); };
  const auto observer = [&](double, const std::vector<double>& yv) {
    return !(n >= 2 && min_gap(yv, n) < opts.gap_floor && approaching(yv, n));
  };
  const OdeSolution sol =
      integrate(rhs, std::move(y), state.t, state.t + dt, oo, observer);
  if (sol.halted_by_observer()) {
    throw CollisionImminent("multipeakon_step: pairwise gap below gap_floor");
  }
  MultipeakonState out;
  out.t = state.t + dt;
  const std::vector<double> ye = sol.at(out.t);
  out.q.assign(ye.begin(), ye.begin() + n);
  out.p.assign(ye.begin() + n, ye.end());
  return out;
}

SolutionHandle make_multipeakon(const MultipeakonState& initial, double t_end,
                                const MultipeakonOptions& opts) {
  const std::size_t n = initial.q.size();
  if (n == 0 || initial.p.size() != n) {
    throw std::invalid_argument("make_multipeakon: inconsistent state");
  }
  if (!(t_end > initial.t)) {
    throw std::invalid_argument("make_multipeakon: t_end must exceed t0");
  }

  std::vector<Segment> segs;
  std::vector<double> y(2 * n);
  std::copy(initial.q.begin(), initial.q.end(), y.begin());
  std::copy(initial.p.begin(), initial.p.end(), y.begin() + n);
  double t_cur = initial.t;

  const auto rhs = [](double, const std::vector<double>& yv,
                      std::vector<double>& dyv) { peakon_rhs(yv, dyv); };
  const auto observer = [&](double, const std::vector<double>& yv) {
    return !(n >= 2 && min_gap(yv, n) < opts.gap_floor && approaching(yv, n));
  };

  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;

  while (t_cur < t_end) {
    OdeSolution sol = integrate(rhs, y, t_cur, t_end, oo, observer);
    const bool halted = sol.halted_by_observer();
    const double t_halt = sol.t_end();
    y = sol.nodes().back().y;
    segs.push_back(OdeSeg{t_cur, t_halt, std::move(sol)});
    t_cur = t_halt;
    if (!halted) break;

    // Only the antisymmetric two-peakon collision has a conservative
    // closed-form continuation; anything else is unsupported.
    const double scale = std::max({std::abs(y[2]), std::abs(y[3]), 1.0});
    const bool antisym = n == 2 && std::abs(y[0] + y[1]) < 1e-7 &&
                         std::abs(y[2] + y[3]) < 1e-7 * scale;
    if (!antisym) {
      throw CollisionImminent(
          "make_multipeakon: collision without a conservative continuation "
          "(only the antisymmetric two-peakon case is supported)");
    }
    const std::size_t left = y[0] < y[1] ? 0 : 1;
    const double p_state = 2.0 * y[2 + left];
    const double q_state = 2.0 * y[left];
    const auto params = derive_params(p_state, q_state);
    const double t_exit = t_cur + 2.0 * params.t_collision;
    segs.push_back(ExactSeg{t_cur, std::min(t_exit, t_end), params});
    if (t_exit >= t_end) {
      t_cur = t_end;
      break;
    }
    // Conservative continuation exits the collision window with the same
    // positions and negated momenta.
    y[2] = -y[2];
    y[3] = -y[3];
    t_cur = t_exit;
  }

  return SolutionHandle(
      std::make_shared<MultipeakonSolution>(std::move(segs), n, t_end));
}

// ---------------------------------------------------------------------------
// Energy bound

double energy_sup(SolutionHandle& handle, std::span<const double> sample_times,
                  const KernelSpec& spec) {
  if (sample_times.empty()) {
    throw std::invalid_argument("energy_sup: no sample times");
  }
  double c = 0.0;
  for (const double t : sample_times) {
    const EnergySplit e = total_energy(*handle->cached_profile(t));
    c = std::max(c, spec.a * e.e_u + spec.b * (e.e_plus + e.e_minus));
  }
  handle.energy_sup_value = c;
  return c;
}

// ---------------------------------------------------------------------------
// Trajectory files

void write_trajectory(std::ostream& os, SourceKind kind, double t_end,
                      const std::vector<WaveProfile>& frames) {
  os << "# source=" << to_string(kind) << " T_end=" << t_end << '\n';
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i) os << '\n';
    write_profile_csv(os, frames[i]);
  }
}

Trajectory read_trajectory(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# source=", 0) != 0) {
    throw std::runtime_error("read_trajectory: missing source header");
  }
  const std::size_t sp = header.find(" T_end=");
  if (sp == std::string::npos) {
    throw std::runtime_error("read_trajectory: missing T_end in header");
  }
  Trajectory traj;
  traj.kind = source_kind_from_string(header.substr(9, sp - 9));
  traj.t_end = std::strtod(header.c_str() + sp + 7, nullptr);

  std::string block, line;
  std::vector<WaveProfile> frames;
  const auto flush = [&]() {
    if (block.find_first_not_of(" \t\r\n") == std::string::npos) {
      block.clear();
      return;
    }
    std::istringstream bs(block);
    frames.push_back(read_profile_csv(bs));
    block.clear();
  };
  while (std::getline(is, line)) {
    if (line.empty()) {
      flush();
    } else {
      block += line;
      block += '\n';
    }
  }
  flush();
  if (frames.empty()) {
    throw std::runtime_error("read_trajectory: no profile blocks");
  }
  traj.frames = std::move(frames);
  return traj;
}

}  // namespace chlab
