#include "chlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "chlab/simd_energy.hpp"

namespace chlab {

WaveProfile::WaveProfile(std::vector<double> nodes, std::vector<double> values,
                         double time_stamp)
    : nodes_(std::move(nodes)), values_(std::move(values)),
      time_stamp_(time_stamp) {
  if (nodes_.size() < 2 || nodes_.size() != values_.size()) {
    throw std::invalid_argument("WaveProfile: need >= 2 nodes with values");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("WaveProfile: nodes must strictly increase");
    }
  }
  if (!(time_stamp_ >= 0.0)) {
    throw std::invalid_argument("WaveProfile: time_stamp must be >= 0");
  }
}

double WaveProfile::slope(std::size_t cell) const {
  if (cell >= cell_count()) {
    throw std::out_of_range("WaveProfile::slope: cell index out of range");
  }
  return (values_[cell + 1] - values_[cell]) / (nodes_[cell + 1] - nodes_[cell]);
}

double WaveProfile::value_at(double x) const {
  if (x <= nodes_.front() || x >= nodes_.back()) {
    if (x == nodes_.front()) return values_.front();
    if (x == nodes_.back()) return values_.back();
    return 0.0;
  }
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double lam = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + lam * (values_[i + 1] - values_[i]);
}

std::pair<double, double> WaveProfile::one_sided_slopes(double x) const {
  if (x < nodes_.front() || x > nodes_.back()) return {0.0, 0.0};
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  if (i < nodes_.size() && nodes_[i] == x) {
    const double left = i == 0 ? 0.0 : slope(i - 1);
    const double right = i == cell_count() ? 0.0 : slope(i);
    return {left, right};
  }
  const double s = slope(i - 1);
  return {s, s};
}

namespace {

// int over [l,r] (a subinterval of one cell) of u^2, (u_x^+)^2, (u_x^-)^2.
void add_subcell(EnergySplit& acc, double l, double r, double ul, double ur) {
  const double w = r - l;
  if (w <= 0.0) return;
  acc.e_u += w * (ul * ul + ul * ur + ur * ur) / 3.0;
  const double d = ur - ul;
  if (d > 0.0) {
    acc.e_plus += d * d / w;
  } else if (d < 0.0) {
    acc.e_minus += d * d / w;
  }
}

}  // namespace

EnergySplit energy_split(const WaveProfile& profile, double alpha,
                         double beta) {
  if (beta < alpha) {
    throw std::invalid_argument("energy_split: window inverted");
  }
  EnergySplit acc;
  const auto& x = profile.nodes();
  const auto& u = profile.values();
  const double lo = std::max(alpha, x.front());
  const double hi = std::min(beta, x.back());
  if (lo >= hi) return acc;

  const std::size_t first =
      static_cast<std::size_t>(
          std::upper_bound(x.begin(), x.end(), lo) - x.begin()) - 1;
  const std::size_t last =
      static_cast<std::size_t>(
          std::lower_bound(x.begin(), x.end(), hi) - x.begin()) - 1;

  if (first == last) {
    const double s = profile.slope(first);
    add_subcell(acc, lo, hi, u[first] + s * (lo - x[first]),
                u[first] + s * (hi - x[first]));
    return acc;
  }

  {  // partial first cell
    const double s = profile.slope(first);
    add_subcell(acc, lo, x[first + 1], u[first] + s * (lo - x[first]),
                u[first + 1]);
  }
  if (last > first + 1) {  // whole interior cells, vectorized
    const std::size_t n = last - first - 1;
    std::vector<double> w(n), ul(n), ur(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t c = first + 1 + k;
      w[k] = x[c + 1] - x[c];
      ul[k] = u[c];
      ur[k] = u[c + 1];
    }
    const auto t = simd::energy_accum(w.data(), ul.data(), ur.data(), n);
    acc.e_u += t.e_u;
    acc.e_plus += t.e_plus;
    acc.e_minus += t.e_minus;
  }
  {  // partial last cell
    const double s = profile.slope(last);
    add_subcell(acc, x[last], hi, u[last],
                u[last] + s * (hi - x[last]));
  }
  return acc;
}

EnergySplit total_energy(const WaveProfile& profile) {
  return energy_split(profile, profile.x_min(), profile.x_max());
}

namespace {

// int_0^w e^{z-d} (c0 + c1 z + c2 z^2) dz, d >= w (cell left of the query).
double left_integral(double d, double w, double c0, double c1, double c2) {
  const auto F = [&](double z) {
    return std::exp(z - d) * (c2 * z * z + (c1 - 2.0 * c2) * z +
                              (c0 - c1 + 2.0 * c2));
  };
  return F(w) - F(0.0);
}

// int_0^w e^{-(d+z)} (c0 + c1 z + c2 z^2) dz, d >= 0 (cell right of query).
double right_integral(double d, double w, double c0, double c1, double c2) {
  const auto G = [&](double z) {
    return -std::exp(-(d + z)) * (c2 * z * z + (c1 + 2.0 * c2) * z +
                                  (c0 + c1 + 2.0 * c2));
  };
  return G(w) - G(0.0);
}

}  // namespace

std::vector<std::pair<double, double>> convolve_P(
    const WaveProfile& profile, std::span<const double> queries) {
  const auto& x = profile.nodes();
  const auto& u = profile.values();
  const std::size_t m = profile.cell_count();
  std::vector<double> sl(m);
  for (std::size_t c = 0; c < m; ++c) sl[c] = profile.slope(c);

  std::vector<std::pair<double, double>> out;
  out.reserve(queries.size());
  for (const double q : queries) {
    double i_left = 0.0, i_right = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const double a = x[c], b = x[c + 1];
      const double s = sl[c];
      const double w = b - a;
      const double ua = u[c];
      const double c2 = s * s;
      if (b <= q) {
        i_left += left_integral(q - a, w, ua * ua + 0.5 * c2, 2.0 * ua * s, c2);
      } else if (a >= q) {
        i_right +=
            right_integral(a - q, w, ua * ua + 0.5 * c2, 2.0 * ua * s, c2);
      } else {  // query inside the cell: split at q
        const double uq = ua + s * (q - a);
        i_left +=
            left_integral(q - a, q - a, ua * ua + 0.5 * c2, 2.0 * ua * s, c2);
        i_right +=
            right_integral(0.0, b - q, uq * uq + 0.5 * c2, 2.0 * uq * s, c2);
      }
    }
    out.emplace_back(0.5 * (i_left + i_right), 0.5 * (i_right - i_left));
  }
  return out;
}

std::pair<double, double> convolve_P_at(const WaveProfile& profile, double x) {
  return convolve_P(profile, std::span<const double>(&x, 1)).front();
}

double oleinik_ratio(const WaveProfile& profile) {
  if (!(profile.time_stamp() > 0.0)) {
    throw std::invalid_argument("oleinik_ratio: requires time_stamp > 0");
  }
  double max_slope = 0.0;
  for (std::size_t c = 0; c < profile.cell_count(); ++c) {
    max_slope = std::max(max_slope, profile.slope(c));
  }
  return max_slope / (1.0 + 1.0 / profile.time_stamp());
}

void write_profile_csv(std::ostream& os, const WaveProfile& profile) {
  char buf[64];
  const auto fmt = [&](double v) -> const char* {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    *res.ptr = '\0';
    return buf;
  };
  os << "# t=" << fmt(profile.time_stamp()) << '\n';
  os << "x,u\n";
  for (std::size_t i = 0; i < profile.nodes().size(); ++i) {
    os << fmt(profile.nodes()[i]);
    os << ',';
    os << fmt(profile.values()[i]);
    os << '\n';
  }
}

WaveProfile read_profile_csv(std::istream& is) {
  std::string line;
  double t = 0.0;
  std::vector<double> xs, us;
  bool have_t = false;
  while (std::getline(is, line)) {
    if (line.empty()) {
      if (!xs.empty()) break;  // blank line terminates a block
      continue;
    }
    if (line.rfind("# t=", 0) == 0) {
      t = std::strtod(line.c_str() + 4, nullptr);
      have_t = true;
      continue;
    }
    if (line[0] == '#' || line.rfind("x,u", 0) == 0) continue;
    const char* p = line.c_str();
    char* end = nullptr;
    const double xv = std::strtod(p, &end);
    if (end == p || *end != ',') {
      throw std::runtime_error("read_profile_csv: malformed row: " + line);
    }
    const double uv = std::strtod(end + 1, nullptr);
    xs.push_back(xv);
    us.push_back(uv);
  }
  if (!have_t || xs.size() < 2) {
    throw std::runtime_error("read_profile_csv: incomplete profile block");
  }
  return WaveProfile(std::move(xs), std::move(us), t);
}

}  // namespace chlab
