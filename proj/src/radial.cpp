#include "nlmp/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nlmp {

namespace {

constexpr double kNodeMatchTol = 1e-9;

// binomial coefficients of a small integer row
std::vector<double> binomial_row(int n) {
  std::vector<double> c(n + 1, 1.0);
  for (int j = 1; j <= n; ++j) c[j] = c[j - 1] * (n - j + 1) / j;
  return c;
}

// Integral over [x0 + ua, x0 + ub] of
//   (f0 + d01 (r - x0) + d012 (r - x0)(r - x1)) r^{N-1} dr
// expanded around x0 so that no large-moment cancellation occurs.
double newton_segment_integral(double x0, double h01, double f0, double d01, double d012,
                               double ua, double ub, const std::vector<double>& binom) {
  const int nm1 = static_cast<int>(binom.size()) - 1;
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  std::vector<double> x0pow(nm1 + 1);
  x0pow[0] = 1.0;
  for (int j = 1; j <= nm1; ++j) x0pow[j] = x0pow[j - 1] * x0;
  double ua_p = ua * ua, ub_p = ub * ub;  // u^{j+1} trackers start at j=0 -> u^1
  double ua1 = ua, ub1 = ub;
  for (int j = 0; j <= nm1; ++j) {
    const double c = binom[j] * x0pow[nm1 - j];
    const double d1 = (ub1 - ua1) / (j + 1);         // int u^j
    const double d2 = (ub_p - ua_p) / (j + 2);       // int u^{j+1}
    const double ua3 = ua_p * ua, ub3 = ub_p * ub;
    const double d3 = (ub3 - ua3) / (j + 3);         // int u^{j+2}
    m0 += c * d1;
    m1 += c * d2;
    m2 += c * (d3 - h01 * d2);
    ua1 = ua_p;
    ub1 = ub_p;
    ua_p = ua3;
    ub_p = ub3;
  }
  return f0 * m0 + d01 * m1 + d012 * m2;
}

struct Fit {
  double x0, h01, f0, d01, d012;
};

Fit quad_fit(double x0, double x1, double x2, double f0, double f1, double f2) {
  const double d01 = (f1 - f0) / (x1 - x0);
  const double d12 = (f2 - f1) / (x2 - x1);
  return {x0, x1 - x0, f0, d01, (d12 - d01) / (x2 - x0)};
}

std::vector<bool> mark_kinks(const std::vector<double>& radii,
                             const std::vector<double>& kink_radii) {
  std::vector<bool> kink(radii.size(), false);
  for (double rk : kink_radii) {
    const auto it = std::lower_bound(radii.begin(), radii.end(), rk - kNodeMatchTol);
    if (it == radii.end() || std::abs(*it - rk) > kNodeMatchTol * std::max(1.0, rk))
      throw std::invalid_argument("kink radius does not coincide with a grid node");
    kink[static_cast<std::size_t>(it - radii.begin())] = true;
  }
  return kink;
}

// per-segment integrals of values * r^{N-1}, averaging the two one-sided
// parabolas where both are admissible
std::vector<double> segment_integrals(const std::vector<double>& r,
                                      const std::vector<double>& g, int dimension,
                                      const std::vector<double>& kink_radii) {
  const int n = static_cast<int>(r.size());
  const auto kink = mark_kinks(r, kink_radii);
  const auto binom = binomial_row(dimension - 1);
  std::vector<double> seg(n - 1, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    double acc = 0.0;
    int used = 0;
    if (i >= 1 && !kink[i]) {
      const Fit f = quad_fit(r[i - 1], r[i], r[i + 1], g[i - 1], g[i], g[i + 1]);
      acc += newton_segment_integral(f.x0, f.h01, f.f0, f.d01, f.d012, r[i] - f.x0,
                                     r[i + 1] - f.x0, binom);
      ++used;
    }
    if (i + 2 < n && !kink[i + 1]) {
      const Fit f = quad_fit(r[i], r[i + 1], r[i + 2], g[i], g[i + 1], g[i + 2]);
      acc += newton_segment_integral(f.x0, f.h01, f.f0, f.d01, f.d012, 0.0, r[i + 1] - f.x0,
                                     binom);
      ++used;
    }
    if (used == 0) {
      // isolated segment: linear interpolant, still moment-exact
      const double d01 = (g[i + 1] - g[i]) / (r[i + 1] - r[i]);
      acc = newton_segment_integral(r[i], 0.0, g[i], d01, 0.0, 0.0, r[i + 1] - r[i], binom);
      ++used;
    }
    seg[i] = acc / used;
  }
  return seg;
}

}  // namespace

double unit_sphere_area(int dimension) {
  if (dimension < 1) throw std::invalid_argument("unit_sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

void RadialProfile::validate() const {
  if (dimension < 1) throw std::invalid_argument("radial profile: dimension must be >= 1");
  if (radii.size() != values.size() || radii.size() < 2)
    throw std::invalid_argument("radial profile: need matching radii/values with >= 2 nodes");
  if (radii.front() < 0.0) throw std::invalid_argument("radial profile: radii must be >= 0");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument("radial profile: radii must be strictly increasing");
}

double radial_integral(const RadialProfile& f, const RadialIntegralOptions& opts) {
  f.validate();
  std::vector<double> g(f.values.size());
  const bool unit_power = opts.power == 1.0;
  const bool int_power = std::abs(opts.power - std::round(opts.power)) < 1e-12;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = f.values[i];
    if (unit_power) {
      g[i] = v;
    } else if (int_power) {
      double r = 1.0;
      for (int q = 0; q < static_cast<int>(std::round(opts.power)); ++q) r *= v;
      g[i] = r;
    } else {
      if (v < 0.0)
        throw std::invalid_argument("radial_integral: negative value under non-integer power");
      g[i] = std::pow(v, opts.power);
    }
  }
  const auto seg = segment_integrals(f.radii, g, f.dimension, opts.kink_radii);
  double total = 0.0;
  for (double s : seg) total += s;

  if (opts.tail_value_decay) {
    const double q = opts.power * (*opts.tail_value_decay) - (f.dimension - 1);
    if (!(q > 1.0))
      throw QuadratureFailure("radial_integral: tail integrand does not decay (exponent <= 1)");
    const double r_last = f.radii.back();
    const double j_last = g.back() * std::pow(r_last, f.dimension - 1);
    total += j_last * r_last / (q - 1.0);
  }
  return unit_sphere_area(f.dimension) * total;
}

std::vector<double> radial_segment_integrals(const RadialProfile& f,
                                             const std::vector<double>& kink_radii) {
  f.validate();
  return segment_integrals(f.radii, f.values, f.dimension, kink_radii);
}

std::vector<double> radial_cumulative(const RadialProfile& f,
                                      const std::vector<double>& kink_radii) {
  const auto seg = radial_segment_integrals(f, kink_radii);
  std::vector<double> prefix(f.radii.size(), 0.0);
  for (std::size_t i = 0; i + 1 < f.radii.size(); ++i) prefix[i + 1] = prefix[i] + seg[i];
  return prefix;
}

std::vector<double> make_radial_grid(double r_min, double r_max, int points_per_decade,
                                     const std::vector<double>& breakpoints,
                                     bool prepend_zero) {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw std::invalid_argument("make_radial_grid: need 0 < r_min < r_max");
  if (points_per_decade < 4)
    throw std::invalid_argument("make_radial_grid: points_per_decade too small");

  std::vector<double> anchors{r_min};
  for (double b : breakpoints)
    if (b > r_min * (1.0 + 1e-12) && b < r_max * (1.0 - 1e-12)) anchors.push_back(b);
  anchors.push_back(r_max);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end(),
                            [](double a, double b) { return std::abs(b - a) <= 1e-12 * b; }),
                anchors.end());

  std::vector<double> grid;
  if (prepend_zero) grid.push_back(0.0);
  grid.push_back(anchors.front());
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const double lo = anchors[s], hi = anchors[s + 1];
    const int pieces =
        std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * points_per_decade)));
    const double ratio = std::log(hi / lo) / pieces;
    for (int j = 1; j < pieces; ++j) grid.push_back(lo * std::exp(j * ratio));
    grid.push_back(hi);
  }
  return grid;
}

}  // namespace nlmp
