#include "nlmp/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlmp {

namespace {

double two_star(int N) { return 2.0 * N / (N - 2.0); }

double bubble_value(int N, double eps, double r) {
  return std::pow(eps / (eps * eps + r * r), 0.5 * (N - 2));
}

double bubble_deriv(int N, double eps, double r) {
  return -(N - 2) * r * std::pow(eps, 0.5 * (N - 2)) *
         std::pow(eps * eps + r * r, -0.5 * N);
}

std::vector<double> default_radii(const BubbleSpec& spec, const BubbleQuadratureOptions& opts,
                                  int ppd) {
  return make_radial_grid(spec.epsilon * opts.core_shrink, 2.0 * spec.R, ppd,
                          {spec.epsilon, spec.R}, true);
}

struct PureBubbleIntegrals {
  double grad2 = 0.0;   // int |grad u|^2 over R^N
  double mass2s = 0.0;  // int u^{2*} over R^N
};

PureBubbleIntegrals pure_bubble_integrals(int N, double eps,
                                          const BubbleQuadratureOptions& opts, int ppd) {
  const auto radii = make_radial_grid(eps * opts.core_shrink, eps * opts.tail_span, ppd,
                                      {eps}, true);
  RadialProfile du{N, radii, {}};
  du.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double d = bubble_deriv(N, eps, radii[i]);
    du.values[i] = d * d;
  }
  RadialProfile u{N, radii, {}};
  u.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) u.values[i] = bubble_value(N, eps, radii[i]);

  PureBubbleIntegrals out;
  out.grad2 = radial_integral(du, {.power = 1.0, .tail_value_decay = 2.0 * N - 2.0});
  out.mass2s = radial_integral(u, {.power = two_star(N), .tail_value_decay = double(N - 2)});
  return out;
}

// ||u_eps||_{2*}^{2*} outside B_2R; the piece removed by the ambient ball
double mass2s_beyond(int N, double eps, double R, const BubbleQuadratureOptions& opts,
                     int ppd) {
  const auto radii =
      make_radial_grid(2.0 * R, 2.0 * R * opts.tail_span, ppd, {}, false);
  RadialProfile u{N, radii, {}};
  u.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) u.values[i] = bubble_value(N, eps, radii[i]);
  return radial_integral(u, {.power = two_star(N), .tail_value_decay = double(N - 2)});
}

// squared 2*-normalization constant c(eps)^2 = (K - T)^{2/2*}
double norm_c2(int N, double eps, double R, double K, const BubbleQuadratureOptions& opts,
               int ppd) {
  const double T = mass2s_beyond(N, eps, R, opts, ppd);
  return std::exp(2.0 / two_star(N) * (std::log(K) + std::log1p(-T / K)));
}

template <typename F>
double with_refinement_check(const BubbleQuadratureOptions& opts, F&& compute) {
  const double fine = compute(2 * opts.points_per_decade);
  if (opts.check_refinement) {
    const double coarse = compute(opts.points_per_decade);
    const double scale = std::max(std::abs(fine), std::abs(coarse));
    if (scale > 0.0 && std::abs(fine - coarse) > opts.refinement_tol * scale)
      throw QuadratureFailure("radial quadrature did not stabilize under grid doubling");
  }
  return fine;
}

struct LinearFit {
  double slope, intercept, rms;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f{sxy / sxx, 0.0, 0.0};
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

void validate_epsilon_grid(double R, const std::vector<double>& eps) {
  if (eps.size() < 4) throw std::invalid_argument("epsilon grid: need at least 4 points");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument("epsilon grid: entries must be positive");
    if (i > 0 && !(eps[i] > eps[i - 1]))
      throw std::invalid_argument("epsilon grid: entries must be increasing");
    if (eps[i] > R / 10.0)
      throw std::invalid_argument("epsilon grid: require eps <= R/10");
  }
  if (eps.back() / eps.front() < 10.0 * (1.0 - 1e-9))
    throw std::invalid_argument("epsilon grid: must span at least one decade");
}

PowerFit fit_power_law(int N, const std::vector<double>& eps, std::vector<double> vals,
                       bool try_log_model) {
  std::vector<double> lx(eps.size()), ly(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(vals[i] > 0.0))
      throw AsymptoticsNotResolved("power-law fit: nonpositive sample value");
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(vals[i]);
  }
  const LinearFit plain = least_squares(lx, ly);

  PowerFit out;
  out.exponent = plain.slope;
  out.rms_residual = plain.rms;
  out.epsilons = eps;
  out.values = std::move(vals);

  if (try_log_model) {
    // value = eps^2 (A |log eps| + B), linear least squares in (A, B)
    double saa = 0, sab = 0, sbb = 0, say = 0, sby = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double w = out.values[i] / (eps[i] * eps[i]);
      const double a = std::abs(std::log(eps[i]));
      saa += a * a;
      sab += a;
      sbb += 1.0;
      say += a * w;
      sby += w;
    }
    const double det = saa * sbb - sab * sab;
    const double A = (say * sbb - sby * sab) / det;
    const double B = (saa * sby - sab * say) / det;
    double ss = 0;
    bool valid = true;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double pred = eps[i] * eps[i] * (A * std::abs(std::log(eps[i])) + B);
      if (!(pred > 0.0)) {
        valid = false;
        break;
      }
      const double e = std::log(pred) - std::log(out.values[i]);
      ss += e * e;
    }
    if (valid) {
      out.log_model_rms = std::sqrt(ss / eps.size());
      out.log_preferred = out.log_model_rms < out.rms_residual;
    }
  }
  if (out.rms_residual > 0.1 && (!try_log_model || out.log_model_rms > 0.1))
    throw AsymptoticsNotResolved("power-law fit residual exceeds 0.1");
  (void)N;
  return out;
}

}  // namespace

void BubbleSpec::validate() const {
  if (N < 3) throw std::invalid_argument("bubble: dimension must be >= 3");
  if (!(epsilon > 0.0)) throw std::invalid_argument("bubble: epsilon must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("bubble: cutoff radius must be positive");
}

double cutoff_value(double r, double R) {
  if (r <= R) return 1.0;
  if (r >= 2.0 * R) return 0.0;
  return (2.0 * R - r) / R;
}

RadialProfile talenti_bubble(const BubbleSpec& spec, const std::vector<double>& radii) {
  spec.validate();
  RadialProfile p;
  p.dimension = spec.N;
  p.radii = radii.empty() ? default_radii(spec, {}, BubbleQuadratureOptions{}.points_per_decade)
                          : radii;
  p.values.resize(p.radii.size());
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    p.values[i] = bubble_value(spec.N, spec.epsilon, p.radii[i]);
  p.validate();
  return p;
}

RadialProfile cutoff_bubble(const BubbleSpec& spec, const std::vector<double>& radii) {
  RadialProfile p = talenti_bubble(spec, radii);
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    p.values[i] *= cutoff_value(p.radii[i], spec.R);
  return p;
}

double sobolev_constant(int N, const BubbleQuadratureOptions& opts, double epsilon) {
  if (N < 3) throw std::invalid_argument("sobolev_constant: dimension must be >= 3");
  if (!(epsilon > 0.0)) throw std::invalid_argument("sobolev_constant: epsilon must be positive");
  return with_refinement_check(opts, [&](int ppd) {
    const PureBubbleIntegrals pb = pure_bubble_integrals(N, epsilon, opts, ppd);
    return pb.grad2 / std::pow(pb.mass2s, 2.0 / two_star(N));
  });
}

PowerFit bubble_l2_asymptotics(int N, double R, const std::vector<double>& epsilon_grid,
                               const BubbleQuadratureOptions& opts) {
  if (N < 3) throw std::invalid_argument("bubble_l2_asymptotics: dimension must be >= 3");
  validate_epsilon_grid(R, epsilon_grid);
  std::vector<double> vals(epsilon_grid.size());
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    const BubbleSpec spec{N, epsilon_grid[i], R};
    vals[i] = with_refinement_check(opts, [&](int ppd) {
      const auto radii = default_radii(spec, opts, ppd);
      RadialProfile phi = cutoff_bubble(spec, radii);
      const double raw = radial_integral(phi, {.power = 2.0, .kink_radii = {spec.R}});
      const PureBubbleIntegrals pb = pure_bubble_integrals(N, spec.epsilon, opts, ppd);
      return raw / norm_c2(N, spec.epsilon, R, pb.mass2s, opts, ppd);
    });
  }
  return fit_power_law(N, epsilon_grid, std::move(vals), N == 4);
}

double gradient_defect(const BubbleSpec& spec, const BubbleQuadratureOptions& opts) {
  spec.validate();
  const int N = spec.N;
  return with_refinement_check(opts, [&](int ppd) {
    const PureBubbleIntegrals pb = pure_bubble_integrals(N, spec.epsilon, opts, ppd);
    const double sn = pb.grad2 / std::pow(pb.mass2s, 2.0 / two_star(N));

    // ramp excess on [R, 2R]; the integrand varies steeply there, so the short
    // ramp grid gets extra resolution
    const auto ramp_radii =
        make_radial_grid(spec.R, 2.0 * spec.R, std::max(4 * ppd, 1200), {}, false);
    RadialProfile ramp{N, ramp_radii, {}};
    ramp.values.resize(ramp_radii.size());
    for (std::size_t i = 0; i < ramp_radii.size(); ++i) {
      const double r = ramp_radii[i];
      const double u = bubble_value(N, spec.epsilon, r);
      const double du = bubble_deriv(N, spec.epsilon, r);
      const double dphi = -u / spec.R + cutoff_value(r, spec.R) * du;
      ramp.values[i] = dphi * dphi - du * du;
    }
    const double a_ramp = radial_integral(ramp, {});

    // gradient tail removed beyond 2R
    const auto tail_radii =
        make_radial_grid(2.0 * spec.R, 2.0 * spec.R * opts.tail_span, ppd, {}, false);
    RadialProfile tail{N, tail_radii, {}};
    tail.values.resize(tail_radii.size());
    for (std::size_t i = 0; i < tail_radii.size(); ++i) {
      const double du = bubble_deriv(N, spec.epsilon, tail_radii[i]);
      tail.values[i] = du * du;
    }
    const double b_tail =
        radial_integral(tail, {.power = 1.0, .tail_value_decay = 2.0 * N - 2.0});

    const double T = mass2s_beyond(N, spec.epsilon, spec.R, opts, ppd);
    const double c2 = std::exp(2.0 / two_star(N) * (std::log(pb.mass2s) + std::log1p(-T / pb.mass2s)));
    const double norm_term = sn * std::expm1(-2.0 / two_star(N) * std::log1p(-T / pb.mass2s));
    return (a_ramp - b_tail) / c2 + norm_term;
  });
}

PowerFit bubble_grad_defect(int N, double R, const std::vector<double>& epsilon_grid,
                            const BubbleQuadratureOptions& opts) {
  if (N < 3) throw std::invalid_argument("bubble_grad_defect: dimension must be >= 3");
  validate_epsilon_grid(R, epsilon_grid);
  std::vector<double> vals(epsilon_grid.size());
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i)
    vals[i] = gradient_defect({N, epsilon_grid[i], R}, opts);
  return fit_power_law(N, epsilon_grid, std::move(vals), false);
}

double nonlocal_pairing(const BubbleSpec& spec, const BubbleQuadratureOptions& opts) {
  spec.validate();
  const int N = spec.N;
  return with_refinement_check(opts, [&](int ppd) {
    const auto radii = default_radii(spec, opts, ppd);
    const RadialProfile phi = cutoff_bubble(spec, radii);

    // m(r) = int_0^r phi s^{N-1} ds
    const std::vector<double> m = radial_cumulative(phi, {spec.R});

    // v(r) = int_r^{2R} m(s) s^{1-N} ds, so that -(v'' + (N-1)v'/r) = phi,
    // v'(0) = 0, v(2R) = 0.  Suffix-summing the positive segment integrals
    // keeps v accurate near the outer boundary, where a prefix difference
    // would cancel catastrophically.
    RadialProfile w{1, radii, {}};
    w.values.resize(radii.size(), 0.0);
    for (std::size_t i = 1; i < radii.size(); ++i)
      w.values[i] = m[i] * std::pow(radii[i], 1.0 - N);
    const std::vector<double> wseg = radial_segment_integrals(w, {spec.R});
    std::vector<double> v(radii.size(), 0.0);
    for (std::size_t i = radii.size() - 1; i-- > 0;) v[i] = v[i + 1] + wseg[i];

    RadialProfile integrand{N, radii, {}};
    integrand.values.resize(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (i + 1 < radii.size() && !(v[i] > 0.0))
        throw QuadratureFailure("nonlocal pairing: BVP solution lost positivity");
      integrand.values[i] = phi.values[i] * v[i];
    }
    const double raw = radial_integral(integrand, {.kink_radii = {spec.R}});
    const PureBubbleIntegrals pb = pure_bubble_integrals(N, spec.epsilon, opts, ppd);
    return raw / norm_c2(N, spec.epsilon, spec.R, pb.mass2s, opts, ppd);
  });
}

PowerFit nonlocal_pairing_fit(int N, double R, const std::vector<double>& epsilon_grid,
                              const BubbleQuadratureOptions& opts) {
  if (N < 3) throw std::invalid_argument("nonlocal_pairing_fit: dimension must be >= 3");
  validate_epsilon_grid(R, epsilon_grid);
  std::vector<double> vals(epsilon_grid.size());
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i)
    vals[i] = nonlocal_pairing({N, epsilon_grid[i], R}, opts);
  return fit_power_law(N, epsilon_grid, std::move(vals), false);
}

LevelReport level_gap(int N, double gamma, const BubbleSpec& spec,
                      const BubbleQuadratureOptions& opts) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("level_gap: gamma must be nonnegative");
  BubbleSpec s = spec;
  s.N = N;
  s.validate();

  const double sn = sobolev_constant(N, opts);
  const double defect = gradient_defect(s, opts);
  const double feps = nonlocal_pairing(s, opts);

  LevelReport rep;
  rep.SN_eps = sn + defect;
  rep.F_eps = feps;
  const double margin = defect - gamma * feps;  // decides the gap without cancellation
  const double a = rep.SN_eps - gamma * feps;
  if (!(a > 0.0)) throw std::invalid_argument("level_gap: ray quadratic coefficient nonpositive");
  rep.t_eps = std::pow(a, (N - 2) / 4.0);
  rep.g_at_t = std::pow(a, 0.5 * N) / N;
  rep.c_star = std::pow(sn, 0.5 * N) / N;
  rep.gap_ok = margin < 0.0;
  return rep;
}

WindowReport dimension_window(int N, WindowMode mode) {
  if (N < 3) throw std::invalid_argument("dimension_window: dimension must be >= 3");
  WindowReport rep;
  if (mode == WindowMode::Scalar) {
    rep.feasible = (N - 2) * (N - 6) > 0;
    if (rep.feasible) {
      rep.lo = std::max(1.0 + static_cast<double>(N) / (N - 4), 0.0);
      rep.hi = std::min(0.5 * N + 1.0, static_cast<double>(N - 2));
    }
  } else {
    rep.feasible = N >= 7;
    if (rep.feasible) {
      rep.lo = 2.0;
      rep.hi = static_cast<double>(N - 4);
    }
  }
  return rep;
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> eps(9);
  for (int i = 0; i < 9; ++i) eps[i] = 1e-4 * std::pow(10.0, i / 4.0);
  return eps;
}

}  // namespace nlmp
