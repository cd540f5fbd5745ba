#include "nlmp/energy.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nlmp {

namespace {

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

}  // namespace

bool ProblemConfig::subcritical_safe() const {
  const int d = basis->dim();
  if (d <= 2) return true;
  const double two_star = 2.0 * d / (d - 2.0);
  return p < two_star - 1.0;
}

void ProblemConfig::validate() const {
  if (!basis) throw InvalidConfigError("problem: basis not set");
  if (!(p > 1.0)) throw InvalidConfigError("problem: exponent p must exceed 1");
  if (m < 1) throw InvalidConfigError("problem: inverse-operator order m must be >= 1");
  if (!(gamma >= 0.0)) throw InvalidConfigError("problem: gamma must be nonnegative");
}

double nl_value(double v, double p, Nonlinearity kind) {
  if (kind == Nonlinearity::PositivePart && v <= 0.0) return 0.0;
  const double a = std::abs(v);
  if (is_integer(p)) {
    const int q = static_cast<int>(std::lround(p)) + 1;
    return pow_int(a, q);
  }
  return std::pow(a, p + 1.0);
}

double nl_deriv(double v, double p, Nonlinearity kind) {
  if (kind == Nonlinearity::PositivePart) {
    if (v <= 0.0) return 0.0;
    if (is_integer(p)) return pow_int(v, static_cast<int>(std::lround(p)));
    return std::pow(v, p);
  }
  const double a = std::abs(v);
  if (is_integer(p)) {
    const int q = static_cast<int>(std::lround(p)) - 1;
    return pow_int(a, q) * a * (v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0));
  }
  return std::pow(a, p - 1.0) * v;
}

double quadratic_part(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  const auto& lam = cfg.basis->eigenvalues();
  double q = 0.0;
  if (cfg.gamma == 0.0) {
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
      q += u.coeffs[i] * u.coeffs[i] * lam[i];
    return q;
  }
  for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
    const double a2 = u.coeffs[i] * u.coeffs[i];
    q += a2 * (pow_int(lam[i], cfg.m + 1) - cfg.gamma) / pow_int(lam[i], cfg.m);
  }
  return q;
}

double nonlinear_part(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  const auto vals = u.basis->synthesize_refined(u.coeffs);
  double s = 0.0;
  for (double v : vals) s += nl_value(v, cfg.p, cfg.nonlinearity);
  return s * u.basis->refined_cell_volume();
}

SpectralField riesz_gradient(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  auto vals = u.basis->synthesize_refined(u.coeffs);
  for (double& v : vals) v = nl_deriv(v, cfg.p, cfg.nonlinearity);
  const auto b = u.basis->analyze_refined(vals);
  const auto& lam = u.basis->eigenvalues();
  SpectralField g = u;
  for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
    const double lin = (cfg.gamma == 0.0)
                           ? u.coeffs[i]
                           : u.coeffs[i] * (pow_int(lam[i], cfg.m + 1) - cfg.gamma) /
                                 pow_int(lam[i], cfg.m + 1);
    g.coeffs[i] = lin - b[i] / lam[i];
  }
  return g;
}

SpectralField riesz_gradient_quadratic(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  const auto& lam = u.basis->eigenvalues();
  SpectralField g = u;
  for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
    g.coeffs[i] = (cfg.gamma == 0.0)
                      ? u.coeffs[i]
                      : u.coeffs[i] * (pow_int(lam[i], cfg.m + 1) - cfg.gamma) /
                            pow_int(lam[i], cfg.m + 1);
  }
  return g;
}

EnergyReport energy_scalar(const SpectralField& u, const ProblemConfig& cfg) {
  EnergyReport r;
  r.quadratic = quadratic_part(u, cfg);
  r.nonlinear = nonlinear_part(u, cfg);
  r.energy = 0.5 * r.quadratic - r.nonlinear / (cfg.p + 1.0);
  r.gradient_norm = h1_norm(riesz_gradient(u, cfg));
  return r;
}

double rayleigh_quotient_nonlocal(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  const auto& lam = cfg.basis->eigenvalues();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
    const double a2 = u.coeffs[i] * u.coeffs[i];
    num += a2 * lam[i];
    den += a2 / pow_int(lam[i], cfg.m);
  }
  if (den == 0.0) throw std::invalid_argument("rayleigh_quotient_nonlocal: zero field");
  return num / den;
}

double system_energy(std::span<const SpectralField> fields, const ProblemConfig& cfg) {
  cfg.validate();
  if (fields.size() != static_cast<std::size_t>(cfg.m + 1))
    throw std::invalid_argument("system_energy: expected m+1 fields");
  for (const auto& f : fields) require_same_basis(fields[0], f);

  double grad2 = 0.0;
  for (const auto& f : fields) grad2 += h1_inner(f, f);

  const auto& u = fields[0];
  double coupling = l2_inner(u, fields[1]) + l2_inner(u, fields[cfg.m]);
  for (int i = 1; i < cfg.m; ++i) coupling += l2_inner(fields[i], fields[i + 1]);

  const double c = std::pow(cfg.gamma, 1.0 / (cfg.m + 1));
  return 0.5 * grad2 - c / (cfg.m + 1) * coupling - nonlinear_part(u, cfg) / (cfg.p + 1.0);
}

NehariPoint nehari_scale_and_level(const SpectralField& u, const ProblemConfig& cfg) {
  if (l2_norm(u) == 0.0)
    throw std::invalid_argument("nehari scaling: zero field");
  const double q = quadratic_part(u, cfg);
  if (!(q > 0.0))
    throw ThresholdViolation(
        "nehari scaling: quadratic form nonpositive (supercritical-gamma direction)");
  const double pw = nonlinear_part(u, cfg);
  if (!(pw > 0.0))
    throw std::invalid_argument("nehari scaling: nonlinear part vanishes");
  NehariPoint n;
  n.t_star = std::pow(q / pw, 1.0 / (cfg.p - 1.0));
  n.level = (0.5 - 1.0 / (cfg.p + 1.0)) * n.t_star * n.t_star * q;
  return n;
}

}  // namespace nlmp
