#include "nlmp/system.hpp"

#include <algorithm>
#include <cmath>

#include "descent.hpp"

namespace nlmp {

SystemState lift_to_system(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  if (!(cfg.gamma > 0.0))
    throw std::invalid_argument("lift_to_system: chain scaling undefined at gamma = 0");
  SystemState st;
  st.u = u;
  st.v.resize(cfg.m, zero_field(u.basis));
  for (int i = 1; i <= cfg.m; ++i) {
    const double scale = std::pow(cfg.gamma, static_cast<double>(i) / (cfg.m + 1));
    st.v[cfg.m - i] = scaled(apply_power(u, -static_cast<double>(i)), scale);
  }
  return st;
}

std::vector<double> system_residual(const SystemState& state, const ProblemConfig& cfg) {
  cfg.validate();
  if (state.v.size() != static_cast<std::size_t>(cfg.m))
    throw std::invalid_argument("system_residual: expected m auxiliary fields");
  const double c = std::pow(cfg.gamma, 1.0 / (cfg.m + 1));

  std::vector<double> res;
  res.reserve(cfg.m + 1);

  // first equation: u - c (-Delta)^{-1} v_1 - (-Delta)^{-1} N(u)
  {
    auto vals = state.u.basis->synthesize_refined(state.u.coeffs);
    for (double& v : vals) v = nl_deriv(v, cfg.p, cfg.nonlinearity);
    const auto b = state.u.basis->analyze_refined(vals);
    const auto& lam = state.u.basis->eigenvalues();
    SpectralField g = state.u;
    for (std::size_t k = 0; k < g.coeffs.size(); ++k)
      g.coeffs[k] = state.u.coeffs[k] - (c * state.v[0].coeffs[k] + b[k]) / lam[k];
    res.push_back(h1_norm(g));
  }
  // chain equations: v_i - c (-Delta)^{-1} v_{i+1}, closing with u
  for (int i = 0; i < cfg.m; ++i) {
    const SpectralField& next = (i + 1 < cfg.m) ? state.v[i + 1] : state.u;
    const auto& lam = state.u.basis->eigenvalues();
    SpectralField g = state.v[i];
    for (std::size_t k = 0; k < g.coeffs.size(); ++k)
      g.coeffs[k] = state.v[i].coeffs[k] - c * next.coeffs[k] / lam[k];
    res.push_back(h1_norm(g));
  }
  return res;
}

SystemSolveOutcome solve_system_mpa(const SolveConfig& cfg) {
  ProblemConfig pc = cfg.problem;
  pc.nonlinearity = Nonlinearity::PositivePart;
  pc.validate();
  if (!(pc.gamma > 0.0)) throw InvalidConfigError("solve_system_mpa: gamma must be positive");
  if (pc.gamma >= pc.threshold())
    throw ThresholdViolation("gamma at or above lambda_1^{m+1}: no positive solution exists");
  if (!pc.subcritical_safe() && !cfg.allow_critical)
    throw InvalidConfigError(
        "exponent p is not subcritical-safe for this dimension; set allow_critical to override");

  const int m = pc.m;
  const double c = std::pow(pc.gamma, 1.0 / (m + 1));

  // seed (u, v_1..v_m): lifted positive bump
  SpectralField bump = zero_field(pc.basis);
  bump.coeffs[0] = cfg.seed_amplitude;
  if (cfg.seed_field) bump = *cfg.seed_field;
  SystemState seed_state = lift_to_system(bump, pc);
  detail::FieldVec seed;
  seed.push_back(seed_state.u);
  for (auto& v : seed_state.v) seed.push_back(v);

  const auto coupling_sum = [m](const detail::FieldVec& U) {
    double s = l2_inner(U[0], U[1]) + l2_inner(U[0], U[m]);
    for (int i = 1; i < m; ++i) s += l2_inner(U[i], U[i + 1]);
    return s;
  };

  detail::RayProblem rp;
  rp.p = pc.p;
  rp.qform = [&, c](const detail::FieldVec& U) {
    double grad2 = 0.0;
    for (const auto& f : U) grad2 += h1_inner(f, f);
    return grad2 - 2.0 * c / (m + 1) * coupling_sum(U);
  };
  rp.pform = [&](const detail::FieldVec& U) { return nonlinear_part(U[0], pc); };
  rp.grad = [&, c](const detail::FieldVec& U) {
    const auto& lam = pc.basis->eigenvalues();
    detail::FieldVec g(U.size(), zero_field(pc.basis));
    // d/du: u - c/(m+1) (-Delta)^{-1}(v_1 + v_m) - (-Delta)^{-1} N(u)
    auto vals = U[0].basis->synthesize_refined(U[0].coeffs);
    for (double& v : vals) v = nl_deriv(v, pc.p, pc.nonlinearity);
    const auto b = U[0].basis->analyze_refined(vals);
    for (std::size_t k = 0; k < lam.size(); ++k)
      g[0].coeffs[k] = U[0].coeffs[k] -
                       (c / (m + 1) * (U[1].coeffs[k] + U[m].coeffs[k]) + b[k]) / lam[k];
    // d/dv_i: v_i - c/(m+1) (-Delta)^{-1}(left + right neighbors in the coupling)
    for (int i = 1; i <= m; ++i) {
      for (std::size_t k = 0; k < lam.size(); ++k) {
        double nb = 0.0;
        if (i == 1) nb += U[0].coeffs[k];
        if (i > 1) nb += U[i - 1].coeffs[k];
        if (i == m) nb += U[0].coeffs[k];
        if (i < m) nb += U[i + 1].coeffs[k];
        g[i].coeffs[k] = U[i].coeffs[k] - c / (m + 1) * nb / lam[k];
      }
    }
    return g;
  };

  double seed_norm2 = 0.0;
  for (const auto& f : seed) seed_norm2 += h1_inner(f, f);
  const double q0 = rp.qform(seed), p0 = rp.pform(seed);
  if (!(q0 > 0.0)) throw ThresholdViolation("system seed: nonpositive quadratic form");
  const double t0 = std::pow(q0 / p0, 1.0 / (pc.p - 1.0));

  detail::DescentOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.grad_tol_abs = cfg.grad_tol * std::clamp(t0 * std::sqrt(seed_norm2), 1.0, 10.0);
  opts.step = cfg.step_rule;

  auto dr = detail::nehari_descent(rp, seed, opts);

  SystemSolveOutcome out;
  out.state.u = dr.state[0];
  out.state.v.assign(dr.state.begin() + 1, dr.state.end());
  out.level = dr.level;
  out.residual = dr.residual;
  out.iterations = dr.iterations;
  out.converged = dr.converged;
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& f : dr.state) {
    const auto vals = f.basis->synthesize_refined(f.coeffs);
    mn = std::min(mn, *std::min_element(vals.begin(), vals.end()));
  }
  out.min_interior_value = mn;
  return out;
}

EquivalenceReport equivalence_check(const SpectralField& u, const ProblemConfig& cfg,
                                    double tol) {
  const SystemState lifted = lift_to_system(u, cfg);
  EquivalenceReport rep;
  rep.residuals = system_residual(lifted, cfg);
  rep.max_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
  rep.pass = rep.max_residual < tol;
  return rep;
}

}  // namespace nlmp
