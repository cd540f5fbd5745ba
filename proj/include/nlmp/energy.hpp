#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nlmp/spectral.hpp"

namespace nlmp {

// How the power nonlinearity is evaluated.  The solver works with the
// positive-part functional (P and its derivative taken at u^+), which keeps
// descent inside the positive cone; the plain functional uses |u|^{p-1}u.
enum class Nonlinearity { SignedPower, PositivePart };

struct ProblemConfig {
  std::shared_ptr<const BoxBasis> basis;
  double gamma = 0.0;  // nonlocal coupling, >= 0
  double p = 3.0;      // nonlinearity exponent, > 1
  int m = 1;           // order of the inverse operator, >= 1
  Nonlinearity nonlinearity = Nonlinearity::SignedPower;

  // admissible upper bound for gamma: lambda_1^{m+1}
  double threshold() const { return basis->navier_first_eigenvalue(m + 1); }
  // critical exponent bookkeeping: p is subcritical-safe when d <= 2 or
  // p < 2d/(d-2) - 1
  bool subcritical_safe() const;
  void validate() const;
};

struct EnergyReport {
  double quadratic = 0.0;      // Q(u) = ||grad u||^2 - gamma ||(-Delta)^{-m/2} u||^2
  double nonlinear = 0.0;      // P(u) = integral of the (p+1)-power term
  double energy = 0.0;         // Q/2 - P/(p+1)
  double gradient_norm = 0.0;  // H_0^1 norm of the Riesz gradient
};

// Q(u) = sum_k a_k^2 lambda_k^{-m} (lambda_k^{m+1} - gamma); the factored form
// vanishes exactly on phi_1 at gamma = lambda_1^{m+1}.
double quadratic_part(const SpectralField& u, const ProblemConfig& cfg);

// Integral of |u|^{p+1} (or (u^+)^{p+1}) on the refined collocation grid.
// Exact for integer p within the refined band limit; for fractional p the
// aliasing error stays below 1e-8 relative at the test resolutions.
double nonlinear_part(const SpectralField& u, const ProblemConfig& cfg);

EnergyReport energy_scalar(const SpectralField& u, const ProblemConfig& cfg);

// H_0^1 Riesz representative of F'(u):
//   g = u - gamma (-Delta)^{-(m+1)} u - (-Delta)^{-1} proj(N(u))
SpectralField riesz_gradient(const SpectralField& u, const ProblemConfig& cfg);

// same with the p-term removed
SpectralField riesz_gradient_quadratic(const SpectralField& u, const ProblemConfig& cfg);

// ||grad u||^2 / ||(-Delta)^{-m/2} u||^2; minimized by phi_1 with value
// lambda_1^{m+1}
double rayleigh_quotient_nonlocal(const SpectralField& u, const ProblemConfig& cfg);

// Coupled-system functional on U = (u, v_1, ..., v_m):
//   1/2 sum ||grad .||^2
//   - gamma^{1/(m+1)}/(m+1) (int u v_1 + int u v_m + sum int v_i v_{i+1})
//   - P(u)/(p+1)
// For m = 1 this reduces to the two-field functional with coupling
// sqrt(gamma) int u v.
double system_energy(std::span<const SpectralField> fields, const ProblemConfig& cfg);

struct NehariPoint {
  double t_star = 0.0;
  double level = 0.0;  // max_t F(t u) = (1/2 - 1/(p+1)) t*^2 Q
};

// Closed-form ray maximum for the homogeneous nonlinearity.  Throws
// ThresholdViolation when Q(u) <= 0 and std::invalid_argument when P(u) = 0.
NehariPoint nehari_scale_and_level(const SpectralField& u, const ProblemConfig& cfg);

// pointwise nonlinearity helpers shared with the solver
double nl_value(double v, double p, Nonlinearity kind);  // |v|^{p+1} or (v^+)^{p+1}
double nl_deriv(double v, double p, Nonlinearity kind);  // |v|^{p-1} v or (v^+)^p

}  // namespace nlmp
