#pragma once

#include <vector>

#include "nlmp/solve.hpp"

namespace nlmp {

struct SystemState {
  SpectralField u;
  std::vector<SpectralField> v;  // v_1 ... v_m
};

// Chain lift of a scalar state: v_{m-i+1} = gamma^{i/(m+1)} (-Delta)^{-i} u,
// so that (u, v_1, ..., v_m) solves the coupled first-order chain whenever u
// solves the scalar nonlocal problem.  For m = 1 this is v = sqrt(gamma)
// (-Delta)^{-1} u.  Requires gamma > 0.
SystemState lift_to_system(const SpectralField& u, const ProblemConfig& cfg);

// Dual-norm residuals of the m+1 chain equations
//   -Delta u   = gamma^{1/(m+1)} v_1 + N(u)
//   -Delta v_i = gamma^{1/(m+1)} v_{i+1}
//   -Delta v_m = gamma^{1/(m+1)} u
std::vector<double> system_residual(const SystemState& state, const ProblemConfig& cfg);

struct SystemSolveOutcome {
  SystemState state;
  double level = 0.0;
  double residual = 0.0;  // joint H_0^1 norm of the functional gradient
  int iterations = 0;
  bool converged = false;
  double min_interior_value = 0.0;  // over all components
};

// Joint Nehari descent on the coupled functional under the scaling t U.  Its
// critical points satisfy the Euler-Lagrange system of the functional; for
// m = 1 that system is exactly the two-field chain and the level equals the
// scalar mountain-pass level.
SystemSolveOutcome solve_system_mpa(const SolveConfig& cfg);

struct EquivalenceReport {
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool pass = false;
};

// Lift a converged scalar solution and measure the chain residuals.
EquivalenceReport equivalence_check(const SpectralField& u, const ProblemConfig& cfg,
                                    double tol = 1e-6);

}  // namespace nlmp
