#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlmp/energy.hpp"

namespace nlmp {

struct StepRule {
  double initial = 1.0;             // first trial step in the H_0^1 metric
  double shrink = 0.5;              // backtracking factor
  double sufficient_decrease = 1e-4;
  int max_backtracks = 50;          // stall here means non-convergence, not a retry
};

struct SolveConfig {
  ProblemConfig problem;
  // seed: amplitude * phi_1 (a centered positive product-of-sines bump),
  // unless an explicit field is given
  double seed_amplitude = 1.0;
  std::optional<SpectralField> seed_field;
  int max_iters = 10000;
  // stop when the H_0^1 gradient norm drops below
  // grad_tol * clamp(||seed||_{H_0^1}, 1, 10); converged outcomes therefore
  // satisfy residual < 10 * grad_tol
  double grad_tol = 1e-8;
  StepRule step_rule;
  bool allow_critical = false;  // permit p at/above the critical exponent
  int trace_stride = 10;
  int path_points = 41;  // discretization of the mountain-pass path
};

struct SolveOutcome {
  SpectralField state;
  double energy_level = 0.0;
  double residual = 0.0;            // dual-norm PDE residual at the final state
  double min_interior_value = 0.0;  // positivity certificate on the refined grid
  int iterations = 0;
  bool converged = false;
  // concentration diagnostics: (max amplitude, inverse participation ratio)
  std::vector<double> max_amplitude_trace;
  std::vector<double> ipr_trace;
  std::vector<double> level_trace;
};

// Nehari-ray descent: descend u -> max_t F(t u^+) by normalized Riesz-gradient
// steps with backtracking.  Primary solver.
SolveOutcome solve_nehari(const SolveConfig& cfg);

// Discretized-path mountain-pass algorithm: deform-and-descend at the maximum
// of a path from 0 to a negative-energy endpoint.  Independent cross-check.
SolveOutcome solve_mountain_pass_path(const SolveConfig& cfg);

// ||riesz_gradient(u)||_{H_0^1}; zero exactly at discrete solutions
double residual_dual_norm(const SpectralField& u, const ProblemConfig& cfg);

struct PositivityCertificate {
  double lhs = 0.0;  // lambda_1 int u phi_1
  double rhs = 0.0;  // gamma lambda_1^{-m} int u phi_1
  bool ok = false;   // strict inequality forcing gamma < lambda_1^{m+1}
};

PositivityCertificate positivity_certificate(const SpectralField& u, const ProblemConfig& cfg);

struct FlowTrajectory {
  std::vector<SpectralField> snapshots;
  std::vector<double> snapshot_times;
  std::vector<double> successive_diffs;  // L^2 step-to-step differences
  bool converged = false;                // successive difference fell below tol
  int steps_taken = 0;
  double residual_fourth_order = 0.0;  // ||(-Delta)((-Delta)u - N(u)) - gamma u||_{L^2} at the end
  double residual_second_order = 0.0;  // dual-norm residual of the m=1 problem at the end
};

// Semi-implicit spectral stepping of
//   du/dt + (-Delta)^2 u = gamma u + (-Delta) N(u)
// (stiff multipliers implicit, nonlinearity explicit).  m = 1 only.  Steady
// states of the scheme solve the discrete problem exactly, independently of dt.
FlowTrajectory evolve_cahn_hilliard(const SpectralField& u0, const ProblemConfig& cfg,
                                    double dt, int steps, double settle_tol = 1e-13,
                                    int snapshot_stride = 0);

struct FlowOptions {
  double dt = 2e-4;
  int steps_per_segment = 5000;
  int max_bisections = 64;
  int check_stride = 10;
};

// Steady-state-seeking flow mode.  The plain flow has the mountain-pass state
// as an index-1 saddle (small data decays to 0, large data blows up), so this
// driver brackets the basin boundary by bisection on the seed amplitude and
// rides the separatrix to the saddle.
SolveOutcome solve_flow(const SolveConfig& cfg, const FlowOptions& opts = {});

struct ScanRow {
  double gamma = 0.0;
  bool converged = false;
  bool threshold_violation = false;
  double level = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool positivity_ok = false;
  int iterations = 0;
  std::string error;
};

// One solve per gamma; per-entry failures are recorded in the row rather than
// thrown.  Entries may run concurrently (workers > 1); rows come back sorted
// by gamma regardless.
std::vector<ScanRow> threshold_scan(const SolveConfig& cfg,
                                    const std::vector<double>& gamma_grid,
                                    int workers = 1);

}  // namespace nlmp
