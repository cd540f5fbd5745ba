#pragma once

#include <vector>

#include "nlmp/radial.hpp"

namespace nlmp {

// Talenti-bubble configuration, centered at the origin.  The cutoff is the
// piecewise-linear ramp: 1 on [0, R], sloping to 0 on [R, 2R].  All quantities
// below the raw profiles are reported under the normalization
// ||u_eps||_{L^{2*}(B_2R)} = 1, with the ball B_2R playing the ambient domain.
struct BubbleSpec {
  int N = 7;              // ambient dimension, >= 3
  double epsilon = 1e-3;  // bubble scale
  double R = 0.25;        // inner cutoff radius

  void validate() const;
  bool epsilon_comfortably_small() const { return epsilon <= R / 10.0; }
};

struct BubbleQuadratureOptions {
  int points_per_decade = 220;
  double core_shrink = 1e-3;       // grid starts at epsilon * core_shrink
  double tail_span = 1e3;          // full-space grids end at tail_span / epsilon-units
  double refinement_tol = 1e-6;    // doubling-consistency gate
  bool check_refinement = true;
};

// u_eps(r) = (eps / (eps^2 + r^2))^{(N-2)/2} on the graded grid over [0, 2R]
RadialProfile talenti_bubble(const BubbleSpec& spec,
                             const std::vector<double>& radii = {});

// cutoff * u_eps; identically zero beyond 2R
RadialProfile cutoff_bubble(const BubbleSpec& spec,
                            const std::vector<double>& radii = {});

double cutoff_value(double r, double R);

// Best Sobolev quotient ||grad u||_2^2 / ||u||_{2*}^2 of the pure bubble, by
// radial quadrature with analytic power-law tail corrections.  The quotient
// is scale invariant, so epsilon only exercises the grid scaling.  Throws
// QuadratureFailure when grid doubling moves the value by more than the
// refinement tolerance.
double sobolev_constant(int N, const BubbleQuadratureOptions& opts = {},
                        double epsilon = 1.0);

struct PowerFit {
  double exponent = 0.0;       // least-squares slope of log(value) vs log(eps)
  double rms_residual = 0.0;   // in log space
  // N = 4 carries the |log eps| correction: value = eps^2 (A |log eps| + B)
  double log_model_rms = 0.0;
  bool log_preferred = false;
  std::vector<double> epsilons;
  std::vector<double> values;
};

// ||phi_eps||_2^2 over a geometric epsilon grid, fitted as a power law; the
// N = 4 case compares against the log-corrected model
PowerFit bubble_l2_asymptotics(int N, double R, const std::vector<double>& epsilon_grid,
                               const BubbleQuadratureOptions& opts = {});

// Defect ||grad phi_eps||^2 - S_N, evaluated by the exact decomposition
//   (ramp excess on [R,2R]  -  gradient tail beyond 2R) / c(eps)^2
//   + ||grad u||^2_{R^N} (1/c(eps)^2 - 1/K^{2/2*})
// so no catastrophic cancellation against S_N occurs at small eps.
double gradient_defect(const BubbleSpec& spec, const BubbleQuadratureOptions& opts = {});

PowerFit bubble_grad_defect(int N, double R, const std::vector<double>& epsilon_grid,
                            const BubbleQuadratureOptions& opts = {});

// F(eps) = int phi_eps (-Delta)^{-1} phi_eps over B_2R, with the inverse
// realized by the radial two-point boundary value problem
//   -(v'' + (N-1) v'/r) = phi_eps,  v'(0) = 0,  v(2R) = 0,
// solved by nested cumulative quadrature.  The discrete solution is checked
// pointwise positive.
double nonlocal_pairing(const BubbleSpec& spec, const BubbleQuadratureOptions& opts = {});

PowerFit nonlocal_pairing_fit(int N, double R, const std::vector<double>& epsilon_grid,
                              const BubbleQuadratureOptions& opts = {});

struct LevelReport {
  double SN_eps = 0.0;   // ||grad phi_eps||^2 under the 2*-normalization
  double F_eps = 0.0;    // normalized nonlocal pairing
  double t_eps = 0.0;    // ray maximum location
  double g_at_t = 0.0;   // ray maximum value (1/N) (SN_eps - gamma F_eps)^{N/2}
  double c_star = 0.0;   // (1/N) S_N^{N/2}
  bool gap_ok = false;   // g_at_t < c_star, decided by the cancellation-free form
};

LevelReport level_gap(int N, double gamma, const BubbleSpec& spec,
                      const BubbleQuadratureOptions& opts = {});

enum class WindowMode { Scalar, System };

struct WindowReport {
  bool feasible = false;
  double lo = 0.0;
  double hi = 0.0;
};

// Scalar mode: (N-2)(N-6) > 0 with the mu-interval
// (1 + N/(N-4), N/2 + 1) intersected with (0, N-2).
// System mode: the alpha-interval solving N - |2 alpha - (N-2)| > 6,
// i.e. (2, N-4); empty for N <= 6.
WindowReport dimension_window(int N, WindowMode mode);

// default geometric epsilon sweep 1e-4 .. 1e-2 with 9 points
std::vector<double> default_epsilon_grid();

}  // namespace nlmp
