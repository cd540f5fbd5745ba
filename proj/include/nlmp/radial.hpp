#pragma once

#include <optional>
#include <vector>

#include "nlmp/errors.hpp"

namespace nlmp {

// surface area of the unit sphere in R^N
double unit_sphere_area(int dimension);

// A radial function r -> value with the ambient dimension carried along.
// Integrals weight the samples by omega_{N-1} r^{N-1}.
struct RadialProfile {
  int dimension = 3;
  std::vector<double> radii;   // strictly increasing, radii[0] >= 0
  std::vector<double> values;

  void validate() const;
};

struct RadialIntegralOptions {
  double power = 1.0;  // integrate f^power
  // if set, assume f ~ r^{-decay} beyond the last node and add the analytic
  // tail of the integrand
  std::optional<double> tail_value_decay;
  // radii at which the integrand is only C^0 (quadratic fits do not cross
  // them); must coincide with grid nodes
  std::vector<double> kink_radii;
};

// omega_{N-1} * integral of f(r)^power r^{N-1} dr over the grid, by
// moment-exact piecewise parabolas (exact for polynomial f of degree <= 2).
double radial_integral(const RadialProfile& f, const RadialIntegralOptions& opts = {});

// per-segment integrals of f r^{N-1} dr between consecutive nodes (no omega)
std::vector<double> radial_segment_integrals(const RadialProfile& f,
                                             const std::vector<double>& kink_radii = {});

// prefix[i] = integral from radii[0] to radii[i] of f r^{N-1} dr (no omega)
std::vector<double> radial_cumulative(const RadialProfile& f,
                                      const std::vector<double>& kink_radii = {});

// geometric grid from r_min to r_max with the given resolution; breakpoints
// are inserted as exact nodes; prepend_zero adds r = 0
std::vector<double> make_radial_grid(double r_min, double r_max, int points_per_decade,
                                     const std::vector<double>& breakpoints = {},
                                     bool prepend_zero = true);

}  // namespace nlmp
