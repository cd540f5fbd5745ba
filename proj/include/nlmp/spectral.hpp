#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "nlmp/errors.hpp"

namespace nlmp {

// x^q by repeated multiplication.  Every integer eigenvalue power in the
// library goes through this helper so that threshold identities such as
// lambda1^{m+1} - gamma cancel exactly in floating point.
double pow_int(double x, int q);

// Dirichlet-Laplacian eigenbasis of a d-dimensional box.  Per-axis modes
// k_i = 1..n_i carry eigenfunctions prod_i sqrt(2/L_i) sin(k_i pi x_i / L_i)
// and eigenvalues lambda_k = sum_i (k_i pi / L_i)^2.  The eigenfunctions are
// orthonormal in L^2 and the interior collocation grid x_j = j L/(n+1) makes
// the discrete transforms exactly unitary on band-limited data, so Parseval
// holds coefficient-exactly.
//
// Nonlinear terms are evaluated on a 2x-refined collocation grid and
// projected back; for integrands of total trigonometric degree < 2(2n+1)
// the projection is alias-free.
class BoxBasis {
 public:
  BoxBasis(std::vector<double> lengths, std::vector<int> modes);

  int dim() const { return static_cast<int>(lengths_.size()); }
  const std::vector<double>& lengths() const { return lengths_; }
  const std::vector<int>& modes() const { return modes_; }

  std::size_t size() const { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t flat) const { return eigenvalues_[flat]; }
  double lambda1() const { return eigenvalues_.front(); }

  // lambda_1^q: first eigenvalue of (-Delta)^q under the spectrally defined
  // Navier conditions.  q >= 1.
  double navier_first_eigenvalue(int q) const;

  // multi-index (1-based) of a flat coefficient index
  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::vector<int>& k) const;

  // interior collocation coordinates
  double grid_coordinate(int axis, int node) const;
  double refined_coordinate(int axis, int node) const;
  std::size_t refined_size() const { return refined_size_; }
  double cell_volume() const { return cell_volume_; }
  double refined_cell_volume() const { return refined_cell_volume_; }

  // dense per-axis sine transforms; coeffs and values are flat row-major
  // arrays (last axis fastest)
  std::vector<double> synthesize(const std::vector<double>& coeffs) const;
  std::vector<double> analyze(const std::vector<double>& values) const;
  std::vector<double> synthesize_refined(const std::vector<double>& coeffs) const;
  std::vector<double> analyze_refined(const std::vector<double>& values) const;

 private:
  std::vector<double> lengths_;
  std::vector<int> modes_;
  std::vector<int> refined_modes_;
  std::vector<double> eigenvalues_;
  double cell_volume_ = 1.0;
  double refined_cell_volume_ = 1.0;
  std::size_t refined_size_ = 1;
  // per-axis transform tables, row-major [rows x cols]
  std::vector<std::vector<double>> synth_;         // n x n   [node][mode]
  std::vector<std::vector<double>> analyze_;       // n x n   [mode][node], weights included
  std::vector<std::vector<double>> synth_ref_;     // M x n
  std::vector<std::vector<double>> analyze_ref_;   // n x M
};

std::shared_ptr<const BoxBasis> build_box_basis(std::vector<double> lengths,
                                                std::vector<int> modes);

// Coefficients of a function in the sine eigenbasis.
struct SpectralField {
  std::shared_ptr<const BoxBasis> basis;
  std::vector<double> coeffs;
};

// Values on the interior collocation grid; boundary values are identically
// zero by construction of the sine collocation.
struct GridField {
  std::shared_ptr<const BoxBasis> basis;
  std::vector<double> values;
};

SpectralField zero_field(std::shared_ptr<const BoxBasis> basis);

GridField from_spectral(const SpectralField& f);
SpectralField to_spectral(const GridField& g);

// coefficient-wise multiplication by lambda_k^s, i.e. (-Delta)^s
SpectralField apply_power(const SpectralField& f, double s);

// (lambda_1, L^2-normalized first eigenfunction)
std::pair<double, SpectralField> first_eigenpair(std::shared_ptr<const BoxBasis> basis);

double l2_inner(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& a);
double h1_inner(const SpectralField& a, const SpectralField& b);
double h1_norm(const SpectralField& a);

SpectralField scaled(const SpectralField& a, double c);
// y += c * x
void axpy(SpectralField& y, double c, const SpectralField& x);

void require_same_basis(const SpectralField& a, const SpectralField& b);

}  // namespace nlmp
