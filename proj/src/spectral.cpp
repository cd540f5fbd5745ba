#include "nlmp/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nlmp {

namespace {

// Apply a [rows x cols] matrix along one axis of a flat row-major tensor.
// The axis extent changes from cols to rows.
std::vector<double> contract_axis(const std::vector<double>& in,
                                  const std::vector<int>& shape, int axis,
                                  const std::vector<double>& mat, int rows) {
  const int cols = shape[axis];
  std::size_t outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(shape[a]);
  for (int a = axis + 1; a < static_cast<int>(shape.size()); ++a)
    inner *= static_cast<std::size_t>(shape[a]);

  std::vector<double> out(outer * rows * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    const double* iblk = in.data() + o * cols * inner;
    double* oblk = out.data() + o * rows * inner;
    for (int j = 0; j < rows; ++j) {
      double* orow = oblk + static_cast<std::size_t>(j) * inner;
      const double* mrow = mat.data() + static_cast<std::size_t>(j) * cols;
      for (int k = 0; k < cols; ++k) {
        const double c = mrow[k];
        const double* irow = iblk + static_cast<std::size_t>(k) * inner;
        for (std::size_t i = 0; i < inner; ++i) orow[i] += c * irow[i];
      }
    }
  }
  return out;
}

std::vector<double> run_transform(const std::vector<double>& data,
                                  std::vector<int> shape,
                                  const std::vector<std::vector<double>>& mats,
                                  const std::vector<int>& out_extents) {
  std::vector<double> cur = data;
  for (int a = 0; a < static_cast<int>(shape.size()); ++a) {
    cur = contract_axis(cur, shape, a, mats[a], out_extents[a]);
    shape[a] = out_extents[a];
  }
  return cur;
}

}  // namespace

double pow_int(double x, int q) {
  if (q < 0) return 1.0 / pow_int(x, -q);
  double r = 1.0;
  for (int i = 0; i < q; ++i) r *= x;
  return r;
}

BoxBasis::BoxBasis(std::vector<double> lengths, std::vector<int> modes)
    : lengths_(std::move(lengths)), modes_(std::move(modes)) {
  if (lengths_.empty() || lengths_.size() != modes_.size())
    throw InvalidConfigError("box basis: lengths and modes must be nonempty and of equal dimension");
  for (double L : lengths_)
    if (!(L > 0.0)) throw InvalidConfigError("box basis: all side lengths must be positive");
  for (int n : modes_)
    if (n < 1) throw InvalidConfigError("box basis: all mode counts must be >= 1");

  const double pi = std::numbers::pi;
  const int d = dim();
  std::size_t total = 1;
  refined_modes_.resize(d);
  for (int a = 0; a < d; ++a) {
    total *= static_cast<std::size_t>(modes_[a]);
    refined_modes_[a] = 2 * modes_[a];
    cell_volume_ *= lengths_[a] / (modes_[a] + 1);
    refined_cell_volume_ *= lengths_[a] / (refined_modes_[a] + 1);
    refined_size_ *= static_cast<std::size_t>(refined_modes_[a]);
  }

  // per-axis 1d eigenvalues (k pi / L)^2
  std::vector<std::vector<double>> axis_eigs(d);
  for (int a = 0; a < d; ++a) {
    axis_eigs[a].resize(modes_[a]);
    for (int k = 0; k < modes_[a]; ++k) {
      const double w = (k + 1) * pi / lengths_[a];
      axis_eigs[a][k] = w * w;
    }
  }
  eigenvalues_.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double lam = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      const int k = static_cast<int>(rem % modes_[a]);
      rem /= modes_[a];
      lam += axis_eigs[a][k];
    }
    eigenvalues_[flat] = lam;
  }

  synth_.resize(d);
  analyze_.resize(d);
  synth_ref_.resize(d);
  analyze_ref_.resize(d);
  for (int a = 0; a < d; ++a) {
    const int n = modes_[a];
    const int M = refined_modes_[a];
    const double L = lengths_[a];
    const double norm = std::sqrt(2.0 / L);
    const double h = L / (n + 1);
    const double hr = L / (M + 1);
    synth_[a].assign(static_cast<std::size_t>(n) * n, 0.0);
    analyze_[a].assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double s = norm * std::sin((j + 1) * (k + 1) * pi / (n + 1));
        synth_[a][static_cast<std::size_t>(j) * n + k] = s;
        analyze_[a][static_cast<std::size_t>(k) * n + j] = h * s;
      }
    synth_ref_[a].assign(static_cast<std::size_t>(M) * n, 0.0);
    analyze_ref_[a].assign(static_cast<std::size_t>(n) * M, 0.0);
    for (int j = 0; j < M; ++j)
      for (int k = 0; k < n; ++k) {
        const double s = norm * std::sin((j + 1) * (k + 1) * pi / (M + 1));
        synth_ref_[a][static_cast<std::size_t>(j) * n + k] = s;
        analyze_ref_[a][static_cast<std::size_t>(k) * M + j] = hr * s;
      }
  }
}

double BoxBasis::navier_first_eigenvalue(int q) const {
  if (q < 1) throw std::invalid_argument("navier_first_eigenvalue: order must be >= 1");
  return pow_int(lambda1(), q);
}

std::vector<int> BoxBasis::multi_index(std::size_t flat) const {
  const int d = dim();
  std::vector<int> k(d);
  for (int a = d - 1; a >= 0; --a) {
    k[a] = static_cast<int>(flat % modes_[a]) + 1;
    flat /= modes_[a];
  }
  return k;
}

std::size_t BoxBasis::flat_index(const std::vector<int>& k) const {
  if (static_cast<int>(k.size()) != dim())
    throw std::invalid_argument("flat_index: wrong multi-index dimension");
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) {
    if (k[a] < 1 || k[a] > modes_[a])
      throw std::invalid_argument("flat_index: multi-index out of range");
    flat = flat * modes_[a] + static_cast<std::size_t>(k[a] - 1);
  }
  return flat;
}

double BoxBasis::grid_coordinate(int axis, int node) const {
  return (node + 1) * lengths_[axis] / (modes_[axis] + 1);
}

double BoxBasis::refined_coordinate(int axis, int node) const {
  return (node + 1) * lengths_[axis] / (refined_modes_[axis] + 1);
}

std::vector<double> BoxBasis::synthesize(const std::vector<double>& coeffs) const {
  if (coeffs.size() != size()) throw std::invalid_argument("synthesize: coefficient shape mismatch");
  return run_transform(coeffs, modes_, synth_, modes_);
}

std::vector<double> BoxBasis::analyze(const std::vector<double>& values) const {
  if (values.size() != size()) throw std::invalid_argument("analyze: grid shape mismatch");
  return run_transform(values, modes_, analyze_, modes_);
}

std::vector<double> BoxBasis::synthesize_refined(const std::vector<double>& coeffs) const {
  if (coeffs.size() != size()) throw std::invalid_argument("synthesize_refined: coefficient shape mismatch");
  return run_transform(coeffs, modes_, synth_ref_, refined_modes_);
}

std::vector<double> BoxBasis::analyze_refined(const std::vector<double>& values) const {
  if (values.size() != refined_size()) throw std::invalid_argument("analyze_refined: grid shape mismatch");
  return run_transform(values, refined_modes_, analyze_ref_, modes_);
}

std::shared_ptr<const BoxBasis> build_box_basis(std::vector<double> lengths,
                                                std::vector<int> modes) {
  return std::make_shared<const BoxBasis>(std::move(lengths), std::move(modes));
}

SpectralField zero_field(std::shared_ptr<const BoxBasis> basis) {
  SpectralField f;
  f.coeffs.assign(basis->size(), 0.0);
  f.basis = std::move(basis);
  return f;
}

GridField from_spectral(const SpectralField& f) {
  GridField g;
  g.basis = f.basis;
  g.values = f.basis->synthesize(f.coeffs);
  return g;
}

SpectralField to_spectral(const GridField& g) {
  SpectralField f;
  f.basis = g.basis;
  f.coeffs = g.basis->analyze(g.values);
  return f;
}

SpectralField apply_power(const SpectralField& f, double s) {
  SpectralField out = f;
  const auto& lam = f.basis->eigenvalues();
  for (std::size_t i = 0; i < out.coeffs.size(); ++i)
    out.coeffs[i] *= std::pow(lam[i], s);
  return out;
}

std::pair<double, SpectralField> first_eigenpair(std::shared_ptr<const BoxBasis> basis) {
  SpectralField phi = zero_field(basis);
  phi.coeffs[0] = 1.0;
  return {basis->lambda1(), phi};
}

void require_same_basis(const SpectralField& a, const SpectralField& b) {
  if (a.basis != b.basis)
    throw std::invalid_argument("fields live on different bases");
  if (a.coeffs.size() != b.coeffs.size())
    throw std::invalid_argument("coefficient vector length mismatch");
}

double l2_inner(const SpectralField& a, const SpectralField& b) {
  require_same_basis(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += a.coeffs[i] * b.coeffs[i];
  return s;
}

double l2_norm(const SpectralField& a) { return std::sqrt(l2_inner(a, a)); }

double h1_inner(const SpectralField& a, const SpectralField& b) {
  require_same_basis(a, b);
  const auto& lam = a.basis->eigenvalues();
  double s = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    s += lam[i] * a.coeffs[i] * b.coeffs[i];
  return s;
}

double h1_norm(const SpectralField& a) { return std::sqrt(h1_inner(a, a)); }

SpectralField scaled(const SpectralField& a, double c) {
  SpectralField out = a;
  for (double& x : out.coeffs) x *= c;
  return out;
}

void axpy(SpectralField& y, double c, const SpectralField& x) {
  require_same_basis(y, x);
  for (std::size_t i = 0; i < y.coeffs.size(); ++i) y.coeffs[i] += c * x.coeffs[i];
}

}  // namespace nlmp
