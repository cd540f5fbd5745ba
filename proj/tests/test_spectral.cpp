#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlmp/spectral.hpp"

using namespace nlmp;
namespace {

constexpr double pi = std::numbers::pi;

SpectralField random_field(std::shared_ptr<const BoxBasis> basis, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SpectralField f = zero_field(std::move(basis));
  for (double& c : f.coeffs) c = dist(rng);
  return f;
}

}  // namespace

TEST_CASE("box eigenvalues match the analytic tensor sums") {
  const auto sq_pi = build_box_basis({pi, pi}, {4, 4});
  CHECK(sq_pi->eigenvalue(sq_pi->flat_index({1, 1})) == doctest::Approx(2.0).epsilon(1e-14));

  const auto unit = build_box_basis({1.0, 1.0}, {6, 6});
  CHECK(unit->lambda1() == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));

  const auto seg = build_box_basis({1.0}, {5});
  CHECK(seg->eigenvalue(seg->flat_index({3})) == doctest::Approx(9.0 * pi * pi).epsilon(1e-14));

  // nondecreasing under componentwise increase, minimum at the all-ones index
  for (std::size_t i = 0; i < unit->size(); ++i)
    CHECK(unit->eigenvalue(i) >= unit->lambda1());
  const auto rect = build_box_basis({1.0, 2.0, 0.5}, {3, 4, 2});
  for (int kx = 1; kx <= 3; ++kx)
    for (int ky = 1; ky <= 4; ++ky)
      for (int kz = 1; kz <= 2; ++kz) {
        const double lam = rect->eigenvalue(rect->flat_index({kx, ky, kz}));
        if (kx > 1) CHECK(lam > rect->eigenvalue(rect->flat_index({kx - 1, ky, kz})));
        if (ky > 1) CHECK(lam > rect->eigenvalue(rect->flat_index({kx, ky - 1, kz})));
        if (kz > 1) CHECK(lam > rect->eigenvalue(rect->flat_index({kx, ky, kz - 1})));
      }
}

TEST_CASE("invalid geometry is rejected") {
  CHECK_THROWS_AS(build_box_basis({-1.0, 1.0}, {4, 4}), InvalidConfigError);
  CHECK_THROWS_AS(build_box_basis({1.0, 1.0}, {0, 4}), InvalidConfigError);
  CHECK_THROWS_AS(build_box_basis({}, {}), InvalidConfigError);
  CHECK_THROWS_AS(build_box_basis({1.0}, {4, 4}), InvalidConfigError);
}

TEST_CASE("grid samples of a single eigenfunction give one nonzero coefficient") {
  const auto basis = build_box_basis({1.0}, {8});
  GridField g{basis, {}};
  g.values.resize(basis->size());
  for (int j = 0; j < 8; ++j) g.values[j] = std::sin(pi * basis->grid_coordinate(0, j));
  const SpectralField f = to_spectral(g);
  CHECK(f.coeffs[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  for (std::size_t i = 1; i < f.coeffs.size(); ++i) CHECK(std::abs(f.coeffs[i]) < 1e-13);
}

TEST_CASE("sin(pi x) sin(2 pi y) hits exactly the (1,2) mode") {
  const auto basis = build_box_basis({1.0, 1.0}, {6, 6});
  GridField g{basis, {}};
  g.values.resize(basis->size());
  std::size_t idx = 0;
  for (int jx = 0; jx < 6; ++jx)
    for (int jy = 0; jy < 6; ++jy, ++idx)
      g.values[idx] = std::sin(pi * basis->grid_coordinate(0, jx)) *
                      std::sin(2.0 * pi * basis->grid_coordinate(1, jy));
  const SpectralField f = to_spectral(g);
  const std::size_t target = basis->flat_index({1, 2});
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    if (i == target)
      CHECK(f.coeffs[i] == doctest::Approx(0.5).epsilon(1e-13));
    else
      CHECK(std::abs(f.coeffs[i]) < 1e-13);
  }
}

TEST_CASE("transform round-trip is the identity on band-limited fields") {
  const auto basis = build_box_basis({1.0, 2.0}, {7, 5});
  const SpectralField f = random_field(basis, 42);
  const SpectralField back = to_spectral(from_spectral(f));
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    CHECK(back.coeffs[i] == doctest::Approx(f.coeffs[i]).epsilon(1e-12));

  GridField bad{basis, std::vector<double>(3, 0.0)};
  CHECK_THROWS_AS(to_spectral(bad), std::invalid_argument);
}

TEST_CASE("Parseval: grid quadrature equals the coefficient norm") {
  const auto basis = build_box_basis({1.0, 1.5}, {9, 6});
  const SpectralField f = random_field(basis, 7);
  const GridField g = from_spectral(f);
  double quad = 0.0;
  for (double v : g.values) quad += v * v;
  quad *= basis->cell_volume();
  CHECK(quad == doctest::Approx(l2_inner(f, f)).epsilon(1e-10));
}

TEST_CASE("apply_power acts diagonally with the expected multipliers") {
  const auto basis = build_box_basis({1.0}, {6});
  auto [lam1, phi1] = first_eigenpair(basis);
  CHECK(lam1 == doctest::Approx(pi * pi).epsilon(1e-14));

  const SpectralField inv = apply_power(phi1, -1.0);
  CHECK(inv.coeffs[0] == doctest::Approx(1.0 / (pi * pi)).epsilon(1e-14));

  const SpectralField f = random_field(basis, 3);
  SUBCASE("half powers compose to the inverse") {
    const SpectralField twice = apply_power(apply_power(f, -0.5), -0.5);
    const SpectralField once = apply_power(f, -1.0);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i)
      CHECK(twice.coeffs[i] == doctest::Approx(once.coeffs[i]).epsilon(1e-13));
  }
  SUBCASE("inverse pair round-trips") {
    const SpectralField rt = apply_power(apply_power(f, -3.0), 3.0);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i)
      CHECK(rt.coeffs[i] == doctest::Approx(f.coeffs[i]).epsilon(1e-12));
  }
  SUBCASE("semigroup identity per coefficient") {
    const SpectralField ab = apply_power(apply_power(f, 0.7), -1.9);
    const SpectralField ba = apply_power(apply_power(f, -1.9), 0.7);
    const SpectralField sum = apply_power(f, -1.2);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
      CHECK(ab.coeffs[i] == doctest::Approx(sum.coeffs[i]).epsilon(8e-15));
      CHECK(ab.coeffs[i] == doctest::Approx(ba.coeffs[i]).epsilon(8e-15));
    }
  }
}

TEST_CASE("first eigenpair is normalized and matches box geometry") {
  const auto rect = build_box_basis({2.0, 1.0}, {5, 5});
  auto [lam1, phi1] = first_eigenpair(rect);
  CHECK(lam1 == doctest::Approx(pi * pi * (0.25 + 1.0)).epsilon(1e-14));
  CHECK(l2_norm(phi1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("navier first eigenvalue is the integer power of lambda1") {
  const auto unit = build_box_basis({1.0, 1.0}, {4, 4});
  const double lam1 = unit->lambda1();
  CHECK(unit->navier_first_eigenvalue(2) ==
        doctest::Approx(4.0 * pi * pi * pi * pi).epsilon(1e-13));
  CHECK(unit->navier_first_eigenvalue(1) == lam1);
  CHECK(unit->navier_first_eigenvalue(3) ==
        doctest::Approx(8.0 * std::pow(pi, 6)).epsilon(1e-13));
  CHECK_THROWS_AS(unit->navier_first_eigenvalue(0), std::invalid_argument);
}

TEST_CASE("H1 Rayleigh quotient is minimized by phi_1") {
  const auto basis = build_box_basis({1.0, 1.0}, {8, 8});
  const double lam1 = basis->lambda1();
  for (unsigned seed = 0; seed < 20; ++seed) {
    const SpectralField f = random_field(basis, seed);
    const double q = h1_inner(f, f) / l2_inner(f, f);
    CHECK(q >= lam1 - 1e-10);
  }
  auto [lam, phi1] = first_eigenpair(basis);
  CHECK(h1_inner(phi1, phi1) / l2_inner(phi1, phi1) == doctest::Approx(lam).epsilon(1e-14));
}
