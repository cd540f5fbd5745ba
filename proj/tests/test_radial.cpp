#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlmp/radial.hpp"

using namespace nlmp;
namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> linear_grid(double a, double b, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = a + (b - a) * i / (n - 1);
  return r;
}

}  // namespace

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
  CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
}

TEST_CASE("profile validation") {
  RadialProfile p{3, {0.0, 1.0, 0.5}, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  RadialProfile q{3, {0.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("polynomial integrands are integrated to machine precision") {
  // f == 1 over the unit ball in R^3: volume 4 pi / 3
  RadialProfile ones{3, linear_grid(0.0, 1.0, 9), std::vector<double>(9, 1.0)};
  CHECK(radial_integral(ones) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));

  // f = r^2 over the unit ball in R^3: omega_2 / 5 = 4 pi / 5
  RadialProfile r2{3, linear_grid(0.0, 1.0, 9), {}};
  r2.values.resize(9);
  for (int i = 0; i < 9; ++i) r2.values[i] = r2.radii[i] * r2.radii[i];
  CHECK(radial_integral(r2) == doctest::Approx(4.0 * pi / 5.0).epsilon(1e-14));
}

TEST_CASE("full-space Gaussian in R^4 equals pi^2") {
  const auto radii = make_radial_grid(1e-4, 12.0, 500);
  RadialProfile g{4, radii, {}};
  g.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) g.values[i] = std::exp(-radii[i] * radii[i]);
  CHECK(radial_integral(g) == doctest::Approx(pi * pi).epsilon(1e-8));
}

TEST_CASE("power-law tail correction") {
  // f = (1+r^2)^{-3} in R^3, exact integral omega_2 * (1/2) B(3/2, 3/2)
  const double exact = 4.0 * pi * 0.5 * std::tgamma(1.5) * std::tgamma(1.5) / std::tgamma(3.0);
  const auto radii = make_radial_grid(1e-5, 1e4, 400);
  RadialProfile f{3, radii, {}};
  f.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    f.values[i] = std::pow(1.0 + radii[i] * radii[i], -3.0);
  CHECK(radial_integral(f, {.tail_value_decay = 6.0}) == doctest::Approx(exact).epsilon(1e-8));

  // a nonintegrable tail is rejected
  RadialProfile slow{3, radii, std::vector<double>(radii.size(), 1.0)};
  CHECK_THROWS_AS(radial_integral(slow, {.tail_value_decay = 1.0}), QuadratureFailure);
}

TEST_CASE("kinked integrands need the kink marked at a node") {
  // f = min(1, 2 - r) on [0, 2] in R^3 (ramp from r = 1 to 2)
  const auto radii = make_radial_grid(1e-4, 2.0, 400, {1.0});
  RadialProfile f{3, radii, {}};
  f.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    f.values[i] = std::min(1.0, 2.0 - radii[i]);
  // exact: 4 pi [ int_0^1 r^2 + int_1^2 (2-r) r^2 ] = 4 pi (1/3 + 11/12)
  const double exact = 4.0 * pi * (1.0 / 3.0 + 11.0 / 12.0);
  CHECK(radial_integral(f, {.kink_radii = {1.0}}) == doctest::Approx(exact).epsilon(1e-10));
  CHECK_THROWS_AS(radial_integral(f, {.kink_radii = {1.0000301}}), std::invalid_argument);
}

TEST_CASE("cumulative quadrature solves the constant-source radial Poisson problem") {
  // -(v'' + (N-1)/r v') = 1 on B_b, v(b) = 0  =>  v = (b^2 - r^2) / (2N)
  const int N = 5;
  const double b = 0.7;
  const auto radii = make_radial_grid(1e-6, b, 200);
  RadialProfile one{N, radii, std::vector<double>(radii.size(), 1.0)};
  const auto m = radial_cumulative(one);
  RadialProfile w{1, radii, {}};
  w.values.resize(radii.size(), 0.0);
  for (std::size_t i = 1; i < radii.size(); ++i)
    w.values[i] = m[i] * std::pow(radii[i], 1.0 - N);
  const auto wpre = radial_cumulative(w);
  for (std::size_t i = 0; i < radii.size(); i += 37) {
    const double v = wpre.back() - wpre[i];
    const double exact = (b * b - radii[i] * radii[i]) / (2.0 * N);
    CHECK(v == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("grid builder inserts breakpoints as exact nodes") {
  const auto g = make_radial_grid(1e-3, 1.0, 50, {0.25, 0.5});
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(std::count(g.begin(), g.end(), 0.25) == 1);
  CHECK(std::count(g.begin(), g.end(), 0.5) == 1);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("refinement stability on a bubble-like integrand") {
  const auto value_at = [](int ppd) {
    const auto radii = make_radial_grid(1e-7, 0.5, ppd, {1e-4});
    RadialProfile f{5, radii, {}};
    f.values.resize(radii.size());
    const double eps = 1e-4;
    for (std::size_t i = 0; i < radii.size(); ++i)
      f.values[i] = std::pow(eps / (eps * eps + radii[i] * radii[i]), 1.5);
    return radial_integral(f, {.power = 2.0});
  };
  const double coarse = value_at(200);
  const double fine = value_at(400);
  CHECK(std::abs(fine - coarse) / std::abs(fine) < 1e-6);
}
