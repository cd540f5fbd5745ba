#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlmp/energy.hpp"

using namespace nlmp;
namespace {

constexpr double pi = std::numbers::pi;

SpectralField random_field(std::shared_ptr<const BoxBasis> basis, unsigned seed,
                           double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  SpectralField f = zero_field(std::move(basis));
  for (double& c : f.coeffs) c = dist(rng);
  return f;
}

ProblemConfig unit_square_cfg(double gamma = 0.0, double p = 3.0, int m = 1, int n = 10) {
  ProblemConfig cfg;
  cfg.basis = build_box_basis({1.0, 1.0}, {n, n});
  cfg.gamma = gamma;
  cfg.p = p;
  cfg.m = m;
  return cfg;
}

// independent ray-maximum oracle: sample F(t u) on a wide log grid, then
// refine around the argmax
double ray_max_oracle(const SpectralField& u, const ProblemConfig& cfg) {
  const double q = quadratic_part(u, cfg);
  const double pw = nonlinear_part(u, cfg);
  const auto fval = [&](double t) {
    return 0.5 * t * t * q - std::pow(t, cfg.p + 1.0) * pw / (cfg.p + 1.0);
  };
  double t_best = 1e-3, f_best = fval(t_best);
  for (int i = 0; i <= 600; ++i) {
    const double t = std::pow(10.0, -3.0 + 6.0 * i / 600.0);
    if (fval(t) > f_best) {
      f_best = fval(t);
      t_best = t;
    }
  }
  for (int i = 0; i <= 4000; ++i) {
    const double t = t_best * (0.75 + 0.5 * i / 4000.0);
    f_best = std::max(f_best, fval(t));
  }
  return f_best;
}

}  // namespace

TEST_CASE("quadratic part on phi_1: eigen-cancellation at the threshold") {
  auto cfg = unit_square_cfg();
  auto [lam1, phi1] = first_eigenpair(cfg.basis);

  CHECK(quadratic_part(phi1, cfg) == doctest::Approx(2.0 * pi * pi).epsilon(1e-13));

  cfg.gamma = cfg.basis->navier_first_eigenvalue(2);  // lambda_1^2, m = 1
  CHECK(quadratic_part(phi1, cfg) == 0.0);

  cfg.m = 2;
  cfg.gamma = cfg.basis->navier_first_eigenvalue(3);  // lambda_1^3
  CHECK(quadratic_part(phi1, cfg) == 0.0);
}

TEST_CASE("threshold sign law for the quadratic form") {
  auto cfg = unit_square_cfg(0.0, 3.0, 1, 8);
  const double thr = cfg.threshold();
  cfg.gamma = 0.999 * thr;
  for (unsigned seed = 0; seed < 10; ++seed)
    CHECK(quadratic_part(random_field(cfg.basis, seed), cfg) > 0.0);
  auto [lam1, phi1] = first_eigenpair(cfg.basis);
  cfg.gamma = 1.5 * thr;
  CHECK(quadratic_part(phi1, cfg) < 0.0);
}

TEST_CASE("nonlinear part: zero field, homogeneity, analytic sin^4 integral") {
  auto cfg = unit_square_cfg();
  CHECK(nonlinear_part(zero_field(cfg.basis), cfg) == 0.0);

  const SpectralField u = random_field(cfg.basis, 11, 0.3);
  const double p1 = nonlinear_part(u, cfg);
  const double p2 = nonlinear_part(scaled(u, 2.0), cfg);
  CHECK(p2 == doctest::Approx(std::pow(2.0, cfg.p + 1.0) * p1).epsilon(1e-10));

  ProblemConfig seg;
  seg.basis = build_box_basis({1.0}, {8});
  seg.p = 3.0;
  SpectralField s = zero_field(seg.basis);
  s.coeffs[0] = 1.0 / std::sqrt(2.0);  // sin(pi x)
  CHECK(nonlinear_part(s, seg) == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("scalar energy: zero, mountain-pass geometry along the phi_1 ray") {
  auto cfg = unit_square_cfg(0.0, 3.0, 1, 8);
  cfg.gamma = 0.5 * cfg.threshold();
  auto [lam1, phi1] = first_eigenpair(cfg.basis);

  CHECK(energy_scalar(zero_field(cfg.basis), cfg).energy == 0.0);
  const EnergyReport small = energy_scalar(scaled(phi1, 1e-2), cfg);
  CHECK(small.energy > 0.0);
  const EnergyReport big = energy_scalar(scaled(phi1, 50.0), cfg);
  CHECK(big.energy < 0.0);
  CHECK(small.energy ==
        doctest::Approx(0.5 * small.quadratic - small.nonlinear / (cfg.p + 1.0))
            .epsilon(1e-12));
}

TEST_CASE("Riesz gradient matches central finite differences of the energy") {
  auto cfg = unit_square_cfg(0.3 * 4.0 * pi * pi * pi * pi, 3.0, 1, 8);
  const double delta = 1e-4;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const SpectralField u = random_field(cfg.basis, 2 * seed, 0.5);
    const SpectralField h = random_field(cfg.basis, 2 * seed + 1, 0.5);
    const SpectralField g = riesz_gradient(u, cfg);

    SpectralField up = u, dn = u;
    axpy(up, delta, h);
    axpy(dn, -delta, h);
    const double fd = (energy_scalar(up, cfg).energy - energy_scalar(dn, cfg).energy) /
                      (2.0 * delta);
    CHECK(fd == doctest::Approx(h1_inner(g, h)).epsilon(1e-6));
  }
}

TEST_CASE("quadratic-only gradient: stationarity of phi_1 at the threshold") {
  auto cfg = unit_square_cfg();
  cfg.gamma = cfg.basis->navier_first_eigenvalue(2);
  auto [lam1, phi1] = first_eigenpair(cfg.basis);
  const SpectralField g = riesz_gradient_quadratic(phi1, cfg);
  for (double c : g.coeffs) CHECK(c == 0.0);

  // general coefficient algebra: (1 - gamma lambda_1^{-(m+1)}) phi_1
  cfg.gamma = 100.0;
  const SpectralField g2 = riesz_gradient_quadratic(phi1, cfg);
  const double expected = 1.0 - cfg.gamma / std::pow(lam1, 2.0);
  CHECK(g2.coeffs[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("nonlocal Rayleigh quotient: eigen values and the infimum") {
  auto cfg = unit_square_cfg();
  auto [lam1, phi1] = first_eigenpair(cfg.basis);
  const double lam1sq = lam1 * lam1;
  CHECK(rayleigh_quotient_nonlocal(phi1, cfg) == doctest::Approx(lam1sq).epsilon(1e-12));

  SpectralField mode = zero_field(cfg.basis);
  const std::size_t k = cfg.basis->flat_index({3, 2});
  mode.coeffs[k] = 0.7;
  const double lamk = cfg.basis->eigenvalue(k);
  CHECK(rayleigh_quotient_nonlocal(mode, cfg) == doctest::Approx(lamk * lamk).epsilon(1e-12));

  for (unsigned seed = 0; seed < 20; ++seed)
    CHECK(rayleigh_quotient_nonlocal(random_field(cfg.basis, seed), cfg) >= lam1sq - 1e-9);

  CHECK_THROWS_AS(rayleigh_quotient_nonlocal(zero_field(cfg.basis), cfg),
                  std::invalid_argument);
}

TEST_CASE("system energy: decoupling, lift identity, m = 1 reduction") {
  auto cfg = unit_square_cfg(0.4 * 4.0 * pi * pi * pi * pi, 3.0, 1, 8);
  const SpectralField u = random_field(cfg.basis, 5, 0.5);

  SUBCASE("zero state") {
    std::vector<SpectralField> z{zero_field(cfg.basis), zero_field(cfg.basis)};
    CHECK(system_energy(z, cfg) == 0.0);
  }
  SUBCASE("gamma = 0 decouples") {
    auto c0 = cfg;
    c0.gamma = 0.0;
    const SpectralField v = random_field(cfg.basis, 6, 0.5);
    std::vector<SpectralField> st{u, v};
    const double expect = 0.5 * h1_inner(u, u) + 0.5 * h1_inner(v, v) -
                          nonlinear_part(u, c0) / (c0.p + 1.0);
    CHECK(system_energy(st, c0) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("J at the lift equals F, and the v-gradient vanishes there") {
    const SpectralField v = scaled(apply_power(u, -1.0), std::sqrt(cfg.gamma));
    std::vector<SpectralField> st{u, v};
    const double f = 0.5 * quadratic_part(u, cfg) - nonlinear_part(u, cfg) / (cfg.p + 1.0);
    CHECK(system_energy(st, cfg) == doctest::Approx(f).epsilon(1e-12));

    // d/dv J = v - sqrt(gamma) (-Delta)^{-1} u = 0 at the lift
    SpectralField gv = v;
    axpy(gv, -std::sqrt(cfg.gamma), apply_power(u, -1.0));
    CHECK(h1_norm(gv) < 1e-13 * h1_norm(v));
  }
  SUBCASE("length mismatch rejected") {
    std::vector<SpectralField> st{u};
    CHECK_THROWS_AS(system_energy(st, cfg), std::invalid_argument);
  }
}

TEST_CASE("Nehari scaling: formula vs ray-sampling oracle, scale invariance") {
  auto cfg = unit_square_cfg(0.0, 3.0, 1, 8);
  auto [lam1, phi1] = first_eigenpair(cfg.basis);

  const NehariPoint n = nehari_scale_and_level(phi1, cfg);
  // frozen from the symbolic oracle: Q = 2 pi^2, P = 2^4 (3/8)^2 = 9/4,
  // level = Q^2 / (4 P) = 4 pi^4 / 9
  CHECK(quadratic_part(phi1, cfg) == doctest::Approx(2.0 * pi * pi).epsilon(1e-13));
  CHECK(nonlinear_part(phi1, cfg) == doctest::Approx(9.0 / 4.0).epsilon(1e-12));
  CHECK(n.level == doctest::Approx(4.0 * std::pow(pi, 4.0) / 9.0).epsilon(1e-12));
  CHECK(n.level == doctest::Approx(ray_max_oracle(phi1, cfg)).epsilon(1e-6));

  // max_t F(t u) is invariant under u -> 2u
  const NehariPoint n2 = nehari_scale_and_level(scaled(phi1, 2.0), cfg);
  CHECK(n2.level == doctest::Approx(n.level).epsilon(1e-12));
  CHECK(n2.t_star == doctest::Approx(0.5 * n.t_star).epsilon(1e-12));

  // unit case (p = 3): t* = (Q/P)^{1/2}, level = Q^2/(4P)
  const SpectralField u = random_field(cfg.basis, 9, 0.4);
  const NehariPoint nu = nehari_scale_and_level(u, cfg);
  const double q = quadratic_part(u, cfg), pw = nonlinear_part(u, cfg);
  CHECK(nu.t_star == doctest::Approx(std::sqrt(q / pw)).epsilon(1e-12));
  CHECK(nu.level == doctest::Approx(q * q / (4.0 * pw)).epsilon(1e-12));
  CHECK(nu.level == doctest::Approx(ray_max_oracle(u, cfg)).epsilon(1e-5));
  CHECK(nu.level > 0.0);

  // fractional exponent: the closed form still matches the sampling oracle
  auto frac = cfg;
  frac.p = 2.4;
  const NehariPoint nf = nehari_scale_and_level(u, frac);
  CHECK(nf.level == doctest::Approx(ray_max_oracle(u, frac)).epsilon(1e-5));
  CHECK(nf.t_star ==
        doctest::Approx(std::pow(quadratic_part(u, frac) / nonlinear_part(u, frac),
                                 1.0 / (frac.p - 1.0)))
            .epsilon(1e-12));
}

TEST_CASE("Nehari scaling rejects the supercritical direction and zero data") {
  auto cfg = unit_square_cfg();
  auto [lam1, phi1] = first_eigenpair(cfg.basis);
  cfg.gamma = 1.01 * cfg.threshold();
  CHECK_THROWS_AS(nehari_scale_and_level(phi1, cfg), ThresholdViolation);
  cfg.gamma = 0.0;
  CHECK_THROWS_AS(nehari_scale_and_level(zero_field(cfg.basis), cfg), std::invalid_argument);
}

TEST_CASE("positive-part nonlinearity only sees the positive cone") {
  auto cfg = unit_square_cfg();
  cfg.nonlinearity = Nonlinearity::PositivePart;
  SpectralField neg = zero_field(cfg.basis);
  neg.coeffs[0] = -1.0;  // strictly negative bump
  CHECK(nonlinear_part(neg, cfg) == 0.0);
  auto cfg_signed = cfg;
  cfg_signed.nonlinearity = Nonlinearity::SignedPower;
  CHECK(nonlinear_part(neg, cfg_signed) > 0.0);
}
