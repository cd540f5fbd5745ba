#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlmp/system.hpp"

using namespace nlmp;
namespace {

SolveConfig unit_square_solve(double gamma_rel, int n = 16, int m = 1) {
  SolveConfig cfg;
  cfg.problem.basis = build_box_basis({1.0, 1.0}, {n, n});
  cfg.problem.p = 3.0;
  cfg.problem.m = m;
  cfg.problem.gamma = gamma_rel * cfg.problem.threshold();
  return cfg;
}

}  // namespace

TEST_CASE("chain lift: eigenfunction scalings") {
  auto cfg = unit_square_solve(0.0);
  cfg.problem.gamma = 1.0;
  auto [lam1, phi1] = first_eigenpair(cfg.problem.basis);

  SUBCASE("m = 1: v = phi_1 / lambda_1") {
    const SystemState st = lift_to_system(phi1, cfg.problem);
    REQUIRE(st.v.size() == 1);
    CHECK(st.v[0].coeffs[0] == doctest::Approx(1.0 / lam1).epsilon(1e-13));
  }
  SUBCASE("m = 2: v_2 = phi_1/lambda_1, v_1 = phi_1/lambda_1^2") {
    ProblemConfig pc = cfg.problem;
    pc.m = 2;
    const SystemState st = lift_to_system(phi1, pc);
    REQUIRE(st.v.size() == 2);
    CHECK(st.v[1].coeffs[0] == doctest::Approx(1.0 / lam1).epsilon(1e-13));
    CHECK(st.v[0].coeffs[0] == doctest::Approx(1.0 / (lam1 * lam1)).epsilon(1e-13));
    // both chain equations hold exactly on the linear part
    const auto res = system_residual(st, pc);
    CHECK(res[1] < 1e-14);
    CHECK(res[2] < 1e-14);
  }
  SUBCASE("gamma = 0 is rejected") {
    ProblemConfig pc = cfg.problem;
    pc.gamma = 0.0;
    CHECK_THROWS_AS(lift_to_system(phi1, pc), std::invalid_argument);
  }
}

TEST_CASE("positivity propagates down the chain") {
  auto cfg = unit_square_solve(0.5, 12, 2);
  const SolveOutcome o = solve_nehari(cfg);
  REQUIRE(o.converged);
  REQUIRE(o.min_interior_value > 0.0);
  const SystemState st = lift_to_system(o.state, cfg.problem);
  for (const auto& v : st.v) {
    const auto vals = v.basis->synthesize_refined(v.coeffs);
    CHECK(*std::min_element(vals.begin(), vals.end()) > 0.0);
  }
}

TEST_CASE("chain identity: first-equation residual equals the scalar dual residual") {
  auto cfg = unit_square_solve(0.4, 12);
  ProblemConfig pc = cfg.problem;
  pc.nonlinearity = Nonlinearity::PositivePart;
  auto [lam1, phi1] = first_eigenpair(pc.basis);
  const SpectralField u = scaled(phi1, 2.0);  // not a solution
  const SystemState st = lift_to_system(u, pc);
  const auto res = system_residual(st, pc);
  CHECK(res[0] == doctest::Approx(residual_dual_norm(u, pc)).epsilon(1e-12));
  for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i] < 1e-14);
}

TEST_CASE("equivalence check on converged scalar solutions") {
  for (int m : {1, 2}) {
    auto cfg = unit_square_solve(0.5, 16, m);
    const SolveOutcome o = solve_nehari(cfg);
    REQUIRE(o.converged);
    ProblemConfig pc = cfg.problem;
    pc.nonlinearity = Nonlinearity::PositivePart;
    const EquivalenceReport rep = equivalence_check(o.state, pc, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.max_residual < 1e-6);
    CHECK(rep.residuals.size() == static_cast<std::size_t>(m + 1));
  }
}

TEST_CASE("equivalence check fails on a non-solution") {
  auto cfg = unit_square_solve(0.5, 12);
  ProblemConfig pc = cfg.problem;
  pc.nonlinearity = Nonlinearity::PositivePart;
  auto [lam1, phi1] = first_eigenpair(pc.basis);
  const EquivalenceReport rep = equivalence_check(scaled(phi1, 3.0), pc, 1e-6);
  CHECK(!rep.pass);
  CHECK(rep.residuals[0] > 1e-3);
}

TEST_CASE("system mountain pass matches the scalar solve at m = 1") {
  auto cfg = unit_square_solve(0.5, 16);
  const SolveOutcome scalar = solve_nehari(cfg);
  const SystemSolveOutcome sys = solve_system_mpa(cfg);
  REQUIRE(scalar.converged);
  REQUIRE(sys.converged);
  CHECK(std::abs(sys.level - scalar.energy_level) / scalar.energy_level < 1e-3);
  CHECK(sys.residual < 10.0 * cfg.grad_tol);
  CHECK(sys.min_interior_value > 0.0);

  // u-components agree after the lift comparison
  SpectralField diff = sys.state.u;
  axpy(diff, -1.0, scalar.state);
  CHECK(l2_norm(diff) / l2_norm(scalar.state) < 1e-3);

  // and the v-component is the lift of u
  const SystemState lifted = lift_to_system(sys.state.u, cfg.problem);
  SpectralField vdiff = sys.state.v[0];
  axpy(vdiff, -1.0, lifted.v[0]);
  CHECK(l2_norm(vdiff) / l2_norm(lifted.v[0]) < 1e-3);
}

TEST_CASE("system solve rejects bad gamma") {
  auto cfg = unit_square_solve(1.05, 8);
  CHECK_THROWS_AS(solve_system_mpa(cfg), ThresholdViolation);
  cfg.problem.gamma = 0.0;
  CHECK_THROWS_AS(solve_system_mpa(cfg), InvalidConfigError);
}

TEST_CASE("v-norm scales like sqrt(gamma) as gamma -> 0") {
  std::vector<double> gammas, vnorms;
  for (double rel : {1e-3, 1e-2, 1e-1}) {
    auto cfg = unit_square_solve(rel, 12);
    const SolveOutcome o = solve_nehari(cfg);
    REQUIRE(o.converged);
    const SystemState st = lift_to_system(o.state, cfg.problem);
    gammas.push_back(cfg.problem.gamma);
    vnorms.push_back(l2_norm(st.v[0]));
  }
  const double slope = (std::log(vnorms[2]) - std::log(vnorms[0])) /
                       (std::log(gammas[2]) - std::log(gammas[0]));
  CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
}
