import math

import numpy as np
import pytest

import nlmp


def test_eigenvalues_unit_square():
    basis = nlmp.build_box_basis([1.0, 1.0], [8, 8])
    assert basis.lambda1 == pytest.approx(2.0 * math.pi**2, rel=1e-13)
    assert basis.navier_first_eigenvalue(2) == pytest.approx(4.0 * math.pi**4, rel=1e-13)


def test_transforms_round_trip():
    basis = nlmp.build_box_basis([1.0, 2.0], [6, 5])
    rng = np.random.default_rng(7)
    coeffs = rng.uniform(-1.0, 1.0, basis.size)
    field = nlmp.make_field(basis, coeffs)
    grid = nlmp.from_spectral(field)
    back = nlmp.to_spectral(basis, grid.values)
    assert np.allclose(back.coeffs, coeffs, atol=1e-12)

    inv = nlmp.apply_power(nlmp.apply_power(field, -2.0), 2.0)
    assert np.allclose(inv.coeffs, coeffs, rtol=1e-12)


def test_small_solve_is_positive():
    basis = nlmp.build_box_basis([1.0, 1.0], [10, 10])
    gamma = 0.5 * basis.navier_first_eigenvalue(2)
    out = nlmp.solve_nehari(basis, gamma=gamma, p=3.0)
    assert out.converged
    assert out.min_interior_value > 0.0
    assert out.residual < 1e-6
    cfg = nlmp.ProblemConfig(basis, gamma=gamma, p=3.0, positive_part=True)
    cert = nlmp.positivity_certificate(out.state, cfg)
    assert cert.ok

    rep = nlmp.equivalence_check(out.state, cfg)
    assert rep.max_residual < 1e-6


def test_threshold_violation_raises():
    basis = nlmp.build_box_basis([1.0, 1.0], [8, 8])
    gamma = 1.1 * basis.navier_first_eigenvalue(2)
    with pytest.raises(RuntimeError):
        nlmp.solve_nehari(basis, gamma=gamma)


def test_sobolev_constant_and_window():
    assert nlmp.sobolev_constant(3) == pytest.approx(5.4779, rel=1e-4)
    w = nlmp.dimension_window(7, nlmp.WindowMode.System)
    assert w.feasible and (w.lo, w.hi) == (2.0, 3.0)
    assert not nlmp.dimension_window(6, nlmp.WindowMode.Scalar).feasible


def test_level_gap_flags():
    spec = nlmp.BubbleSpec(7, 1e-3, 0.25)
    gamma = 0.5 * 4.0 * math.pi**4
    assert nlmp.level_gap(7, gamma, spec).gap_ok
    assert not nlmp.level_gap(7, 0.0, spec).gap_ok


def test_cli_round_trip():
    code, out, err = nlmp.run_cli(["window", "--N", "7", "--mode", "scalar"])
    assert code == 0
    assert "feasible=true" in out
