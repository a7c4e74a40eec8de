from __future__ import annotations

import math

import numpy as np
import pytest

from obflow.core.quadrature import integrate_finite
from obflow.core.spectral import (
    integrated_stress_bracket,
    mode_bracket_stress,
    mode_bracket_velocity,
    mode_brackets,
    newtonian_bracket,
    newtonian_integrated_bracket,
    phi1,
    second_grade_brackets,
    second_grade_integrated_stress,
    small_xi_limits,
    spectral_roots,
)
from obflow.errors import ConfigurationError, DegenerateLambda
from obflow.fluid import FluidParams

XI = np.array([1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0])


def test_roots_solve_the_characteristic_equation(oldroyd: FluidParams) -> None:
    roots = spectral_roots(XI, oldroyd)
    lam, alpha, nu = oldroyd.lambda_, oldroyd.alpha, oldroyd.nu
    for r in (roots.r1, roots.r2):
        residual = lam * r * r + (1 + alpha * XI**2) * r + nu * XI**2
        scale = 1 + np.abs(r) ** 2 + nu * XI**2
        assert np.all(np.abs(residual) / scale < 1e-12)
    assert np.all(roots.r1.real <= 0)
    assert np.all(roots.r2.real <= 0)
    np.testing.assert_allclose(roots.r3, roots.r1 + 1 / lam, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(roots.r4, roots.r2 + 1 / lam, rtol=1e-10, atol=1e-12)


def test_small_root_has_no_cancellation(maxwell: FluidParams) -> None:
    """r1 ~ -nu xi^2 for tiny xi must keep full relative accuracy."""
    roots = spectral_roots(1e-8, maxwell)
    assert float(roots.r1.real) == pytest.approx(-1e-16, rel=1e-10)


def test_complex_roots_are_conjugate(maxwell: FluidParams) -> None:
    roots = spectral_roots(np.array([3.0, 10.0]), maxwell)
    assert np.all(roots.disc < 0)
    np.testing.assert_array_equal(roots.r1, np.conj(roots.r2))
    np.testing.assert_array_equal(roots.r4, np.conj(roots.r3))


def test_roots_need_relaxation_time(second_grade: FluidParams) -> None:
    with pytest.raises(DegenerateLambda):
        spectral_roots(1.0, second_grade)


def test_negative_wavenumber_rejected(oldroyd: FluidParams) -> None:
    with pytest.raises(ConfigurationError):
        spectral_roots(-1.0, oldroyd)


def test_brackets_vanish_at_start(oldroyd: FluidParams, maxwell: FluidParams) -> None:
    for params in (oldroyd, maxwell):
        assert np.max(np.abs(mode_bracket_velocity(XI, 0.0, params))) < 1e-14
        assert np.max(np.abs(mode_bracket_stress(XI, 0.0, params))) < 1e-14


def test_brackets_tend_to_one(oldroyd: FluidParams) -> None:
    xi = np.array([0.5, 1.0, 3.0])
    np.testing.assert_allclose(mode_bracket_velocity(xi, 400.0, oldroyd), 1.0, atol=1e-12)
    np.testing.assert_allclose(mode_bracket_stress(xi, 400.0, oldroyd), 1.0, atol=1e-12)


def test_equal_times_reduce_to_newtonian() -> None:
    params = FluidParams(nu=1.0, lambda_=0.3, lambda_r=0.3)
    for t in (0.3, 1.0, 4.0):
        b_n = newtonian_bracket(XI, t, 1.0)
        np.testing.assert_allclose(mode_bracket_velocity(XI, t, params), b_n, atol=1e-12)
        np.testing.assert_allclose(mode_bracket_stress(XI, t, params), b_n, atol=1e-12)


def test_small_xi_limits(oldroyd: FluidParams) -> None:
    xi = 1e-4
    limit_u, limit_tau = small_xi_limits(1.0, oldroyd)
    assert float(mode_bracket_velocity(xi, 1.0, oldroyd)) / xi**2 == pytest.approx(
        limit_u, rel=1e-6
    )
    assert float(mode_bracket_stress(xi, 1.0, oldroyd)) / xi**2 == pytest.approx(
        limit_tau, rel=1e-6
    )


def test_small_xi_limit_of_second_grade(second_grade: FluidParams) -> None:
    _, limit_tau = small_xi_limits(2.0, second_grade)
    assert limit_tau == pytest.approx(2.0 + second_grade.alpha)


def test_degenerate_root_limit_is_continuous() -> None:
    """At the double root the analytic limit joins the two-mode formula smoothly."""
    params = FluidParams(nu=1.0, lambda_=0.5)
    # disc = 1 - 4 nu lambda xi^2 = 1 - 2 xi^2
    xi = np.sqrt((1.0 - np.array([-1e-8, 0.0, 1e-8])) / 2.0)
    roots = spectral_roots(xi, params)
    assert roots.degenerate.tolist() == [False, True, False]
    np.testing.assert_allclose(roots.disc[[0, 2]], [-1e-8, 1e-8], rtol=1e-6)
    for bracket in mode_brackets(roots, 1.0, params):
        assert abs(bracket[0] - bracket[1]) < 1e-6
        assert abs(bracket[2] - bracket[1]) < 1e-6


def test_second_grade_brackets(second_grade: FluidParams) -> None:
    b_u, b_tau = second_grade_brackets(XI, 0.0, second_grade)
    np.testing.assert_allclose(b_u, 0.0, atol=1e-15)
    a = second_grade.alpha * XI**2
    # instantaneous stress at t = 0+
    np.testing.assert_allclose(b_tau, a / (1 + a), rtol=1e-12)


def test_phi1_matches_direct_formula() -> None:
    z = np.array([-800.0, -50.0, -1.0, -0.3, -5e-3, 1e-6, 5e-3, 0.7])
    expected = np.where(z < -700, -(1 + z) / z, (np.exp(np.maximum(z, -700)) - 1 - z) / z)
    small = np.abs(z) < 1e-2
    np.testing.assert_allclose(phi1(z)[~small], expected[~small], rtol=1e-12)
    zs = z[small]
    np.testing.assert_allclose(phi1(z)[small], zs / 2 + zs**2 / 6 + zs**3 / 24, rtol=1e-8)


def test_phi1_complex_argument() -> None:
    z = np.array([-0.5 + 2.0j, -3.0 - 1.0j])
    np.testing.assert_allclose(phi1(z), (np.exp(z) - 1 - z) / z, rtol=1e-12)


def _time_integral(bracket, t: float) -> float:
    res = integrate_finite(bracket, 0.0, t, panels=4)
    return float(res.value)


@pytest.mark.parametrize("xi", [0.05, 0.7, 2.0, 6.0])
@pytest.mark.parametrize("fluid", ["oldroyd", "maxwell"])
def test_integrated_stress_bracket_is_time_integral(
    xi: float, fluid: str, request: pytest.FixtureRequest
) -> None:
    params: FluidParams = request.getfixturevalue(fluid)
    t = 1.5
    roots = spectral_roots(xi, params, t)
    closed = float(integrated_stress_bracket(roots, t, params))
    numeric = _time_integral(lambda s: mode_bracket_stress(xi, s, params), t)
    assert closed == pytest.approx(numeric, rel=1e-8, abs=1e-14)


@pytest.mark.parametrize("xi", [1e-3, 0.3, 2.0])
def test_integrated_bracket_momentum_identity(xi: float, oldroyd: FluidParams) -> None:
    """nu t xi^2 - b_u = nu xi^2 * int_0^t b_tau."""
    t = 0.8
    roots = spectral_roots(xi, oldroyd, t)
    b_u, _ = mode_brackets(roots, t, oldroyd)
    integrated = float(integrated_stress_bracket(roots, t, oldroyd))
    lhs = oldroyd.nu * t * xi**2 - float(b_u)
    assert lhs == pytest.approx(oldroyd.nu * xi**2 * integrated, rel=1e-6)


def test_integrated_bracket_at_double_root() -> None:
    params = FluidParams(nu=1.0, lambda_=0.5)
    xi0 = 1.0 / math.sqrt(2.0)
    roots = spectral_roots(xi0, params)
    closed = float(integrated_stress_bracket(roots, 1.0, params))
    numeric = _time_integral(lambda s: mode_bracket_stress(xi0, s, params), 1.0)
    assert closed == pytest.approx(numeric, rel=1e-7)


def test_second_grade_integrated_stress(second_grade: FluidParams) -> None:
    xi, t = 0.9, 2.0
    closed = float(second_grade_integrated_stress(xi, t, second_grade))
    numeric = _time_integral(lambda s: second_grade_brackets(xi, s, second_grade)[1], t)
    assert closed == pytest.approx(numeric, rel=1e-9)


def test_newtonian_integrated_bracket() -> None:
    xi, t, nu = 1.3, 0.7, 2.0
    closed = float(newtonian_integrated_bracket(xi, t, nu))
    expected = t + math.expm1(-nu * t * xi * xi) / (nu * xi * xi)
    assert closed == pytest.approx(expected, rel=1e-12)
