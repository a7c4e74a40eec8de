from __future__ import annotations

import math

import numpy as np
import pytest

from obflow.core.quadrature import (
    EULER_TERMS,
    QuadratureSpec,
    euler_transform,
    integrate_finite,
    integrate_oscillatory,
    integrate_panel_series,
    integrate_semi_infinite,
)
from obflow.errors import ConfigurationError, NonFiniteIntegrand, QuadratureFailure


def test_spec_validation() -> None:
    for kwargs in ({"rel_tol": 0.0}, {"abs_tol": -1.0}, {"max_panels": 0}, {"tail_cut": 0.0}):
        with pytest.raises(ConfigurationError):
            QuadratureSpec(**kwargs)
    spec = QuadratureSpec().with_overrides(oscillation_period=2.0)
    assert spec.oscillation_period == 2.0


def test_finite_polynomial_is_exact() -> None:
    res = integrate_finite(lambda x: x**5 - 2 * x, 0.0, 2.0)
    assert res.converged
    assert res.value == pytest.approx(64 / 6 - 4, rel=1e-14)


def test_finite_vector_valued() -> None:
    """Trailing component axes are integrated with one shared rule."""
    res = integrate_finite(lambda x: np.stack([np.sin(x), np.cos(x)], axis=-1), 0.0, math.pi)
    np.testing.assert_allclose(res.value, [2.0, 0.0], atol=1e-12)


def test_finite_empty_and_invalid_range() -> None:
    assert integrate_finite(np.exp, 1.0, 1.0).value == 0.0
    with pytest.raises(ConfigurationError):
        integrate_finite(np.exp, 1.0, 0.0)


def test_non_finite_integrand() -> None:
    with pytest.raises(NonFiniteIntegrand):
        integrate_finite(lambda x: np.where(x > 0.5, np.inf, x), 0.0, 1.0)


@pytest.mark.parametrize(
    ("f", "expected"),
    [
        (lambda x: np.exp(-x * x), math.sqrt(math.pi) / 2),
        (lambda x: 1.0 / (1.0 + x * x), math.pi / 2),
        (lambda x: np.exp(-x) * x**2, 2.0),
    ],
)
def test_semi_infinite(f, expected: float) -> None:
    res = integrate_semi_infinite(f, QuadratureSpec(rel_tol=1e-11))
    assert res.converged
    assert res.value == pytest.approx(expected, rel=1e-10)


def test_semi_infinite_never_touches_zero() -> None:
    """A removable singularity at xi = 0 is fine: the rule has no node there."""
    res = integrate_semi_infinite(lambda x: -np.expm1(-x * x) / (x * x))
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-8)


def test_euler_transform_alternating_series() -> None:
    terms = np.array([(-1) ** k / (k + 1) for k in range(30)])
    estimate, err = euler_transform(np.cumsum(terms))
    assert estimate == pytest.approx(math.log(2), abs=1e-8)
    assert err < 1e-5
    with pytest.raises(ValueError):
        euler_transform([1.0])


def test_euler_transform_over_panel_series_terms() -> None:
    # binomial averaging of n partial sums of log(2) errs by less than 1 / (n (n + 1) 2**(n - 1))
    terms = np.array([(-1) ** k / (k + 1) for k in range(EULER_TERMS)])
    bound = 1.0 / (EULER_TERMS * (EULER_TERMS + 1) * 2 ** (EULER_TERMS - 1))
    estimate, err = euler_transform(np.cumsum(terms))
    assert abs(estimate - math.log(2)) < bound
    assert 0.0 < err < 1e-3


@pytest.mark.parametrize(
    ("kind", "power", "y", "expected"),
    [
        ("cos", 0, 2.0, 0.2),  # int e^-x cos(2x) = 1 / (1 + 4)
        ("sin", 0, 2.0, 0.4),  # int e^-x sin(2x) = 2 / (1 + 4)
    ],
)
def test_oscillatory_laplace_pairs(kind: str, power: int, y: float, expected: float) -> None:
    res = integrate_oscillatory(lambda x: np.exp(-x), y, kind, power)  # type: ignore[arg-type]
    assert res.converged
    assert res.value == pytest.approx(expected, abs=1e-9)


def test_oscillatory_dirichlet_integral() -> None:
    """int sin(y x) / x = pi / 2 for every y > 0; needs the accelerated tail."""
    res = integrate_oscillatory(np.ones_like, 3.0, "sin", 1)
    assert res.converged
    assert res.value == pytest.approx(math.pi / 2, abs=1e-8)


def test_oscillatory_array_of_y() -> None:
    ys = np.array([0.5, 1.0, 2.0])
    res = integrate_oscillatory(lambda x: np.exp(-x * x), ys, "cos", 0)
    expected = math.sqrt(math.pi) / 2 * np.exp(-ys * ys / 4)
    np.testing.assert_allclose(res.value, expected, atol=1e-10)


def test_oscillatory_y_zero_falls_back() -> None:
    res = integrate_oscillatory(lambda x: np.exp(-x), 0.0, "cos", 0)
    assert res.value == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize(
    ("y", "kind"), [(-1.0, "cos"), (np.array([0.0, 1.0]), "cos"), (1.0, "tan")]
)
def test_oscillatory_rejects(y, kind: str) -> None:
    with pytest.raises(ConfigurationError):
        integrate_oscillatory(np.exp, y, kind, 0)  # type: ignore[arg-type]


def test_panel_series_with_tail_cut() -> None:
    """Heads up to tail_cut are summed directly before the tail is accelerated."""
    spec = QuadratureSpec(tail_cut=40.0)
    res = integrate_panel_series(lambda x: np.cos(x) * np.exp(-0.1 * x), math.pi, spec)
    assert res.value == pytest.approx(0.1 / (1 + 0.01), abs=1e-9)


def test_panel_series_too_few_panels() -> None:
    with pytest.raises(ConfigurationError):
        integrate_panel_series(np.cos, 1.0, QuadratureSpec(max_panels=3))


def test_result_reports_error_within_tolerance() -> None:
    spec = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-14)
    res = integrate_semi_infinite(lambda x: np.exp(-x), spec)
    assert res.converged
    assert res.max_error <= max(spec.abs_tol, spec.rel_tol * abs(float(res.value)))


def test_panel_budget_exhausted() -> None:
    """A sqrt cusp needs bisection; one panel is not enough to meet the tolerance."""
    res = integrate_finite(np.sqrt, 0.0, 1.0, QuadratureSpec(max_panels=1))
    assert not res.converged
    assert res.panels_used == 1
    assert float(res.value) == pytest.approx(2.0 / 3.0, rel=1e-2)


def test_quadrature_failure_context() -> None:
    exc = QuadratureFailure("integral did not converge", quantity="u", y=None, t=1.0)
    assert exc.context == {"quantity": "u", "t": 1.0}
    assert str(exc) == "integral did not converge (quantity='u', t=1.0)"
