from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import ConfigurationError, DegenerateLambda, NonRealResult
from ..fluid import FluidParams, lambda_floor

# |disc| below DEGENERACY_RTOL * (1 + alpha xi^2)^2 switches to the double-root limit
DEGENERACY_RTOL = 1e-10
# exp(z) with Re z below this is treated as 0
EXP_FLOOR = -700.0
_SERIES_CUTOFF = 1e-2
IMAG_RTOL = 1e-10
IMAG_ATOL = 1e-14

FloatOrArray = float | NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class SpectralRoots:
    """
    Rates r1..r4 of the two viscoelastic modes at wavenumber(s) ``xi``.

    All arrays share the shape of ``xi``. ``r1, r2`` solve
    lambda r^2 + (1 + alpha xi^2) r + nu xi^2 = 0 with Re(r1), Re(r2) <= 0,
    and r3 = r1 + 1/lambda, r4 = r2 + 1/lambda.
    """

    xi: NDArray[np.float64]
    disc: NDArray[np.float64]
    r1: NDArray[np.complex128]
    r2: NDArray[np.complex128]
    r3: NDArray[np.complex128]
    r4: NDArray[np.complex128]
    degenerate: NDArray[np.bool_]


def _check_xi(xi: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ConfigurationError("wavenumber xi must be finite and >= 0")
    return arr


def _output(value: NDArray[np.float64]) -> FloatOrArray:
    return float(value) if value.ndim == 0 else value


def spectral_roots(xi: ArrayLike, params: FluidParams, t_scale: float = 1.0) -> SpectralRoots:
    """
    Compute the spectral roots without cancellation.

    r2 and the larger-magnitude member of r3/r4 come straight from the quadratic
    formula; their partners follow from the products r1 r2 = nu xi^2 / lambda and
    r3 r4 = xi^2 (nu lambda - alpha) / lambda^2. Complex pairs are set exactly
    conjugate so bracket combinations are real.

    Args:
        xi: Wavenumber, scalar or array, >= 0.
        params: Fluid parameters with a relaxation time above the floor.
        t_scale: Time scale of the caller, used for the relaxation-time floor.

    Raises:
        DegenerateLambda: ``params.lambda_`` is below ``lambda_floor(t_scale)``.
    """
    lam = params.lambda_
    if lam < lambda_floor(t_scale):
        raise DegenerateLambda(
            f"lambda={lam!r} below floor {lambda_floor(t_scale)!r}; use the second-grade path"
        )
    x = _check_xi(xi)
    xi2 = x * x
    a = params.alpha * xi2
    k = params.nu * xi2
    one_a = 1.0 + a
    disc = one_a * one_a - 4.0 * params.nu * lam * xi2
    s = np.sqrt(disc.astype(np.complex128))

    p = -one_a - s
    r2 = p / (2.0 * lam)
    r1 = 2.0 * k / p

    q_plus = 1.0 - a + s
    q_minus = 1.0 - a - s
    product = 4.0 * xi2 * (params.nu * lam - params.alpha)
    plus_larger = np.abs(q_plus) >= np.abs(q_minus)
    larger = np.where(plus_larger, q_plus, q_minus)
    safe = np.where(larger == 0, 1.0, larger)
    smaller = np.where(larger == 0, 0.0, product / safe)
    r3 = np.where(plus_larger, larger, smaller) / (2.0 * lam)
    r4 = np.where(plus_larger, smaller, larger) / (2.0 * lam)

    oscillating = disc < 0
    r1 = np.where(oscillating, np.conj(r2), r1)
    r3 = np.where(oscillating, (1.0 - a + s) / (2.0 * lam), r3)
    r4 = np.where(oscillating, np.conj(r3), r4)

    degenerate = np.abs(disc) < DEGENERACY_RTOL * one_a * one_a
    return SpectralRoots(
        xi=x, disc=disc, r1=r1, r2=r2, r3=r3, r4=r4, degenerate=np.asarray(degenerate)
    )


def _expm1(z: NDArray[np.complex128]) -> NDArray[np.complex128]:
    low = z.real < EXP_FLOOR
    return np.where(low, -1.0, np.expm1(np.where(low, 0.0, z)))


def _real(value: NDArray[np.complex128], what: str) -> NDArray[np.float64]:
    re, im = value.real, value.imag
    bad = np.abs(im) >= IMAG_RTOL * np.abs(re) + IMAG_ATOL
    if np.any(bad):
        worst = float(np.max(np.abs(im[bad])))
        raise NonRealResult(f"{what} bracket has imaginary part {worst:.3e}")
    return np.asarray(re, dtype=float)


def mode_brackets(
    roots: SpectralRoots, t: ArrayLike, params: FluidParams
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Velocity and stress brackets for precomputed roots.

    ``t`` broadcasts against ``roots.xi``. The brackets are evaluated as

        b_u   = lambda [-r2 r3 expm1(r1 t) + r1 r4 expm1(r2 t)] / (r2 - r1)
        b_tau = [r3 expm1(r1 t) - r4 expm1(r2 t)] / (r2 - r1)

    which equal 1 - lambda [r2 r3 e^{r1 t} - r1 r4 e^{r2 t}] / (r2 - r1) and
    1 - [r4 e^{r2 t} - r3 e^{r1 t}] / (r2 - r1) but stay accurate for small t and xi.
    Double roots use the analytic limit.
    """
    tt = np.asarray(t, dtype=float)
    lam = params.lambda_
    r1, r2, r3, r4 = roots.r1, roots.r2, roots.r3, roots.r4
    deg = roots.degenerate

    e1 = _expm1(r1 * tt)
    e2 = _expm1(r2 * tt)
    gap = np.where(deg, 1.0, r2 - r1)
    b_u = lam * (-r2 * r3 * e1 + r1 * r4 * e2) / gap
    b_tau = (r3 * e1 - r4 * e2) / gap

    if np.any(deg):
        xi2 = roots.xi * roots.xi
        k = params.nu * xi2
        r = -(1.0 + params.alpha * xi2) / (2.0 * lam)
        rt = r * tt
        er = np.where(rt < EXP_FLOOR, 0.0, np.exp(np.maximum(rt, EXP_FLOOR)))
        em = np.where(rt < EXP_FLOOR, -1.0, np.expm1(np.maximum(rt, EXP_FLOOR)))
        limit_u = -em + er * (r + k) * tt
        limit_tau = -em - er * (r + 1.0 / lam) * tt
        b_u = np.where(deg, limit_u, b_u)
        b_tau = np.where(deg, limit_tau, b_tau)

    return _real(b_u, "velocity"), _real(b_tau, "stress")


def mode_bracket_velocity(
    xi: ArrayLike, t: ArrayLike, params: FluidParams, t_scale: float = 1.0
) -> FloatOrArray:
    """
    Velocity bracket 1 - lambda [r2 r3 e^{r1 t} - r1 r4 e^{r2 t}] / (r2 - r1).

    Zero at t = 0 and tends to 1 as t grows for every xi > 0.

    Raises:
        NonRealResult: the complex evaluation is not real within tolerance.
        DegenerateLambda: relaxation time below the floor.
    """
    if np.any(np.asarray(t, dtype=float) < 0):
        raise ConfigurationError("time t must be >= 0")
    b_u, _ = mode_brackets(spectral_roots(xi, params, t_scale), t, params)
    return _output(b_u)


def mode_bracket_stress(
    xi: ArrayLike, t: ArrayLike, params: FluidParams, t_scale: float = 1.0
) -> FloatOrArray:
    """Stress bracket 1 - [r4 e^{r2 t} - r3 e^{r1 t}] / (r2 - r1); zero at t = 0."""
    if np.any(np.asarray(t, dtype=float) < 0):
        raise ConfigurationError("time t must be >= 0")
    _, b_tau = mode_brackets(spectral_roots(xi, params, t_scale), t, params)
    return _output(b_tau)


def second_grade_brackets(
    xi: ArrayLike, t: ArrayLike, params: FluidParams
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Brackets of the lambda -> 0 limit (single mode r = -nu xi^2 / (1 + alpha xi^2)).

    b_u = 1 - e^{rt} and b_tau = 1 - e^{rt} / (1 + alpha xi^2). The stress bracket
    does not vanish at t = 0: a second-grade fluid carries an instantaneous wall stress.
    """
    x = _check_xi(xi)
    xi2 = x * x
    a = params.alpha * xi2
    r = -params.nu * xi2 / (1.0 + a)
    em = np.expm1(np.maximum(r * np.asarray(t, dtype=float), EXP_FLOOR))
    return -em, (a - em) / (1.0 + a)


def newtonian_bracket(xi: ArrayLike, t: ArrayLike, nu: float) -> NDArray[np.float64]:
    """Newtonian bracket 1 - exp(-nu t xi^2)."""
    x = np.asarray(xi, dtype=float)
    return np.asarray(-np.expm1(np.maximum(-nu * np.asarray(t, dtype=float) * x * x, EXP_FLOOR)))


def phi1(z: ArrayLike) -> NDArray[np.complex128] | NDArray[np.float64]:
    """(e^z - 1 - z) / z, by its Taylor series near 0; -(1 + z)/z once e^z underflows."""
    zz = np.asarray(z)
    small = np.abs(zz) < _SERIES_CUTOFF
    low = zz.real < EXP_FLOOR
    zs = np.where(small, zz, 0.0)
    inner = 1 / 24 + zs * (1 / 120 + zs * (1 / 720 + zs / 5040))
    series = zs * (1 / 2 + zs * (1 / 6 + zs * inner))
    zd = np.where(small | low, 1.0, zz)
    direct = (np.expm1(zd) - zd) / zd
    zl = np.where(low, zz, 1.0)
    return np.where(small, series, np.where(low, -(1.0 + zl) / zl, direct))


def integrated_stress_bracket(
    roots: SpectralRoots, t: ArrayLike, params: FluidParams
) -> NDArray[np.float64]:
    """
    Time integral of the stress bracket over [0, t].

    Momentum balance gives nu t xi^2 - b_u = nu xi^2 * this integral, so integrands
    built on it need no cancellation at small xi.
    """
    tt = np.asarray(t, dtype=float)
    lam = params.lambda_
    r1, r2, r3, r4 = roots.r1, roots.r2, roots.r3, roots.r4
    deg = roots.degenerate
    gap = np.where(deg, 1.0, r2 - r1)
    value = tt * (r3 * phi1(r1 * tt) - r4 * phi1(r2 * tt)) / gap

    if np.any(deg):
        xi2 = roots.xi * roots.xi
        r = -(1.0 + params.alpha * xi2) / (2.0 * lam)
        rt = r * tt
        er = np.where(rt < EXP_FLOOR, 0.0, np.exp(np.maximum(rt, EXP_FLOOR)))
        ramp = (er * (rt - 1.0) + 1.0) / (r * r)
        limit = -tt * np.real(phi1(rt)) - (r + 1.0 / lam) * ramp
        value = np.where(deg, limit, value)

    return _real(np.asarray(value, dtype=np.complex128), "integrated stress")


def second_grade_integrated_stress(
    xi: ArrayLike, t: ArrayLike, params: FluidParams
) -> NDArray[np.float64]:
    """Time integral of the second-grade stress bracket over [0, t]."""
    x = _check_xi(xi)
    xi2 = x * x
    a = params.alpha * xi2
    tt = np.asarray(t, dtype=float)
    r = -params.nu * xi2 / (1.0 + a)
    return np.asarray((a * tt - tt * np.real(phi1(r * tt))) / (1.0 + a), dtype=float)


def newtonian_integrated_bracket(xi: ArrayLike, t: ArrayLike, nu: float) -> NDArray[np.float64]:
    """Time integral of 1 - exp(-nu s xi^2) over [0, t]."""
    x = np.asarray(xi, dtype=float)
    tt = np.asarray(t, dtype=float)
    return np.asarray(-tt * np.real(phi1(-nu * tt * x * x)), dtype=float)


def small_xi_limits(t: ArrayLike, params: FluidParams) -> tuple[FloatOrArray, FloatOrArray]:
    """
    Limits of b_u / xi^2 and b_tau / xi^2 as xi -> 0.

    Velocity: nu t. Stress: nu t + (nu lambda - alpha)(e^{-t/lambda} - 1), which
    reads nu t + alpha for the second-grade limit lambda = 0.
    """
    tt = np.asarray(t, dtype=float)
    lam = params.lambda_
    decay = np.expm1(-tt / lam) if lam > 0 else np.full_like(tt, -1.0)
    c_u = params.nu * tt
    c_tau = c_u + (params.nu * lam - params.alpha) * decay
    return _output(np.asarray(c_u)), _output(np.asarray(c_tau))


__all__ = [
    "SpectralRoots",
    "spectral_roots",
    "mode_brackets",
    "mode_bracket_velocity",
    "mode_bracket_stress",
    "second_grade_brackets",
    "newtonian_bracket",
    "phi1",
    "integrated_stress_bracket",
    "second_grade_integrated_stress",
    "newtonian_integrated_bracket",
    "small_xi_limits",
]
