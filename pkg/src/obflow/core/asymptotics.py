from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import ConfigurationError, OutsideAsymptoticRegime, QuadratureFailure
from ..fluid import FlowConfig, FluidParams
from ..utils.logging import get_logger
from .energetics import (
    PHI_FACTOR,
    boundary_layer_thickness,
    dissipation,
    newtonian_reference,
    wall_power,
)
from .fields import (
    TAIL_CUT_SCALE,
    FieldPoint,
    shear_newtonian_closed,
    shear_stress,
    velocity,
    velocity_newtonian_closed,
)
from .quadrature import Integrand, KernelKind, QuadratureSpec, integrate_oscillatory
from .spectral import spectral_roots

_log = get_logger(__name__)

# beta = max(lambda / t, alpha / (nu t)) must stay below this for the expansions
VALIDITY_THRESHOLD = 0.1
# First-order loss of dissipation in units of rho l A^2 t sqrt(nu t / pi) c / t
DISSIPATION_CORRECTION = 3.0 * math.sqrt(2.0) - 4.0

FloatOrArray = float | NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class SmallnessReport:
    """Dimensionless relaxation and retardation times and whether both are small."""

    eps_lambda: float
    eps_retard: float
    beta: float
    valid: bool


@dataclass(frozen=True, slots=True)
class ExpansionTerms:
    """
    Spectral building blocks of the small-time-constant expansion.

    radical:       sqrt((1 + alpha xi^2)^2 - 4 nu lambda xi^2)
    reciprocal:    1 / radical
    exp_r1t:       e^{r1 t}
    r3_ratio:      r3 / (r2 - r1)
    r3_exp:        r3 e^{r1 t} / (r2 - r1)
    velocity_term: lambda r2 r3 e^{r1 t} / (r2 - r1)
    """

    radical: FloatOrArray
    reciprocal: FloatOrArray
    exp_r1t: FloatOrArray
    r3_ratio: FloatOrArray
    r3_exp: FloatOrArray
    velocity_term: FloatOrArray


@dataclass(frozen=True, slots=True)
class OrderReport:
    """
    Errors of the first-order approximations for a decreasing set of relaxation times.

    ``err_L``, ``err_Phi`` and ``err_delta`` belong to the energetics at ``t`` and do not
    depend on ``y``.
    """

    y: float
    t: float
    lambdas: tuple[float, ...]
    err_u: tuple[float, ...]
    err_tau: tuple[float, ...]
    err_L: tuple[float, ...] = ()
    err_Phi: tuple[float, ...] = ()
    err_delta: tuple[float, ...] = ()

    @staticmethod
    def _ratios(errors: tuple[float, ...]) -> tuple[float, ...]:
        return tuple(a / b if b > 0 else math.inf for a, b in zip(errors, errors[1:]))

    @property
    def ratio_u(self) -> tuple[float, ...]:
        return self._ratios(self.err_u)

    @property
    def ratio_tau(self) -> tuple[float, ...]:
        return self._ratios(self.err_tau)

    @property
    def ratio_L(self) -> tuple[float, ...]:
        return self._ratios(self.err_L)

    @property
    def ratio_Phi(self) -> tuple[float, ...]:
        return self._ratios(self.err_Phi)

    @property
    def ratio_delta(self) -> tuple[float, ...]:
        return self._ratios(self.err_delta)


def _output(value: NDArray[np.float64]) -> FloatOrArray:
    return float(value) if value.ndim == 0 else value


def smallness(
    t: float, params: FluidParams, threshold: float = VALIDITY_THRESHOLD
) -> SmallnessReport:
    """
    Measure how small lambda / t and alpha / (nu t) = lambda_r / t are.

    Raises:
        ConfigurationError: t <= 0.
    """
    if not (math.isfinite(t) and t > 0):
        raise ConfigurationError(f"smallness needs t > 0, got {t!r}")
    eps_lambda = params.lambda_ / t
    eps_retard = params.alpha / (params.nu * t)
    beta = max(eps_lambda, eps_retard)
    return SmallnessReport(eps_lambda, eps_retard, beta, beta < threshold)


def expansion_terms(xi: ArrayLike, t: float, params: FluidParams) -> ExpansionTerms:
    """Truncated series of the spectral building blocks, first order in lambda and alpha."""
    x = np.asarray(xi, dtype=float)
    x2 = x * x
    x4 = x2 * x2
    nu, lam, alpha = params.nu, params.lambda_, params.alpha
    gauss = np.exp(-nu * t * x2)
    return ExpansionTerms(
        radical=_output(
            1.0 + (alpha - 2.0 * nu * lam) * x2 - 2.0 * nu * lam * (alpha - nu * lam) * x4
        ),
        reciprocal=_output(1.0 - alpha * x2 + 2.0 * nu * lam * x2),
        exp_r1t=_output(gauss * (1.0 + alpha * nu * t * x4 - nu * nu * t * lam * x4)),
        r3_ratio=_output(-1.0 + alpha * x2 - nu * lam * x2),
        r3_exp=_output(
            -gauss
            * (1.0 + alpha * x2 * (nu * t * x2 - 1.0) + nu * lam * x2 * (1.0 - nu * t * x2))
        ),
        velocity_term=_output(gauss * (1.0 - nu * nu * lam * t * x4)),
    )


def exact_terms(xi: ArrayLike, t: float, params: FluidParams) -> ExpansionTerms:
    """
    The same building blocks from the exact roots.

    Raises:
        DegenerateLambda: lambda is below the floor (the roots need lambda > 0).
    """
    roots = spectral_roots(xi, params, t)
    radical = np.sqrt(roots.disc.astype(complex))
    e1 = np.exp(roots.r1 * t)
    ratio = roots.r3 / (roots.r2 - roots.r1)
    return ExpansionTerms(
        radical=_output(radical.real),
        reciprocal=_output((1.0 / radical).real),
        exp_r1t=_output(e1.real),
        r3_ratio=_output(ratio.real),
        r3_exp=_output((ratio * e1).real),
        velocity_term=_output((params.lambda_ * roots.r2 * ratio * e1).real),
    )


def fast_mode_weight(xi: ArrayLike, t: float, params: FluidParams) -> float:
    """Largest |r4 e^{r2 t} / (r2 - r1)| over ``xi``: the size of the neglected fast mode."""
    roots = spectral_roots(xi, params, t)
    weight = roots.r4 * np.exp(np.maximum((roots.r2 * t).real, -700.0)) / (roots.r2 - roots.r1)
    return float(np.max(np.abs(weight)))


def _coefficient(params: FluidParams, retardation: bool) -> float:
    if retardation:
        return params.lambda_ - params.lambda_r
    return params.lambda_


def _require_regime(p: FieldPoint, params: FluidParams) -> None:
    report = smallness(p.t, params)
    if not report.valid:
        raise OutsideAsymptoticRegime(
            f"beta = {report.beta:.3g} at t={p.t!r} is not below {VALIDITY_THRESHOLD}"
        )


def velocity_approx(
    p: FieldPoint, params: FluidParams, flow: FlowConfig, *, retardation: bool = False
) -> float:
    """
    First-order velocity for small time constants.

    u = u_N - (A y / 2) sqrt(t / (nu pi)) exp(-y^2 / (4 nu t)) c / t with c = lambda,
    or c = lambda - lambda_r when ``retardation`` is set.

    Raises:
        OutsideAsymptoticRegime: beta is not below the validity threshold.
    """
    _require_regime(p, params)
    nu, t, y = params.nu, p.t, p.y
    correction = (
        flow.accel * y / 2.0 * math.sqrt(t / (nu * math.pi)) * math.exp(-y * y / (4.0 * nu * t))
    )
    coef = _coefficient(params, retardation)
    return velocity_newtonian_closed(p, flow, nu) - correction * coef / t


def shear_approx(
    p: FieldPoint, params: FluidParams, flow: FlowConfig, *, retardation: bool = False
) -> float:
    """
    First-order shear stress for small time constants.

    tau = tau_N + (mu A / 2) sqrt(t / (nu pi)) (1 + y^2 / (2 nu t)) exp(-y^2 / (4 nu t)) c / t.

    Raises:
        OutsideAsymptoticRegime: beta is not below the validity threshold.
    """
    _require_regime(p, params)
    nu, t, y = params.nu, p.t, p.y
    shape = (1.0 + y * y / (2.0 * nu * t)) * math.exp(-y * y / (4.0 * nu * t))
    correction = params.mu * flow.accel / 2.0 * math.sqrt(t / (nu * math.pi)) * shape
    coef = _coefficient(params, retardation)
    return shear_newtonian_closed(p, flow, params) + correction * coef / t


def _small_ratio(t: float, params: FluidParams, retardation: bool) -> float:
    _require_regime(FieldPoint(0.0, t), params)
    return _coefficient(params, retardation) / t


def wall_power_approx(
    t: float, params: FluidParams, flow: FlowConfig, *, retardation: bool = False
) -> float:
    """
    First-order wall power l A t tau(0, t) = L_N (1 - c / (4 t)).

    Raises:
        OutsideAsymptoticRegime: beta is not below the validity threshold.
    """
    eps = _small_ratio(t, params, retardation)
    return newtonian_reference(t, params, flow).L * (1.0 - 0.25 * eps)


def dissipation_approx(
    t: float, params: FluidParams, flow: FlowConfig, *, retardation: bool = False
) -> float:
    """
    First-order dissipation from the approximate profiles.

    Phi = rho l A^2 t sqrt(nu t / pi) (8 (sqrt 2 - 1) / 3 - (3 sqrt 2 - 4) c / t).

    Raises:
        OutsideAsymptoticRegime: beta is not below the validity threshold.
    """
    eps = _small_ratio(t, params, retardation)
    ref = newtonian_reference(t, params, flow)
    return ref.Phi * (1.0 - DISSIPATION_CORRECTION / PHI_FACTOR * eps)


def thickness_approx(t: float, params: FluidParams, *, retardation: bool = False) -> float:
    """
    First-order boundary-layer thickness sqrt(nu t / pi) (4/3 - c / t).

    Like the exact thickness it does not depend on the plate acceleration.

    Raises:
        OutsideAsymptoticRegime: beta is not below the validity threshold.
    """
    eps = _small_ratio(t, params, retardation)
    return (4.0 / 3.0 - eps) * math.sqrt(params.nu * t / math.pi)


def _correction_integral(
    what: str,
    f_smooth: Integrand,
    p: FieldPoint,
    kind: KernelKind,
    params: FluidParams,
    spec: QuadratureSpec | None,
) -> float:
    spec = spec or QuadratureSpec()
    if spec.tail_cut is None:
        spec = spec.with_overrides(tail_cut=TAIL_CUT_SCALE / math.sqrt(params.nu * p.t))
    res = integrate_oscillatory(f_smooth, p.y, kind, 0, spec)
    if not res.converged:
        raise QuadratureFailure(
            f"{what} correction integral did not converge",
            quantity=what,
            y=p.y,
            t=p.t,
            err_estimate=res.max_error,
        )
    return float(res.value)


def velocity_correction_integral(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    retardation: bool = False,
    spec: QuadratureSpec | None = None,
) -> float:
    """Velocity correction -(2 nu A t / pi) c int xi exp(-nu t xi^2) sin(y xi) dxi."""
    if p.t <= 0:
        raise ConfigurationError(f"correction integrals need t > 0, got t={p.t!r}")
    nu_t = params.nu * p.t
    integral = _correction_integral(
        "velocity", lambda xb: xb * np.exp(-nu_t * xb * xb), p, "sin", params, spec
    )
    coef = _coefficient(params, retardation)
    return -2.0 * params.nu * flow.accel * p.t / math.pi * coef * integral


def shear_correction_integral(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    retardation: bool = False,
    spec: QuadratureSpec | None = None,
) -> float:
    """Stress correction (2 mu A / pi) c int (1 - nu t xi^2) exp(-nu t xi^2) cos(y xi) dxi."""
    if p.t <= 0:
        raise ConfigurationError(f"correction integrals need t > 0, got t={p.t!r}")
    nu_t = params.nu * p.t
    integral = _correction_integral(
        "stress",
        lambda xb: (1.0 - nu_t * xb * xb) * np.exp(-nu_t * xb * xb),
        p,
        "cos",
        params,
        spec,
    )
    return 2.0 * params.mu * flow.accel / math.pi * _coefficient(params, retardation) * integral


def order_of_accuracy(
    y: float,
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    lambdas: Sequence[float],
    *,
    retardation: bool = False,
    spec: QuadratureSpec | None = None,
) -> OrderReport:
    """
    Errors of the first-order fields and energetics against the exact ones.

    Each relaxation time in ``lambdas`` keeps the ratio lambda_r / lambda of ``params``
    (a Maxwell fluid stays Maxwell). With first-order approximations, halving lambda
    should cut the errors about four times.

    Raises:
        OutsideAsymptoticRegime: some lambda leaves the small-parameter regime.
        QuadratureFailure: an exact field did not converge.
    """
    if not lambdas:
        raise ConfigurationError("order_of_accuracy needs at least one relaxation time")
    share = params.lambda_r / params.lambda_ if params.lambda_ > 0 else 0.0
    p = FieldPoint(y, t)
    errors: dict[str, list[float]] = {k: [] for k in ("u", "tau", "L", "Phi", "delta")}
    for lam in lambdas:
        current = replace(params, lambda_=lam, lambda_r=share * lam)
        pairs = {
            "u": (
                velocity_approx(p, current, flow, retardation=retardation),
                velocity(p, current, flow, spec=spec),
            ),
            "tau": (
                shear_approx(p, current, flow, retardation=retardation),
                shear_stress(p, current, flow, spec=spec),
            ),
            "L": (
                wall_power_approx(t, current, flow, retardation=retardation),
                wall_power(t, current, flow, spec=spec),
            ),
            "Phi": (
                dissipation_approx(t, current, flow, retardation=retardation),
                dissipation(t, current, flow, spec=spec),
            ),
            "delta": (
                thickness_approx(t, current, retardation=retardation),
                boundary_layer_thickness(t, current, flow, spec=spec),
            ),
        }
        for key, (approx, exact) in pairs.items():
            errors[key].append(abs(approx - exact))
        _log.debug("Asymptotic error", lambda_=lam, **{k: v[-1] for k, v in errors.items()})
    return OrderReport(
        y=y,
        t=t,
        lambdas=tuple(lambdas),
        err_u=tuple(errors["u"]),
        err_tau=tuple(errors["tau"]),
        err_L=tuple(errors["L"]),
        err_Phi=tuple(errors["Phi"]),
        err_delta=tuple(errors["delta"]),
    )


__all__ = [
    "VALIDITY_THRESHOLD",
    "DISSIPATION_CORRECTION",
    "SmallnessReport",
    "ExpansionTerms",
    "OrderReport",
    "smallness",
    "expansion_terms",
    "exact_terms",
    "fast_mode_weight",
    "velocity_approx",
    "shear_approx",
    "wall_power_approx",
    "dissipation_approx",
    "thickness_approx",
    "velocity_correction_integral",
    "shear_correction_integral",
    "order_of_accuracy",
]
