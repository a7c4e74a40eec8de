from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import ConfigurationError, DegenerateLambda, QuadratureFailure, StencilOutOfDomain
from ..fluid import FlowConfig, FluidModel, FluidParams, classify, lambda_floor, with_model
from ..utils.logging import get_logger
from .quadrature import QuadratureSpec, integrate_oscillatory
from .spectral import mode_brackets, newtonian_bracket, second_grade_brackets, spectral_roots
from .special import ierfc

_log = get_logger(__name__)

Quantity = Literal["velocity", "stress", "gradient"]
ModelChoice = FluidModel | str | None

# Head of the xi-integrals reaches TAIL_CUT_SCALE / sqrt(nu t)
TAIL_CUT_SCALE = 8.0
# Finite-difference steps of the residual check, relative to sqrt(nu t) and t
FD_REL_STEP = 1e-3
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_TINY = 1e-300


@dataclass(frozen=True, slots=True)
class FieldPoint:
    """Wall distance ``y`` and time ``t``, both >= 0."""

    y: float
    t: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.y) and self.y >= 0):
            raise ConfigurationError(f"y must be finite and >= 0, got {self.y!r}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ConfigurationError(f"t must be finite and >= 0, got {self.t!r}")


@dataclass(frozen=True, slots=True)
class FieldValue:
    """Velocity and shear stress at one point with their quadrature error estimates."""

    u: float
    tau: float
    quad_err_u: float = 0.0
    quad_err_tau: float = 0.0

    @property
    def quad_err(self) -> float:
        return self.quad_err_u + self.quad_err_tau


@dataclass(frozen=True, slots=True)
class PdeResidual:
    """
    Finite-difference residuals of the momentum and constitutive equations.

    ``*_scale`` is the largest magnitude among the terms of each equation and the plate
    scale of that equation; the relative residuals divide by it.
    """

    momentum: float
    constitutive: float
    momentum_scale: float
    constitutive_scale: float

    @property
    def relative_momentum(self) -> float:
        return abs(self.momentum) / max(self.momentum_scale, _TINY)

    @property
    def relative_constitutive(self) -> float:
        return abs(self.constitutive) / max(self.constitutive_scale, _TINY)


def coerce_model(model: ModelChoice) -> FluidModel | None:
    """Turn a ``--model`` tag into a FluidModel; ``None`` and "auto" mean classify."""
    if model is None or isinstance(model, FluidModel):
        return model
    if model == "auto":
        return None
    try:
        return FluidModel(model)
    except ValueError as exc:
        raise ConfigurationError(f"unknown model {model!r}") from exc


def resolve_model(
    params: FluidParams, model: ModelChoice = None, t_scale: float = 1.0
) -> tuple[FluidParams, FluidModel]:
    """
    Pick the evaluation path for ``params``.

    Returns the effective parameters and one of NEWTONIAN (closed forms),
    SECOND_GRADE (single-mode integrals) or OLDROYD_B (two-mode integrals, which
    also serve Maxwell fluids). Automatic dispatch routes relaxation times below
    ``lambda_floor(t_scale)`` to the second-grade path.

    Raises:
        DegenerateLambda: a two-mode model was forced with a relaxation time below the floor.
    """
    forced = coerce_model(model)
    if forced is None:
        kind = classify(params)
        if kind is FluidModel.NEWTONIAN:
            return with_model(params, FluidModel.NEWTONIAN), FluidModel.NEWTONIAN
        if kind is FluidModel.SECOND_GRADE or params.lambda_ < lambda_floor(t_scale):
            return replace(params, lambda_=0.0), FluidModel.SECOND_GRADE
        return params, FluidModel.OLDROYD_B

    effective = with_model(params, forced)
    if forced in (FluidModel.NEWTONIAN, FluidModel.SECOND_GRADE):
        return effective, forced
    if effective.lambda_ < lambda_floor(t_scale):
        raise DegenerateLambda(f"{forced.value} model needs lambda >= {lambda_floor(t_scale)!r}")
    return effective, FluidModel.OLDROYD_B


def wave_front(t: float, params: FluidParams) -> float:
    """Position t sqrt(nu/lambda) of the Maxwell shear-wave front; inf for other fluids."""
    if params.lambda_ > 0 and params.lambda_r == 0:
        return t * math.sqrt(params.nu / params.lambda_)
    return math.inf


def _newtonian_grid(
    quantity: Quantity,
    ys: NDArray[np.float64],
    ts: NDArray[np.float64],
    nu: float,
    rho: float,
    accel: float,
) -> NDArray[np.float64]:
    y = ys[:, None]
    t = ts[None, :]
    root = np.sqrt(nu * t)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(t > 0, y / (2.0 * np.where(t > 0, root, 1.0)), 0.0)
        if quantity == "velocity":
            out = 4.0 * accel * t * ierfc(x, 2)
        elif quantity == "stress":
            out = -2.0 * rho * accel * root * ierfc(x, 1)
        else:
            out = -2.0 * accel * t * ierfc(x, 1) / np.where(t > 0, root, 1.0)
    return np.where(t > 0, np.broadcast_to(out, (ys.size, ts.size)), 0.0)


def velocity_newtonian_closed(p: FieldPoint, flow: FlowConfig, nu: float) -> float:
    """u_N = 4 A t i^2erfc(y / (2 sqrt(nu t))); zero at t = 0."""
    grid = _newtonian_grid("velocity", np.array([p.y]), np.array([p.t]), nu, 1.0, flow.accel)
    return float(grid[0, 0])


def shear_newtonian_closed(p: FieldPoint, flow: FlowConfig, params: FluidParams) -> float:
    """tau_N = -2 rho A sqrt(nu t) i^1erfc(y / (2 sqrt(nu t))); zero at t = 0."""
    grid = _newtonian_grid(
        "stress", np.array([p.y]), np.array([p.t]), params.nu, params.rho, flow.accel
    )
    return float(grid[0, 0])


def _prepare_spec(spec: QuadratureSpec | None, nu: float, t_min: float) -> QuadratureSpec:
    spec = spec or QuadratureSpec()
    if spec.tail_cut is None:
        spec = spec.with_overrides(tail_cut=TAIL_CUT_SCALE / math.sqrt(nu * t_min))
    return spec


def _kernel(quantity: Quantity) -> tuple[Literal["sin", "cos"], int]:
    return ("sin", 3) if quantity == "velocity" else ("cos", 2)


def _prefactor(quantity: Quantity, params: FluidParams, flow: FlowConfig) -> float:
    if quantity == "stress":
        return -2.0 * params.rho * flow.accel / math.pi
    return -2.0 * flow.accel / (params.nu * math.pi)


def _correction(
    quantity: Quantity,
    ys: NDArray[np.float64],
    ts: NDArray[np.float64],
    params: FluidParams,
    path: FluidModel,
    flow: FlowConfig,
    spec: QuadratureSpec,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Non-Newtonian part: prefactor * int (b - b_N) K(y xi) / xi^p over a (y, t) block."""
    kind, power = _kernel(quantity)
    t_scale = float(ts.max())
    pick_velocity = quantity != "stress"

    def bracket_excess(xb: NDArray[np.float64]) -> NDArray[np.float64]:
        if path is FluidModel.OLDROYD_B:
            b_u, b_tau = mode_brackets(spectral_roots(xb, params, t_scale), ts, params)
        else:
            b_u, b_tau = second_grade_brackets(xb, ts, params)
        bracket = b_u if pick_velocity else b_tau
        return bracket - newtonian_bracket(xb, ts, params.nu)

    grid_y = np.broadcast_to(ys[:, None], (ys.size, ts.size))
    res = integrate_oscillatory(bracket_excess, grid_y, kind, power, spec)
    scale = _prefactor(quantity, params, flow)
    if not res.converged:
        raise QuadratureFailure(
            f"{quantity} integral did not converge",
            quantity=quantity,
            y=ys.tolist(),
            t=ts.tolist(),
            err_estimate=abs(scale) * res.max_error,
        )
    return scale * np.asarray(res.value), abs(scale) * np.asarray(res.err_estimate)


def field_grid(
    ys: ArrayLike,
    ts: ArrayLike,
    params: FluidParams,
    flow: FlowConfig,
    *,
    quantity: Quantity = "velocity",
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Evaluate one field quantity on the tensor grid ``ys`` x ``ts``.

    Intended for closely spaced points such as finite-difference stencils: all
    positive wall distances share one quadrature rule, so the result is a smooth
    function of (y, t). Non-Newtonian fluids are evaluated as the Newtonian closed
    form plus the integral of the bracket excess over the Newtonian bracket.

    Args:
        ys: Wall distances, >= 0.
        ts: Times, >= 0.
        params: Fluid parameters.
        flow: Plate acceleration and slab length.
        quantity: "velocity", "stress" or "gradient" (du/dy).
        spec: Quadrature settings; ``tail_cut`` defaults to 8 / sqrt(nu t_min).
        model: Forced model tag, or None / "auto" to classify.

    Returns:
        tuple: (values, error estimates), each of shape (len(ys), len(ts)).

    Raises:
        QuadratureFailure: an integral did not converge.
    """
    y_arr = np.atleast_1d(np.asarray(ys, dtype=float))
    t_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    for name, arr in (("y", y_arr), ("t", t_arr)):
        if arr.ndim != 1 or not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ConfigurationError(f"{name} values must be a finite 1-D set >= 0")

    t_pos = t_arr > 0
    t_scale = float(t_arr.max()) if t_pos.any() else 1.0
    effective, path = resolve_model(params, model, t_scale)
    values = _newtonian_grid(quantity, y_arr, t_arr, effective.nu, effective.rho, flow.accel)
    errors = np.zeros_like(values)
    if path is FluidModel.NEWTONIAN or flow.accel == 0 or not t_pos.any():
        return values, errors

    t_idx = np.flatnonzero(t_pos)
    spec = _prepare_spec(spec, effective.nu, float(t_arr[t_pos].min()))
    maxwell = path is FluidModel.OLDROYD_B and effective.alpha == 0
    _log.debug(
        "Evaluating field block",
        quantity=quantity,
        path=path.value,
        points=int(y_arr.size * t_idx.size),
    )

    for y_mask in (y_arr == 0, y_arr > 0):
        y_idx = np.flatnonzero(y_mask)
        if not y_idx.size:
            continue
        if maxwell and y_arr[y_idx[0]] == 0:
            # The wall integrand oscillates with the shear wave itself
            for j in t_idx:
                period = 2.0 * math.pi * math.sqrt(effective.lambda_ / effective.nu) / t_arr[j]
                corr, err = _correction(
                    quantity,
                    y_arr[y_idx],
                    t_arr[[j]],
                    effective,
                    path,
                    flow,
                    spec.with_overrides(oscillation_period=period),
                )
                values[np.ix_(y_idx, [j])] += corr
                errors[np.ix_(y_idx, [j])] += err
            continue
        corr, err = _correction(
            quantity, y_arr[y_idx], t_arr[t_idx], effective, path, flow, spec
        )
        values[np.ix_(y_idx, t_idx)] += corr
        errors[np.ix_(y_idx, t_idx)] += err
    return values, errors


def _point(
    quantity: Quantity,
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    spec: QuadratureSpec | None,
    model: ModelChoice,
) -> tuple[float, float]:
    vals, errs = field_grid(
        [p.y], [p.t], params, flow, quantity=quantity, spec=spec, model=model
    )
    return float(vals[0, 0]), float(errs[0, 0])


def velocity(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Velocity u(y, t) of the fluid above the accelerating plate.

    u(0, t) = A t, u(y, 0) = 0 and u -> 0 far from the wall.

    Raises:
        QuadratureFailure: the wavenumber integral did not converge.
    """
    return _point("velocity", p, params, flow, spec, model)[0]


def shear_stress(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """Shear stress tau(y, t); negative at the wall for A > 0."""
    return _point("stress", p, params, flow, spec, model)[0]


def velocity_gradient(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """Wall-normal velocity gradient du/dy(y, t)."""
    return _point("gradient", p, params, flow, spec, model)[0]


def field_value(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> FieldValue:
    """Velocity and stress at one point together with their error estimates."""
    u, err_u = _point("velocity", p, params, flow, spec, model)
    tau, err_tau = _point("stress", p, params, flow, spec, model)
    return FieldValue(u=u, tau=tau, quad_err_u=err_u, quad_err_tau=err_tau)


def _newtonian_integral(
    quantity: Quantity,
    p: FieldPoint,
    flow: FlowConfig,
    params: FluidParams,
    spec: QuadratureSpec | None,
) -> float:
    if p.t == 0 or flow.accel == 0:
        return 0.0
    kind, power = _kernel(quantity)
    spec = _prepare_spec(spec, params.nu, p.t)
    res = integrate_oscillatory(
        lambda xb: newtonian_bracket(xb, p.t, params.nu), p.y, kind, power, spec
    )
    if not res.converged:
        raise QuadratureFailure(
            "Newtonian integral did not converge",
            quantity=quantity,
            y=p.y,
            t=p.t,
            err_estimate=res.max_error,
        )
    integral = _prefactor(quantity, params, flow) * float(res.value)
    return flow.accel * p.t + integral if quantity == "velocity" else integral


def velocity_newtonian_integral(
    p: FieldPoint, flow: FlowConfig, nu: float, *, spec: QuadratureSpec | None = None
) -> float:
    """Newtonian velocity from A t - (2A/(nu pi)) int b_N sin(y xi) / xi^3."""
    return _newtonian_integral("velocity", p, flow, FluidParams(nu=nu), spec)


def shear_newtonian_integral(
    p: FieldPoint, flow: FlowConfig, params: FluidParams, *, spec: QuadratureSpec | None = None
) -> float:
    """Newtonian stress from its cosine-integral form -(2 rho A / pi) int b_N cos(y xi) / xi^2."""
    return _newtonian_integral("stress", p, flow, params, spec)


def second_grade_initial_stress(y: float, params: FluidParams, flow: FlowConfig) -> float:
    """
    Stress of a second-grade fluid just after the start, -rho A sqrt(alpha) exp(-y / sqrt(alpha)).

    The retardation term responds instantly to the plate acceleration, so the stress
    jumps from zero at t = 0 to this profile at t = 0+.
    """
    if params.alpha == 0 or flow.accel == 0:
        return 0.0
    root = math.sqrt(params.alpha)
    return -params.rho * flow.accel * root * math.exp(-y / root)


def pde_residual(
    p: FieldPoint,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> PdeResidual:
    """
    Residuals of the governing equations on the computed fields.

    Momentum: lambda u_tt + u_t - nu (1 + lambda_r d/dt) u_yy.
    Constitutive: (1 + lambda d/dt) tau - mu (1 + lambda_r d/dt) u_y.
    Both use five-point central differences with h_y = 1e-3 sqrt(nu t) and
    h_t = 1e-3 t on a 5 x 5 (y, t) stencil evaluated with one shared quadrature rule.
    The scales never drop below the plate scales |A| and mu |A| sqrt(t / nu), so the
    relative residuals stay meaningful where the fields themselves vanish.

    Raises:
        StencilOutOfDomain: the stencil leaves y >= 0, t > 0, or reaches the Maxwell
            shear-wave front, where the fields are not differentiable and vanish beyond.
    """
    effective, _ = resolve_model(params, model, p.t if p.t > 0 else 1.0)
    if p.t <= 0:
        raise StencilOutOfDomain(f"residual needs t > 0, got t={p.t!r}")
    h_y = FD_REL_STEP * math.sqrt(effective.nu * p.t)
    h_t = FD_REL_STEP * p.t
    if p.y - 2.0 * h_y < 0 or p.t - 2.0 * h_t < 0:
        raise StencilOutOfDomain(f"stencil around y={p.y!r}, t={p.t!r} leaves the domain")
    front = wave_front(p.t - 2.0 * h_t, effective)
    if p.y + 2.0 * h_y >= front:
        raise StencilOutOfDomain(
            f"stencil around y={p.y!r}, t={p.t!r} reaches the shear-wave front at {front!r}"
        )

    offsets = np.arange(-2.0, 3.0)
    ys = p.y + h_y * offsets
    ts = p.t + h_t * offsets
    u, _ = field_grid(ys, ts, params, flow, quantity="velocity", spec=spec, model=model)
    tau, _ = field_grid([p.y], ts, params, flow, quantity="stress", spec=spec, model=model)

    lam, lam_r, nu, mu = effective.lambda_, effective.lambda_r, effective.nu, effective.mu
    u_row = u[2, :]
    u_t = float(_D1 @ u_row) / h_t
    u_tt = float(_D2 @ u_row) / h_t**2
    u_yy_t = (_D2 @ u) / h_y**2
    u_y_t = (_D1 @ u) / h_y
    u_yy = float(u_yy_t[2])
    u_tyy = float(_D1 @ u_yy_t) / h_t
    u_y = float(u_y_t[2])
    u_ty = float(_D1 @ u_y_t) / h_t
    tau_c = float(tau[0, 2])
    tau_t = float(_D1 @ tau[0, :]) / h_t

    momentum = lam * u_tt + u_t - nu * (u_yy + lam_r * u_tyy)
    constitutive = tau_c + lam * tau_t - mu * (u_y + lam_r * u_ty)
    accel = abs(flow.accel)
    return PdeResidual(
        momentum=momentum,
        constitutive=constitutive,
        momentum_scale=max(
            accel, abs(u_t), abs(nu * u_yy), abs(lam * u_tt), abs(nu * lam_r * u_tyy)
        ),
        constitutive_scale=max(
            mu * accel * math.sqrt(p.t / nu),
            abs(tau_c),
            abs(mu * u_y),
            abs(lam * tau_t),
            abs(mu * lam_r * u_ty),
        ),
    )


def profile(
    ys: Sequence[float],
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    quantity: Quantity = "velocity",
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    One quantity at many wall distances, each integrated with its own rule.

    Use this for widely spread ``ys`` (y-quadratures, output grids); ``field_grid``
    is for stencils.
    """
    values = np.empty(len(ys))
    errors = np.empty(len(ys))
    for i, y in enumerate(ys):
        vals, errs = field_grid([y], [t], params, flow, quantity=quantity, spec=spec, model=model)
        values[i], errors[i] = vals[0, 0], errs[0, 0]
    return values, errors


__all__ = [
    "FieldPoint",
    "FieldValue",
    "PdeResidual",
    "coerce_model",
    "resolve_model",
    "wave_front",
    "velocity",
    "shear_stress",
    "velocity_gradient",
    "field_value",
    "field_grid",
    "profile",
    "velocity_newtonian_closed",
    "shear_newtonian_closed",
    "velocity_newtonian_integral",
    "shear_newtonian_integral",
    "second_grade_initial_stress",
    "pde_residual",
]
