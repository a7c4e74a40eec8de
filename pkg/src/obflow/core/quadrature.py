from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import ConfigurationError, NonFiniteIntegrand
from ..utils.logging import get_logger

_log = get_logger(__name__)

Integrand = Callable[[NDArray[np.float64]], Any]
KernelKind = Literal["sin", "cos"]

# ---- Gauss-Kronrod 7/15 rule (QUADPACK abscissae and weights) ----
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
# Gauss weights of the 7-point rule nested at _XGK[1], _XGK[3], _XGK[5], _XGK[7]
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KRONROD = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5]] = _WG[:3]
_GAUSS[[13, 11, 9]] = _WG[:3]
_GAUSS[7] = _WG[3]

_ROUNDOFF = 50.0 * np.finfo(float).eps

# ---- Panel series defaults ----
MIN_HEAD_PANELS = 8
EULER_TERMS = 13
_FIRST_SWEEP_BUDGET = 0.5
_LATER_SWEEP_BUDGET = 0.05


@dataclass(frozen=True, slots=True)
class QuadratureSpec:
    """
    Tolerances and splitting policy for semi-infinite integrals.

    Attributes:
        rel_tol: Relative tolerance.
        abs_tol: Absolute tolerance.
        max_panels: Cap on the number of Gauss-Kronrod panels evaluated.
        oscillation_period: Wavelength of an oscillation carried by the integrand itself;
            when set, semi-infinite integrals are summed over half-period panels.
        tail_cut: Wavenumber up to which the integrand is integrated directly before
            the tail treatment starts (tail map point, or minimal head of a panel series).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_panels: int = 1_000_000
    oscillation_period: float | None = None
    tail_cut: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise ConfigurationError(f"rel_tol must be > 0, got {self.rel_tol!r}")
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0):
            raise ConfigurationError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if self.max_panels < 1:
            raise ConfigurationError(f"max_panels must be >= 1, got {self.max_panels!r}")
        for name in ("oscillation_period", "tail_cut"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be > 0 when set, got {value!r}")

    def with_overrides(self, **changes: Any) -> QuadratureSpec:
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)


@dataclass(frozen=True, slots=True)
class QuadratureResult:
    """
    Outcome of an integration.

    ``value`` and ``err_estimate`` are floats for scalar integrands and arrays for
    vector-valued ones. ``converged`` implies
    err_estimate <= max(abs_tol, rel_tol * max|value|).
    """

    value: float | NDArray[np.float64]
    err_estimate: float | NDArray[np.float64]
    panels_used: int
    converged: bool

    @property
    def max_error(self) -> float:
        return float(np.max(self.err_estimate))


@dataclass(slots=True)
class _Sweep:
    values: NDArray[np.float64]  # per initial panel
    errors: NDArray[np.float64]
    panels: int
    converged: bool


def _tolerance(spec: QuadratureSpec, total: NDArray[np.float64], budget: float = 1.0) -> float:
    scale = float(np.max(np.abs(total))) if total.size else 0.0
    return budget * max(spec.abs_tol, spec.rel_tol * scale)


def _gk15(
    f: Integrand, a: NDArray[np.float64], b: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.ndim == 0:
        fx = np.broadcast_to(fx, x.shape)
    if fx.shape[:2] != x.shape:
        raise ValueError(f"integrand returned shape {fx.shape}, expected {x.shape} + (...)")
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx).reshape(x.shape + (-1,)).all(axis=-1)]
        raise NonFiniteIntegrand(f"integrand is not finite at xi={float(bad.flat[0])!r}")
    hw = half.reshape((-1,) + (1,) * (fx.ndim - 2))
    kron = np.einsum("k,mk...->m...", _KRONROD, fx) * hw
    gauss = np.einsum("k,mk...->m...", _GAUSS, fx) * hw
    resabs = np.einsum("k,mk...->m...", _KRONROD, np.abs(fx)) * np.abs(hw)
    err = np.maximum(np.abs(kron - gauss), _ROUNDOFF * resabs)
    return kron, err


def _sweep(
    f: Integrand,
    edges: NDArray[np.float64],
    spec: QuadratureSpec,
    *,
    budget: float = 1.0,
    tol_floor: float = 0.0,
    panel_limit: int | None = None,
) -> _Sweep:
    """
    Globally adaptive Gauss-Kronrod sweep over consecutive panels.

    Each panel is bisected until the summed error meets the tolerance; a panel is
    frozen once its error is below its length share of the tolerance. Results are
    accumulated per initial panel.
    """
    n0 = edges.size - 1
    a, b = edges[:-1].copy(), edges[1:].copy()
    origin = np.arange(n0)
    length = float(edges[-1] - edges[0])
    limit = spec.max_panels if panel_limit is None else panel_limit

    values: NDArray[np.float64] | None = None
    errors: NDArray[np.float64] | None = None
    used = 0
    converged = False

    while a.size:
        kron, err = _gk15(f, a, b)
        used += a.size
        if values is None or errors is None:
            values = np.zeros((n0,) + kron.shape[1:])
            errors = np.zeros((n0,) + kron.shape[1:])

        total = values.sum(axis=0) + kron.sum(axis=0)
        total_err = errors.sum(axis=0) + err.sum(axis=0)
        tol = max(_tolerance(spec, total, budget), tol_floor)
        if np.all(total_err <= tol):
            np.add.at(values, origin, kron)
            np.add.at(errors, origin, err)
            converged = True
            break

        err_panel = err.reshape(err.shape[0], -1).max(axis=1)
        width = b - a
        too_small = width <= 1e-13 * np.maximum(np.abs(a) + np.abs(b), 1e-300)
        accept = (err_panel <= tol * width / length) | too_small
        np.add.at(values, origin[accept], kron[accept])
        np.add.at(errors, origin[accept], err[accept])

        rest = ~accept
        n_rest = int(rest.sum())
        if n_rest == 0:
            break
        if used + 2 * n_rest > limit:
            np.add.at(values, origin[rest], kron[rest])
            np.add.at(errors, origin[rest], err[rest])
            break
        mid = 0.5 * (a[rest] + b[rest])
        a = np.concatenate([a[rest], mid])
        b = np.concatenate([mid, b[rest]])
        origin = np.concatenate([origin[rest], origin[rest]])

    assert values is not None and errors is not None
    return _Sweep(values=values, errors=errors, panels=used, converged=converged)


def _result(
    value: NDArray[np.float64], err: NDArray[np.float64], panels: int, converged: bool
) -> QuadratureResult:
    if value.ndim == 0:
        return QuadratureResult(float(value), float(err), panels, converged)
    return QuadratureResult(value, err, panels, converged)


def integrate_finite(
    f: Integrand, a: float, b: float, spec: QuadratureSpec | None = None, *, panels: int = 1
) -> QuadratureResult:
    """
    Adaptive Gauss-Kronrod integral of ``f`` over [a, b].

    Args:
        f: Vectorized integrand; maps an array of nodes to values of the same shape,
            optionally followed by trailing component dimensions.
        a: Lower limit.
        b: Upper limit, >= a.
        spec: Tolerances (defaults to ``QuadratureSpec()``).
        panels: Number of equal initial panels.

    Raises:
        ConfigurationError: b < a or non-finite limits.
        NonFiniteIntegrand: ``f`` produced inf or nan.
    """
    spec = spec or QuadratureSpec()
    if not (math.isfinite(a) and math.isfinite(b)) or b < a:
        raise ConfigurationError(f"invalid integration range [{a!r}, {b!r}]")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    sweep = _sweep(f, np.linspace(a, b, max(panels, 1) + 1), spec)
    return _result(
        sweep.values.sum(axis=0), sweep.errors.sum(axis=0), sweep.panels, sweep.converged
    )


def euler_transform(partial_sums: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Limit of alternating partial sums by repeated averaging.

    Averages neighbouring partial sums until one value is left; the error estimate
    is half the spread of the last two averages.

    Args:
        partial_sums: Array whose first axis runs over at least two partial sums.

    Returns:
        tuple: (estimate, error estimate), shaped like one partial sum.
    """
    level = np.asarray(partial_sums, dtype=float)
    if level.shape[0] < 2:
        raise ValueError("euler_transform needs at least two partial sums")
    while level.shape[0] > 2:
        level = 0.5 * (level[1:] + level[:-1])
    return 0.5 * (level[0] + level[1]), 0.5 * np.abs(level[1] - level[0])


def integrate_panel_series(
    f: Integrand, width: float, spec: QuadratureSpec | None = None
) -> QuadratureResult:
    """
    Integrate ``f`` over [0, inf) as a series of panels of the given width.

    The head (at least MIN_HEAD_PANELS panels, or up to ``spec.tail_cut``) is summed
    directly, the next EULER_TERMS panels are accelerated with Euler averaging. The head
    is doubled until two successive estimates agree within tolerance. Panel integrals
    are computed once and reused across doublings.
    """
    spec = spec or QuadratureSpec()
    if not (math.isfinite(width) and width > 0):
        raise ConfigurationError(f"panel width must be > 0, got {width!r}")
    n_head = MIN_HEAD_PANELS
    if spec.tail_cut is not None:
        n_head = max(n_head, math.ceil(spec.tail_cut / width))

    vals: NDArray[np.float64] | None = None
    errs: NDArray[np.float64] | None = None
    used = 0
    sweeps_converged = True
    prev: NDArray[np.float64] | None = None
    estimate: NDArray[np.float64] | None = None
    total_err: NDArray[np.float64] | None = None
    converged = False

    while True:
        need = n_head + EULER_TERMS
        have = 0 if vals is None else vals.shape[0]
        if need > have:
            if used + (need - have) > spec.max_panels:
                break
            edges = width * np.arange(have, need + 1, dtype=float)
            if prev is None:
                sweep = _sweep(f, edges, spec, budget=_FIRST_SWEEP_BUDGET)
            else:
                floor = _LATER_SWEEP_BUDGET * _tolerance(spec, prev)
                sweep = _sweep(
                    f,
                    edges,
                    spec,
                    budget=_LATER_SWEEP_BUDGET,
                    tol_floor=floor,
                    panel_limit=spec.max_panels - used,
                )
            used += sweep.panels
            sweeps_converged = sweeps_converged and sweep.converged
            vals = sweep.values if vals is None else np.concatenate([vals, sweep.values])
            errs = sweep.errors if errs is None else np.concatenate([errs, sweep.errors])

        assert vals is not None and errs is not None
        stop = not sweeps_converged
        head = vals[:n_head].sum(axis=0)
        partial = head + np.cumsum(vals[n_head:need], axis=0)
        estimate, euler_err = euler_transform(partial)
        quad_err = errs[:need].sum(axis=0)
        if prev is None:
            total_err = euler_err + quad_err
        else:
            total_err = np.maximum(np.abs(estimate - prev), euler_err) + quad_err
            if not stop and np.all(total_err <= _tolerance(spec, estimate)):
                converged = True
                break
        _log.debug(
            "Panel series pass", head_panels=n_head, panels=used, err=float(np.max(total_err))
        )
        if stop:
            break
        prev = estimate
        n_head *= 2

    if estimate is None or total_err is None:
        raise ConfigurationError(
            f"max_panels={spec.max_panels} too small for a panel series of width {width!r}"
        )
    if not converged:
        _log.warning(
            "Panel series did not converge",
            head_panels=n_head,
            panels=used,
            err=float(np.max(total_err)),
        )
    return _result(estimate, total_err, used, converged)


def integrate_semi_infinite(
    f: Integrand, spec: QuadratureSpec | None = None
) -> QuadratureResult:
    """
    Integral of ``f`` over (0, inf).

    Without an oscillation hint, [0, c] is integrated directly and the tail is mapped
    by xi = c / (1 - u) onto a finite range, c = ``spec.tail_cut`` or 1. Both parts run
    in a single adaptive sweep. With ``spec.oscillation_period`` set, the range is
    summed as half-period panels with an accelerated tail.

    The integrand is never evaluated at xi = 0; removable singularities there are the
    caller's business.
    """
    spec = spec or QuadratureSpec()
    if spec.oscillation_period is not None:
        return integrate_panel_series(f, 0.5 * spec.oscillation_period, spec)

    c = spec.tail_cut or 1.0

    def mapped(s: NDArray[np.float64]) -> NDArray[np.float64]:
        head = s < 1.0
        gap = np.where(head, 1.0, 2.0 - s)
        xi = np.where(head, c * s, c / gap)
        jac = np.where(head, c, c / (gap * gap))
        vals = np.asarray(f(xi), dtype=float)
        return vals * jac.reshape(jac.shape + (1,) * (vals.ndim - jac.ndim))

    sweep = _sweep(mapped, np.array([0.0, 1.0, 2.0]), spec)
    if not sweep.converged:
        _log.warning("Semi-infinite integral did not converge", panels=sweep.panels)
    return _result(
        sweep.values.sum(axis=0), sweep.errors.sum(axis=0), sweep.panels, sweep.converged
    )


def integrate_oscillatory(
    f_smooth: Integrand,
    y: ArrayLike,
    kind: KernelKind,
    decay_power: int,
    spec: QuadratureSpec | None = None,
) -> QuadratureResult:
    """
    Integral of f_smooth(xi) * K(y xi) / xi**decay_power over (0, inf), K = sin or cos.

    ``y`` may be a scalar or an array of nearby wall distances; the result then carries
    the shape of ``y`` and all components share one quadrature rule. ``f_smooth``
    receives nodes reshaped to broadcast against ``y``.

    For y > 0 the range is cut into half-period panels of width pi / max(y) and the
    alternating tail is accelerated; y = 0 falls back to ``integrate_semi_infinite``.

    Raises:
        ConfigurationError: negative y, a mix of zero and positive y, or unknown kind.
        NonFiniteIntegrand: the integrand produced inf or nan.
    """
    spec = spec or QuadratureSpec()
    yy = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(yy)) or np.any(yy < 0):
        raise ConfigurationError("y must be finite and >= 0")
    if kind not in ("sin", "cos"):
        raise ConfigurationError(f"kernel kind must be 'sin' or 'cos', got {kind!r}")
    kernel = np.sin if kind == "sin" else np.cos

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        xb = xi.reshape(xi.shape + (1,) * yy.ndim)
        return np.asarray(f_smooth(xb) * kernel(xb * yy) / xb**decay_power)

    if np.all(yy == 0):
        return integrate_semi_infinite(integrand, spec)
    if np.any(yy == 0):
        raise ConfigurationError("y must be all zero or all positive in one integration")
    return integrate_panel_series(integrand, math.pi / float(yy.max()), spec)


__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_oscillatory",
    "integrate_panel_series",
    "euler_transform",
]
