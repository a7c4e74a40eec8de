from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from ..errors import ConfigurationError, QuadratureFailure
from ..fluid import FlowConfig, FluidModel, FluidParams, classify
from ..utils.logging import get_logger
from .fields import (
    TAIL_CUT_SCALE,
    FieldPoint,
    ModelChoice,
    coerce_model,
    profile,
    resolve_model,
    shear_stress,
    wave_front,
)
from .quadrature import QuadratureSpec, integrate_finite, integrate_semi_infinite
from .spectral import (
    integrated_stress_bracket,
    mode_brackets,
    newtonian_bracket,
    newtonian_integrated_bracket,
    second_grade_brackets,
    second_grade_integrated_stress,
    spectral_roots,
)

_log = get_logger(__name__)

KineticMethod = Literal["quadrature", "spectral"]

# Newtonian dissipation constant 8 (sqrt 2 - 1) / 3
PHI_FACTOR = 8.0 * (math.sqrt(2.0) - 1.0) / 3.0
KINETIC_FACTOR = 0.4 * (2.0 - PHI_FACTOR)
BALANCE_FLOOR = 1e-30
# Step of the energy-rate difference, relative to t
RATE_REL_STEP = 1e-2
Y_CUT_SCALE = 15.0
MAX_Y_DOUBLINGS = 8
# Tolerance of the literal tau * du/dy check
DOUBLE_INTEGRAL_REL_TOL = 1e-7
# Ordering flags need a gap of this many rel_tol below the Newtonian value
ORDERING_SLACK = 10.0

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True, slots=True)
class NewtonianEnergetics:
    """Closed-form energetics of a Newtonian fluid on the accelerating plate."""

    L: float
    Phi: float
    delta: float
    kinetic_energy: float

    @property
    def dEkin_dt(self) -> float:
        return -self.L - self.Phi


@dataclass(frozen=True, slots=True)
class KineticEnergyRate:
    """dE_kin/dt from the balance -L - Phi and from differencing E_kin in time."""

    balance: float
    finite_difference: float


@dataclass(frozen=True, slots=True)
class EnergeticsReport:
    """
    Energy budget of the slab at time ``t``.

    ``dEkin_dt`` is the finite-difference rate, so ``balance_residual`` measures how
    well the computed fields satisfy dE_kin/dt + L + Phi = 0. The ordering flags compare with
    the Newtonian reference only outside ORDERING_SLACK * rel_tol of it.
    """

    model: str
    t: float
    L: float
    Phi: float
    delta: float
    dEkin_dt: float
    balance_residual: float
    kinetic_energy: float
    dEkin_dt_balance: float
    newtonian: NewtonianEnergetics
    rel_tol: float = 1e-9

    def _below(self, value: float, reference: float) -> bool:
        # differences inside the quadrature error do not count
        return value < reference - ORDERING_SLACK * self.rel_tol * abs(reference)

    @property
    def L_below_newtonian(self) -> bool:
        return self._below(abs(self.L), abs(self.newtonian.L))

    @property
    def Phi_below_newtonian(self) -> bool:
        return self._below(self.Phi, self.newtonian.Phi)

    @property
    def delta_below_newtonian(self) -> bool:
        return self._below(self.delta, self.newtonian.delta)


def _require_time(t: float) -> None:
    if not (math.isfinite(t) and t > 0):
        raise ConfigurationError(f"energetics need t > 0, got {t!r}")


def newtonian_reference(t: float, params: FluidParams, flow: FlowConfig) -> NewtonianEnergetics:
    """
    Newtonian wall power, dissipation, thickness and kinetic energy at time ``t``.

    With s = sqrt(nu t / pi) and c = 8 (sqrt 2 - 1) / 3:
    L_N = -2 rho l A^2 t s, Phi_N = c rho l A^2 t s, delta_N = 4 s / 3 and
    E_N = 2/5 (2 - c) rho l A^2 t^2 s.
    """
    _require_time(t)
    root = math.sqrt(params.nu * t / math.pi)
    scale = params.rho * flow.slab_length * flow.accel**2
    return NewtonianEnergetics(
        L=-2.0 * scale * t * root,
        Phi=PHI_FACTOR * scale * t * root,
        delta=4.0 / 3.0 * root,
        kinetic_energy=KINETIC_FACTOR * scale * t * t * root,
    )


def _xi_spec(
    spec: QuadratureSpec | None, params: FluidParams, path: FluidModel, t: float
) -> QuadratureSpec:
    spec = spec or QuadratureSpec()
    changes: dict[str, float] = {}
    if spec.tail_cut is None:
        changes["tail_cut"] = TAIL_CUT_SCALE / math.sqrt(params.nu * t)
    if path is FluidModel.OLDROYD_B and params.alpha == 0 and spec.oscillation_period is None:
        # Maxwell brackets oscillate in xi with this wavelength
        changes["oscillation_period"] = 2.0 * math.pi * math.sqrt(params.lambda_ / params.nu) / t
    return spec.with_overrides(**changes) if changes else spec


def _brackets(
    xi: NDArray[np.float64], t: float, params: FluidParams, path: FluidModel
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Velocity bracket, stress bracket and the time integral of the stress bracket."""
    if path is FluidModel.OLDROYD_B:
        roots = spectral_roots(xi, params, t)
        b_u, b_tau = mode_brackets(roots, t, params)
        return b_u, b_tau, integrated_stress_bracket(roots, t, params)
    if path is FluidModel.SECOND_GRADE:
        b_u, b_tau = second_grade_brackets(xi, t, params)
        return b_u, b_tau, second_grade_integrated_stress(xi, t, params)
    b_n = newtonian_bracket(xi, t, params.nu)
    return b_n, b_n, newtonian_integrated_bracket(xi, t, params.nu)


def _xi_integral(
    what: str,
    integrand: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    t: float,
    spec: QuadratureSpec,
) -> tuple[float, float]:
    res = integrate_semi_infinite(integrand, spec)
    if not res.converged:
        raise QuadratureFailure(
            f"{what} integral did not converge", quantity=what, t=t, err_estimate=res.max_error
        )
    return float(res.value), float(res.err_estimate)


def wall_power(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Power L = l u(0, t) tau(0, t) = l A t tau_w(t) delivered by the plate.

    Negative for A > 0: the plate works against the fluid.

    Raises:
        ConfigurationError: t <= 0.
        QuadratureFailure: the wall stress integral did not converge.
    """
    _require_time(t)
    if flow.accel == 0:
        return 0.0
    tau_w = shear_stress(FieldPoint(0.0, t), params, flow, spec=spec, model=model)
    return flow.slab_length * flow.accel * t * tau_w


def wall_power_integral(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """Wall power from its wavenumber form -(2 rho l A^2 t / pi) int b_tau / xi^2."""
    _require_time(t)
    if flow.accel == 0:
        return 0.0
    effective, path = resolve_model(params, model, t)
    nu = effective.nu
    prefactor = -2.0 * effective.rho * flow.slab_length * flow.accel**2 * t / math.pi
    maxwell = path is FluidModel.OLDROYD_B and effective.alpha == 0

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        _, b_tau, _ = _brackets(xi, t, effective, path)
        if maxwell:
            b_tau = b_tau - newtonian_bracket(xi, t, nu)
        return b_tau / (xi * xi)

    value, _ = _xi_integral("wall power", integrand, t, _xi_spec(spec, effective, path, t))
    if maxwell:
        return newtonian_reference(t, effective, flow).L + prefactor * value
    return prefactor * value


def dissipation(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Viscous dissipation Phi = l int tau du/dy dy of the slab.

    The y-integral of the product of two cosine transforms collapses to one
    wavenumber integral, Phi = (2 rho l A^2 / (nu pi)) int b_tau b_u / xi^4, which is
    evaluated relative to the Newtonian value.

    Raises:
        ConfigurationError: t <= 0.
        QuadratureFailure: the integral did not converge.
    """
    _require_time(t)
    if flow.accel == 0:
        return 0.0
    effective, path = resolve_model(params, model, t)
    nu = effective.nu
    prefactor = 2.0 * effective.rho * flow.slab_length * flow.accel**2 / (nu * math.pi)
    newtonian = path is FluidModel.NEWTONIAN

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        b_u, b_tau, _ = _brackets(xi, t, effective, path)
        product = b_tau * b_u
        if not newtonian:
            b_n = newtonian_bracket(xi, t, nu)
            product = product - b_n * b_n
        return product / xi**4

    value, _ = _xi_integral("dissipation", integrand, t, _xi_spec(spec, effective, path, t))
    if newtonian:
        return prefactor * value
    return newtonian_reference(t, effective, flow).Phi + prefactor * value


def boundary_layer_thickness(
    t: float,
    params: FluidParams,
    flow: FlowConfig | None = None,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Thickness delta = (1 / (A t)) int u dy of the layer dragged along by the plate.

    Integrating over y first leaves (2 / (pi t)) int B(xi, t) / xi^2 with B the time
    integral of the stress bracket. The plate acceleration cancels, so ``flow`` is
    accepted for symmetry with the other energetics and not used.

    Raises:
        ConfigurationError: t <= 0.
        QuadratureFailure: the integral did not converge.
    """
    _require_time(t)
    effective, path = resolve_model(params, model, t)
    nu = effective.nu
    newtonian = path is FluidModel.NEWTONIAN

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        _, _, integrated = _brackets(xi, t, effective, path)
        if not newtonian:
            integrated = integrated - newtonian_integrated_bracket(xi, t, nu)
        return integrated / (xi * xi)

    value, _ = _xi_integral("thickness", integrand, t, _xi_spec(spec, effective, path, t))
    excess = 2.0 * value / (math.pi * t)
    if newtonian:
        return excess
    return 4.0 / 3.0 * math.sqrt(nu * t / math.pi) + excess


def _y_range(t: float, params: FluidParams) -> tuple[float, bool]:
    """Initial upper y-cut and whether it is final (the Maxwell wave front)."""
    y_max = Y_CUT_SCALE * math.sqrt(params.nu * t) * (1.0 + (params.lambda_ + params.lambda_r) / t)
    front = wave_front(t, params)
    if front <= y_max:
        return front, True
    return y_max, False


def _y_integral(
    what: str,
    density: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    t: float,
    params: FluidParams,
    spec: QuadratureSpec,
) -> float:
    """int_0^inf density(y) dy with a doubled upper cut until the tail is below abs_tol."""
    y_max, final = _y_range(t, params)
    res = integrate_finite(density, 0.0, y_max, spec, panels=4)
    if not res.converged:
        raise QuadratureFailure(
            f"{what} y-integral did not converge", quantity=what, t=t, err_estimate=res.max_error
        )
    total = float(res.value)
    for _ in range(MAX_Y_DOUBLINGS):
        if final:
            break
        tail = integrate_finite(density, y_max, 2.0 * y_max, spec, panels=4)
        total += float(tail.value)
        y_max *= 2.0
        if abs(float(tail.value)) < spec.abs_tol:
            break
    else:
        _log.warning("y-integral tail still above abs_tol", quantity=what, t=t, y_max=y_max)
    return total


def _profile_spec(spec: QuadratureSpec | None) -> QuadratureSpec:
    # The outer y-rule must not chase the inner quadrature noise
    spec = spec or QuadratureSpec()
    return QuadratureSpec(
        rel_tol=max(10.0 * spec.rel_tol, 1e-8), abs_tol=spec.abs_tol, max_panels=spec.max_panels
    )


def boundary_layer_thickness_profile(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Thickness from its definition, (1 / (A t)) int u dy, by quadrature over y.

    Raises:
        ConfigurationError: t <= 0 or A = 0 (the definition divides by A).
    """
    _require_time(t)
    if flow.accel == 0:
        raise ConfigurationError("thickness from the velocity profile needs A != 0")
    effective, _ = resolve_model(params, model, t)

    def density(ys: NDArray[np.float64]) -> NDArray[np.float64]:
        u, _ = profile(ys.ravel(), t, params, flow, spec=spec, model=model)
        return u.reshape(ys.shape)

    outer = _profile_spec(spec)
    return _y_integral("thickness", density, t, effective, outer) / (flow.accel * t)


def kinetic_energy(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    method: KineticMethod = "quadrature",
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Kinetic energy E_kin = (rho l / 2) int u^2 dy of the slab.

    Args:
        t: Time, > 0.
        params: Fluid parameters.
        flow: Plate acceleration and slab length.
        method: "quadrature" integrates u^2 over y on the computed profile;
            "spectral" uses Parseval, E_kin = (rho l A^2 / pi) int B^2 / xi^2 with B
            the time integral of the stress bracket, which is smooth in t.
        spec: Quadrature settings.
        model: Forced model tag, or None / "auto".

    Returns:
        float: E_kin, zero for A = 0.
    """
    _require_time(t)
    if flow.accel == 0:
        return 0.0
    effective, path = resolve_model(params, model, t)
    scale = effective.rho * flow.slab_length

    if method == "quadrature":

        def density(ys: NDArray[np.float64]) -> NDArray[np.float64]:
            u, _ = profile(ys.ravel(), t, params, flow, spec=spec, model=model)
            return (u * u).reshape(ys.shape)

        outer = _profile_spec(spec)
        return 0.5 * scale * _y_integral("kinetic energy", density, t, effective, outer)

    if method != "spectral":
        raise ConfigurationError(f"unknown kinetic energy method {method!r}")

    nu = effective.nu
    newtonian = path is FluidModel.NEWTONIAN

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        _, _, integrated = _brackets(xi, t, effective, path)
        if newtonian:
            return integrated * integrated / (xi * xi)
        b_n = newtonian_integrated_bracket(xi, t, nu)
        return (integrated - b_n) * (integrated + b_n) / (xi * xi)

    value, _ = _xi_integral("kinetic energy", integrand, t, _xi_spec(spec, effective, path, t))
    excess = scale * flow.accel**2 * value / math.pi
    if newtonian:
        return excess
    return newtonian_reference(t, effective, flow).kinetic_energy + excess


def kinetic_energy_rate(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> KineticEnergyRate:
    """
    dE_kin/dt in balance form (-L - Phi) and as a five-point difference of E_kin.

    The difference uses the spectral kinetic energy with step h = 1e-2 t.
    """
    _require_time(t)
    if flow.accel == 0:
        return KineticEnergyRate(balance=0.0, finite_difference=0.0)
    balance = -wall_power(t, params, flow, spec=spec, model=model) - dissipation(
        t, params, flow, spec=spec, model=model
    )
    h = RATE_REL_STEP * t
    energies = np.array(
        [
            kinetic_energy(t + k * h, params, flow, method="spectral", spec=spec, model=model)
            if k
            else 0.0
            for k in (-2, -1, 0, 1, 2)
        ]
    )
    return KineticEnergyRate(balance=balance, finite_difference=float(_D1 @ energies) / h)


def dissipation_double_integral(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> float:
    """
    Dissipation from its definition l int tau du/dy dy, by quadrature over y.

    Each y-node needs two wavenumber integrals, so the inner rule runs at
    ``DOUBLE_INTEGRAL_REL_TOL``. Meant as a cross-check of ``dissipation``.
    """
    _require_time(t)
    if flow.accel == 0:
        return 0.0
    effective, _ = resolve_model(params, model, t)
    inner = (spec or QuadratureSpec()).with_overrides(rel_tol=DOUBLE_INTEGRAL_REL_TOL)

    def density(ys: NDArray[np.float64]) -> NDArray[np.float64]:
        flat = ys.ravel()
        tau, _ = profile(flat, t, params, flow, quantity="stress", spec=inner, model=model)
        grad, _ = profile(flat, t, params, flow, quantity="gradient", spec=inner, model=model)
        return (tau * grad).reshape(ys.shape)

    outer = QuadratureSpec(rel_tol=1e-6, abs_tol=inner.abs_tol, max_panels=inner.max_panels)
    return flow.slab_length * _y_integral("dissipation", density, t, effective, outer)


def balance_residual(rate: float, power: float, phi: float) -> float:
    """|dE_kin/dt + L + Phi| / max(|L|, 1e-30) for wall power L and dissipation Phi."""
    return abs(rate + power + phi) / max(abs(power), BALANCE_FLOOR)


def full_report(
    t: float,
    params: FluidParams,
    flow: FlowConfig,
    *,
    spec: QuadratureSpec | None = None,
    model: ModelChoice = None,
) -> EnergeticsReport:
    """
    All energetic quantities at time ``t`` plus the Newtonian reference.

    Raises:
        ConfigurationError: t <= 0 or invalid model.
        QuadratureFailure: any component integral did not converge.
    """
    _require_time(t)
    forced = coerce_model(model)
    tag = (forced or classify(params)).value
    _log.debug("Energetics report", t=t, model=tag)

    power = wall_power(t, params, flow, spec=spec, model=model)
    phi = dissipation(t, params, flow, spec=spec, model=model)
    delta = boundary_layer_thickness(t, params, flow, spec=spec, model=model)
    rate = kinetic_energy_rate(t, params, flow, spec=spec, model=model)
    energy = kinetic_energy(t, params, flow, method="spectral", spec=spec, model=model)
    effective, _ = resolve_model(params, model, t)
    return EnergeticsReport(
        model=tag,
        t=t,
        L=power,
        Phi=phi,
        delta=delta,
        dEkin_dt=rate.finite_difference,
        balance_residual=balance_residual(rate.finite_difference, power, phi),
        kinetic_energy=energy,
        dEkin_dt_balance=rate.balance,
        newtonian=newtonian_reference(t, effective, flow),
        rel_tol=(spec or QuadratureSpec()).rel_tol,
    )


__all__ = [
    "NewtonianEnergetics",
    "KineticEnergyRate",
    "EnergeticsReport",
    "newtonian_reference",
    "wall_power",
    "wall_power_integral",
    "dissipation",
    "dissipation_double_integral",
    "boundary_layer_thickness",
    "boundary_layer_thickness_profile",
    "kinetic_energy",
    "kinetic_energy_rate",
    "balance_residual",
    "full_report",
]
