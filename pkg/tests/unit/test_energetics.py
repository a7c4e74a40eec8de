from __future__ import annotations

import math
from typing import Any

import pytest

from obflow.core.energetics import (
    PHI_FACTOR,
    EnergeticsReport,
    NewtonianEnergetics,
    balance_residual,
    boundary_layer_thickness,
    boundary_layer_thickness_profile,
    dissipation,
    dissipation_double_integral,
    full_report,
    kinetic_energy,
    kinetic_energy_rate,
    newtonian_reference,
    wall_power,
    wall_power_integral,
)
from obflow.core.quadrature import QuadratureSpec
from obflow.errors import ConfigurationError
from obflow.fluid import FlowConfig, FluidParams


def test_newtonian_reference_scaling(newtonian: FluidParams) -> None:
    flow = FlowConfig(accel=2.0, slab_length=3.0)
    ref = newtonian_reference(4.0, newtonian, flow)
    root = math.sqrt(4.0 / math.pi)
    assert ref.L == pytest.approx(-2.0 * 3.0 * 4.0 * 4.0 * root)
    assert ref.Phi / abs(ref.L) == pytest.approx(PHI_FACTOR / 2.0)
    assert ref.delta == pytest.approx(4.0 / 3.0 * root)
    # the closed forms satisfy the energy balance exactly
    assert 2.5 * ref.kinetic_energy / 4.0 == pytest.approx(ref.dEkin_dt)


@pytest.mark.parametrize("t", [0.0, -1.0, math.inf])
def test_energetics_need_positive_time(
    t: float, newtonian: FluidParams, flow: FlowConfig
) -> None:
    with pytest.raises(ConfigurationError):
        newtonian_reference(t, newtonian, flow)
    with pytest.raises(ConfigurationError):
        dissipation(t, newtonian, flow)


def test_zero_acceleration(oldroyd: FluidParams) -> None:
    still = FlowConfig(accel=0.0)
    assert wall_power(1.0, oldroyd, still) == 0.0
    assert wall_power_integral(1.0, oldroyd, still) == 0.0
    assert dissipation(1.0, oldroyd, still) == 0.0
    assert kinetic_energy(1.0, oldroyd, still) == 0.0
    rate = kinetic_energy_rate(1.0, oldroyd, still)
    assert rate.balance == rate.finite_difference == 0.0
    with pytest.raises(ConfigurationError):
        boundary_layer_thickness_profile(1.0, oldroyd, still)


def test_newtonian_integrals_match_closed_forms(
    newtonian: FluidParams, flow: FlowConfig, spec: QuadratureSpec
) -> None:
    t = 1.0
    ref = newtonian_reference(t, newtonian, flow)
    assert wall_power_integral(t, newtonian, flow, spec=spec) == pytest.approx(ref.L, rel=1e-7)
    assert wall_power(t, newtonian, flow, spec=spec) == pytest.approx(ref.L, rel=1e-12)
    assert dissipation(t, newtonian, flow, spec=spec) == pytest.approx(ref.Phi, rel=1e-7)
    assert boundary_layer_thickness(t, newtonian, spec=spec) == pytest.approx(
        ref.delta, rel=1e-7
    )
    assert kinetic_energy(t, newtonian, flow, method="spectral", spec=spec) == pytest.approx(
        ref.kinetic_energy, rel=1e-7
    )


def test_newtonian_definitions_by_y_quadrature(
    newtonian: FluidParams, flow: FlowConfig, spec: QuadratureSpec
) -> None:
    """Integrating the closed-form profiles over y reproduces the energetics."""
    t = 2.0
    ref = newtonian_reference(t, newtonian, flow)
    assert kinetic_energy(t, newtonian, flow, spec=spec) == pytest.approx(
        ref.kinetic_energy, rel=1e-6
    )
    assert boundary_layer_thickness_profile(t, newtonian, flow, spec=spec) == pytest.approx(
        ref.delta, rel=1e-6
    )
    assert dissipation_double_integral(t, newtonian, flow, spec=spec) == pytest.approx(
        ref.Phi, rel=1e-5
    )


def test_unknown_kinetic_method(oldroyd: FluidParams, flow: FlowConfig) -> None:
    with pytest.raises(ConfigurationError):
        kinetic_energy(1.0, oldroyd, flow, method="trapezoid")  # type: ignore[arg-type]


def test_equal_times_match_newtonian(flow: FlowConfig, spec: QuadratureSpec) -> None:
    params = FluidParams(nu=1.0, lambda_=0.3, lambda_r=0.3)
    ref = newtonian_reference(1.0, params, flow)
    assert wall_power(1.0, params, flow, spec=spec, model="oldroyd-b") == pytest.approx(
        ref.L, rel=1e-6
    )
    assert dissipation(1.0, params, flow, spec=spec, model="oldroyd-b") == pytest.approx(
        ref.Phi, rel=1e-6
    )
    assert boundary_layer_thickness(
        1.0, params, flow, spec=spec, model="oldroyd-b"
    ) == pytest.approx(ref.delta, rel=1e-6)


def test_thickness_independent_of_acceleration(
    oldroyd: FluidParams, spec: QuadratureSpec
) -> None:
    slow = boundary_layer_thickness(1.0, oldroyd, FlowConfig(accel=1.0), spec=spec)
    fast = boundary_layer_thickness(1.0, oldroyd, FlowConfig(accel=25.0), spec=spec)
    assert slow == fast


@pytest.mark.parametrize("fluid", ["oldroyd", "second_grade"])
def test_wall_power_forms_agree(
    fluid: str, flow: FlowConfig, spec: QuadratureSpec, request: pytest.FixtureRequest
) -> None:
    params: FluidParams = request.getfixturevalue(fluid)
    direct = wall_power(1.0, params, flow, spec=spec)
    spectral = wall_power_integral(1.0, params, flow, spec=spec)
    assert direct < 0
    assert spectral == pytest.approx(direct, rel=1e-7)


def test_balance_residual_arithmetic() -> None:
    assert balance_residual(1.5, -2.0, 0.5) == 0.0
    assert balance_residual(1.6, -2.0, 0.5) == pytest.approx(0.05)
    assert balance_residual(1e-40, 0.0, 0.0) == pytest.approx(1e-10)


def test_report_orderings() -> None:
    ref = NewtonianEnergetics(L=-2.0, Phi=1.0, delta=0.8, kinetic_energy=0.5)
    report = EnergeticsReport(
        model="oldroyd-b",
        t=1.0,
        L=-1.5,
        Phi=1.2,
        delta=0.7,
        dEkin_dt=0.3,
        balance_residual=0.0,
        kinetic_energy=0.4,
        dEkin_dt_balance=0.3,
        newtonian=ref,
    )
    assert report.L_below_newtonian
    assert not report.Phi_below_newtonian
    assert report.delta_below_newtonian


def test_report_orderings_ignore_quadrature_noise() -> None:
    ref = NewtonianEnergetics(L=-2.0, Phi=1.0, delta=0.8, kinetic_energy=0.5)
    common: dict[str, Any] = {
        "model": "oldroyd-b",
        "t": 1.0,
        "dEkin_dt": 0.3,
        "balance_residual": 0.0,
        "kinetic_energy": 0.4,
        "dEkin_dt_balance": 0.3,
        "newtonian": ref,
        "rel_tol": 1e-9,
    }
    noisy = EnergeticsReport(L=-2.0 * (1 - 1e-12), Phi=1.0 - 1e-12, delta=0.8 - 1e-12, **common)
    assert not noisy.L_below_newtonian
    assert not noisy.Phi_below_newtonian
    assert not noisy.delta_below_newtonian

    clear = EnergeticsReport(L=-2.0 * (1 - 1e-6), Phi=1.0 - 1e-6, delta=0.8 - 1e-6, **common)
    assert clear.L_below_newtonian
    assert clear.Phi_below_newtonian
    assert clear.delta_below_newtonian


def test_newtonian_report_is_not_below_itself(
    newtonian: FluidParams, flow: FlowConfig, spec: QuadratureSpec
) -> None:
    report = full_report(1.0, newtonian, flow, spec=spec)
    assert report.rel_tol == spec.rel_tol
    assert report.Phi == pytest.approx(report.newtonian.Phi, rel=1e-8)
    assert not report.L_below_newtonian
    assert not report.Phi_below_newtonian
    assert not report.delta_below_newtonian


@pytest.mark.slow
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("fluid", ["newtonian", "oldroyd", "second_grade", "maxwell"])
def test_energy_balance_closes(
    fluid: str, t: float, flow: FlowConfig, spec: QuadratureSpec, request: pytest.FixtureRequest
) -> None:
    params: FluidParams = request.getfixturevalue(fluid)
    report = full_report(t, params, flow, spec=spec)
    assert report.L < 0 < report.Phi
    assert report.delta > 0
    assert report.balance_residual < 1e-3


@pytest.mark.slow
def test_energy_balance_closes_for_long_retardation(
    flow: FlowConfig, spec: QuadratureSpec
) -> None:
    params = FluidParams(nu=1.0, lambda_=0.2, lambda_r=0.5)
    for t in (0.5, 1.0, 2.0, 5.0):
        assert full_report(t, params, flow, spec=spec).balance_residual < 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("fluid", ["newtonian", "oldroyd"])
def test_dissipation_matches_double_integral(
    fluid: str, flow: FlowConfig, spec: QuadratureSpec, request: pytest.FixtureRequest
) -> None:
    params: FluidParams = request.getfixturevalue(fluid)
    assert dissipation(1.0, params, flow, spec=spec) == pytest.approx(
        dissipation_double_integral(1.0, params, flow, spec=spec), rel=1e-4
    )


@pytest.mark.slow
@pytest.mark.parametrize(
    ("limit", "family"),
    [
        (FluidParams(nu=1.0, lambda_=0.5), [(0.5, s) for s in (0.1, 0.01, 0.001)]),
        (FluidParams(nu=1.0, lambda_r=0.2), [(s, 0.2) for s in (0.1, 0.01, 0.001)]),
    ],
)
def test_energetics_approach_limiting_models(
    limit: FluidParams,
    family: list[tuple[float, float]],
    flow: FlowConfig,
    spec: QuadratureSpec,
) -> None:
    fluids = [FluidParams(nu=1.0, lambda_=lam, lambda_r=lam_r) for lam, lam_r in family]
    for quantity in (wall_power, dissipation, boundary_layer_thickness):
        ref = quantity(1.0, limit, flow, spec=spec)
        gaps = [abs(quantity(1.0, params, flow, spec=spec) - ref) for params in fluids]
        assert gaps == sorted(gaps, reverse=True), quantity.__name__
        assert gaps[-1] < 5e-2 * abs(ref), quantity.__name__


@pytest.mark.slow
def test_report_model_tag(oldroyd: FluidParams, flow: FlowConfig, spec: QuadratureSpec) -> None:
    assert full_report(1.0, oldroyd, flow, spec=spec).model == "oldroyd-b"
    forced = full_report(1.0, oldroyd, flow, spec=spec, model="newtonian")
    assert forced.model == "newtonian"
    assert forced.L == pytest.approx(forced.newtonian.L, rel=1e-12)


@pytest.mark.slow
def test_kinetic_energy_methods_agree(
    oldroyd: FluidParams, flow: FlowConfig, spec: QuadratureSpec
) -> None:
    by_profile = kinetic_energy(1.0, oldroyd, flow, spec=spec)
    by_parseval = kinetic_energy(1.0, oldroyd, flow, method="spectral", spec=spec)
    assert by_profile == pytest.approx(by_parseval, rel=1e-6)


@pytest.mark.slow
def test_thickness_forms_agree(
    oldroyd: FluidParams, flow: FlowConfig, spec: QuadratureSpec
) -> None:
    spectral = boundary_layer_thickness(1.0, oldroyd, flow, spec=spec)
    assert boundary_layer_thickness_profile(1.0, oldroyd, flow, spec=spec) == pytest.approx(
        spectral, rel=1e-6
    )
