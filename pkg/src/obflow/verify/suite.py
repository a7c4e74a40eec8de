from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from ..core import asymptotics, energetics, fields
from ..core.fields import FieldPoint
from ..core.quadrature import (
    QuadratureResult,
    QuadratureSpec,
    integrate_oscillatory,
    integrate_semi_infinite,
)
from ..core.spectral import (
    mode_bracket_stress,
    mode_bracket_velocity,
    mode_brackets,
    newtonian_bracket,
    small_xi_limits,
    spectral_roots,
)
from ..core.special import erfc, ierfc
from ..errors import ConfigurationError
from ..fluid import FlowConfig, FluidParams
from ..utils.logging import get_logger
from .checks import CheckCollector

_log = get_logger(__name__)

SuiteName = Literal["all", "core", "special", "quadrature", "fields", "energetics", "asymptotic"]
SUITES: tuple[str, ...] = ("core", "special", "quadrature", "fields", "energetics", "asymptotic")

BRACKET_ATOL = 1e-10
SPECIAL_ATOL = 1e-14
QUADRATURE_ATOL = 1e-8
JOSEPH_REL = 1e-6
CLOSED_FORM_REL = 1e-6
RESIDUAL_REL = 1e-4
BALANCE_THRESHOLD = 1e-3
ORDER_TARGET = 4.0
ORDER_SPREAD = 0.8
DEGENERATE_ATOL = 1e-6
INITIAL_REL = 1e-3
SECOND_GRADE_START_REL = 1e-2
FAR_FIELD_REL = 1e-6
PARSEVAL_REL = 1e-4

JOSEPH_TIME = 0.3
BALANCE_TIMES = (0.5, 1.0, 2.0, 5.0)
ORDER_LAMBDAS = (0.8, 0.4, 0.2, 0.1)
ORDER_POINT = (1.0, 10.0)
# disc = (1 + alpha xi^2)^2 - 4 nu lambda xi^2 on either side of the double root
DEGENERATE_DISC = 1e-8
INITIAL_TIME = 1e-4
INITIAL_YS = (1.0, 3.0)
# far field starts at this many sqrt(nu t) (1 + (lambda + lambda_r) / t)
FAR_FIELD_SCALE = 12.0
RESIDUAL_YS = (0.2, 0.5, 0.8, 1.1, 1.4)
RESIDUAL_TS = (1.0, 1.5, 2.0, 2.5, 3.0)
LIMIT_STEPS = (0.1, 0.01, 0.001)
LIMIT_POINT = (1.0, 1.0)
_TINY = 1e-300


@dataclass(frozen=True, slots=True)
class VerifyContext:
    """Base fluid, plate motion and quadrature settings shared by all checks."""

    params: FluidParams
    flow: FlowConfig
    spec: QuadratureSpec

    def fluid(self, lambda_: float, lambda_r: float) -> FluidParams:
        return replace(self.params, lambda_=lambda_, lambda_r=lambda_r)

    def budget(self, *values: float) -> float:
        """Accuracy requested from the quadrature for results of these magnitudes."""
        return self.spec.rel_tol * sum(abs(v) for v in values)


def _relative(measured: float, expected: float) -> float:
    if measured == expected:
        return 0.0
    return abs(measured - expected) / max(abs(expected), _TINY)


def _result_budget(ctx: VerifyContext, res: QuadratureResult) -> float:
    return float(res.err_estimate) + ctx.budget(float(res.value))


def _degenerate_xi(params: FluidParams, disc: float) -> float:
    """Smallest wavenumber where (1 + alpha xi^2)^2 - 4 nu lambda xi^2 equals ``disc``."""
    a = params.alpha**2
    b = 2.0 * params.alpha - 4.0 * params.nu * params.lambda_
    c0 = 1.0 - disc
    return math.sqrt(2.0 * c0 / (-b + math.sqrt(b * b - 4.0 * a * c0)))


def check_core(c: CheckCollector, ctx: VerifyContext) -> None:
    suite = "core"
    xi = np.array([0.5, 1.0, 2.0, 5.0])
    nu = ctx.params.nu
    joseph = ctx.fluid(JOSEPH_TIME, JOSEPH_TIME)
    b_n = newtonian_bracket(xi, 1.0, nu)
    c.check(
        "velocity bracket is Newtonian for lambda = lambda_r",
        suite,
        float(np.max(np.abs(mode_bracket_velocity(xi, 1.0, joseph) - b_n))),
        0.0,
        BRACKET_ATOL,
    )
    c.check(
        "stress bracket is Newtonian for lambda = lambda_r",
        suite,
        float(np.max(np.abs(mode_bracket_stress(xi, 1.0, joseph) - b_n))),
        0.0,
        BRACKET_ATOL,
    )

    fluid = ctx.fluid(0.5, 0.2)
    at_start = max(
        float(np.max(np.abs(mode_bracket_velocity(xi, 0.0, fluid)))),
        float(np.max(np.abs(mode_bracket_stress(xi, 0.0, fluid)))),
    )
    c.check("brackets vanish at t = 0", suite, at_start, 0.0, SPECIAL_ATOL)

    small = 1e-4
    _, stress_limit = small_xi_limits(1.0, fluid)
    c.check_relative(
        "stress bracket small-xi limit",
        suite,
        float(mode_bracket_stress(small, 1.0, fluid)) / small**2,
        float(stress_limit),
        CLOSED_FORM_REL,
    )

    # direct formula on both sides of the double root against the analytic limit
    xi_deg = np.array([_degenerate_xi(fluid, d) for d in (-DEGENERATE_DISC, 0.0, DEGENERATE_DISC)])
    roots = spectral_roots(xi_deg, fluid)
    for name, bracket in zip(("velocity", "stress"), mode_brackets(roots, 1.0, fluid)):
        jump = max(abs(bracket[0] - bracket[1]), abs(bracket[2] - bracket[1]))
        c.check(
            f"{name} bracket continuous across the double root",
            suite,
            float(jump),
            0.0,
            DEGENERATE_ATOL,
        )


def check_special(c: CheckCollector, ctx: VerifyContext) -> None:
    suite = "special"
    c.check("erfc(0) = 1", suite, float(erfc(0.0)), 1.0, SPECIAL_ATOL)
    c.check(
        "i1erfc(0) = 1/sqrt(pi)", suite, float(ierfc(0.0, 1)), 1 / math.sqrt(math.pi), SPECIAL_ATOL
    )
    c.check("i2erfc(0) = 1/4", suite, float(ierfc(0.0, 2)), 0.25, SPECIAL_ATOL)

    x = 0.7
    res = integrate_semi_infinite(lambda s: np.asarray(erfc(x + s)), ctx.spec)
    c.check(
        "i1erfc is the integral of erfc",
        suite,
        float(res.value),
        float(ierfc(x, 1)),
        QUADRATURE_ATOL,
        err_estimate=_result_budget(ctx, res),
    )


def check_quadrature(c: CheckCollector, ctx: VerifyContext) -> None:
    suite = "quadrature"
    spec = ctx.spec
    cases: list[tuple[str, Callable[[], QuadratureResult], float]] = [
        (
            "semi-infinite Gaussian",
            lambda: integrate_semi_infinite(lambda x: np.exp(-x * x), spec),
            math.sqrt(math.pi) / 2.0,
        ),
        (
            "cosine transform of exp(-x)",
            lambda: integrate_oscillatory(lambda x: np.exp(-x), 2.0, "cos", 0, spec),
            0.2,
        ),
        (
            "Dirichlet integral",
            lambda: integrate_oscillatory(lambda x: np.ones_like(x), 1.0, "sin", 1, spec),
            math.pi / 2.0,
        ),
    ]
    for name, run, expected in cases:
        res = run()
        c.check(
            name,
            suite,
            float(res.value),
            expected,
            QUADRATURE_ATOL,
            err_estimate=_result_budget(ctx, res),
        )


def check_fields(c: CheckCollector, ctx: VerifyContext) -> None:
    suite = "fields"
    spec, flow, nu = ctx.spec, ctx.flow, ctx.params.nu
    fluid = ctx.fluid(0.5, 0.2)

    wall = fields.velocity(FieldPoint(0.0, 1.0), fluid, flow, spec=spec)
    c.check_relative("wall velocity is A t", suite, wall, flow.accel, BRACKET_ATOL)

    joseph = ctx.fluid(JOSEPH_TIME, JOSEPH_TIME)
    worst_u = worst_tau = 0.0
    for t in (0.5, 1.0, 5.0):
        for y in (0.0, 1.0, 3.0):
            p = FieldPoint(y, t)
            value = fields.field_value(p, joseph, flow, spec=spec, model="oldroyd-b")
            u_n = fields.velocity_newtonian_closed(p, flow, nu)
            tau_n = fields.shear_newtonian_closed(p, flow, ctx.params)
            worst_u = max(worst_u, _relative(value.u, u_n))
            worst_tau = max(worst_tau, _relative(value.tau, tau_n))
    c.check("Newtonian velocity for lambda = lambda_r", suite, worst_u, 0.0, JOSEPH_REL)
    c.check("Newtonian stress for lambda = lambda_r", suite, worst_tau, 0.0, JOSEPH_REL)

    p = FieldPoint(1.0, 1.0)
    closed = fields.velocity_newtonian_closed(p, flow, nu)
    integral = fields.velocity_newtonian_integral(p, flow, nu, spec=spec)
    c.check_relative(
        "Newtonian velocity integral matches closed form",
        suite,
        integral,
        closed,
        QUADRATURE_ATOL * 10,
        err_estimate=ctx.budget(flow.accel * p.t, integral),
    )

    _check_initial_state(c, ctx, suite)
    _check_far_field(c, ctx, suite)
    _check_residual_grid(c, ctx, suite)
    for target, limit, approaching in _limit_families(ctx):
        y, t = LIMIT_POINT
        p = FieldPoint(y, t)
        ref = fields.field_value(p, limit, flow, spec=spec)
        values = [fields.field_value(p, params, flow, spec=spec) for params in approaching]
        _check_limit(
            c,
            suite,
            f"velocity approaches {target} at y={y}, t={t}",
            [abs(v.u - ref.u) for v in values],
        )
        _check_limit(
            c,
            suite,
            f"stress approaches {target} at y={y}, t={t}",
            [abs(v.tau - ref.tau) for v in values],
        )


def _model_cases(ctx: VerifyContext) -> list[tuple[str, FluidParams]]:
    return [
        ("newtonian", ctx.fluid(0.0, 0.0)),
        ("maxwell", ctx.fluid(0.4, 0.0)),
        ("second-grade", ctx.fluid(0.0, 0.4)),
        ("oldroyd-b", ctx.fluid(0.5, 0.2)),
    ]


def _limit_families(ctx: VerifyContext) -> list[tuple[str, FluidParams, list[FluidParams]]]:
    """Oldroyd-B fluids closing in on Maxwell (lambda_r -> 0) and second grade (lambda -> 0)."""
    return [
        ("Maxwell", ctx.fluid(0.5, 0.0), [ctx.fluid(0.5, s) for s in LIMIT_STEPS]),
        ("second grade", ctx.fluid(0.0, 0.2), [ctx.fluid(s, 0.2) for s in LIMIT_STEPS]),
    ]


def _check_limit(c: CheckCollector, suite: str, name: str, discrepancies: list[float]) -> None:
    _log.debug("Limit discrepancies", check=name, discrepancies=discrepancies)
    shrinking = all(b < a for a, b in zip(discrepancies, discrepancies[1:]))
    c.check_flag(name, suite, shrinking)


def _check_initial_state(c: CheckCollector, ctx: VerifyContext, suite: str) -> None:
    spec, flow = ctx.spec, ctx.flow
    for tag, params in _model_cases(ctx):
        # this early every y > 0 lies ahead of the Maxwell front
        ys = (0.0,) if tag == "maxwell" else INITIAL_YS
        for y in ys:
            early = fields.field_value(
                FieldPoint(y, INITIAL_TIME), params, flow, spec=spec, model=tag
            )
            late = fields.field_value(FieldPoint(y, 1.0), params, flow, spec=spec, model=tag)
            label = f"{tag} at y={y}, t={INITIAL_TIME}"
            c.check(
                f"velocity starts from rest {label}",
                suite,
                abs(early.u) / max(abs(late.u), _TINY),
                0.0,
                INITIAL_REL,
            )
            if tag == "second-grade":
                c.check_relative(
                    f"stress starts from the instantaneous profile {label}",
                    suite,
                    early.tau,
                    fields.second_grade_initial_stress(y, params, flow),
                    SECOND_GRADE_START_REL,
                )
            else:
                c.check(
                    f"stress starts from zero {label}",
                    suite,
                    abs(early.tau) / max(abs(late.tau), _TINY),
                    0.0,
                    INITIAL_REL,
                )


def _check_far_field(c: CheckCollector, ctx: VerifyContext, suite: str) -> None:
    t = 1.0
    scale = max(abs(ctx.flow.accel) * t, _TINY)
    for tag, params in _model_cases(ctx):
        if tag == "maxwell":
            # the far field lies ahead of the front, where the velocity is zero
            continue
        spread = 1.0 + (params.lambda_ + params.lambda_r) / t
        y = FAR_FIELD_SCALE * math.sqrt(params.nu * t) * spread
        u = fields.velocity(FieldPoint(y, t), params, ctx.flow, spec=ctx.spec, model=tag)
        c.check(
            f"{tag} velocity has decayed at y={y:.4g}, t={t}",
            suite,
            abs(u) / scale,
            0.0,
            FAR_FIELD_REL,
            err_estimate=ctx.spec.abs_tol / scale,
        )


def _check_residual_grid(c: CheckCollector, ctx: VerifyContext, suite: str) -> None:
    count = len(RESIDUAL_YS) * len(RESIDUAL_TS)
    for tag, params in _model_cases(ctx):
        # in units of sqrt(nu) the grid stays behind the Maxwell front
        ys = [y * math.sqrt(params.nu) for y in RESIDUAL_YS]
        worst_momentum = worst_constitutive = 0.0
        for t in RESIDUAL_TS:
            for y in ys:
                residual = fields.pde_residual(
                    FieldPoint(y, t), params, ctx.flow, spec=ctx.spec, model=tag
                )
                worst_momentum = max(worst_momentum, residual.relative_momentum)
                worst_constitutive = max(worst_constitutive, residual.relative_constitutive)
        c.check(
            f"{tag} momentum residual, worst of {count} points",
            suite,
            worst_momentum,
            0.0,
            RESIDUAL_REL,
            err_estimate=ctx.spec.rel_tol,
        )
        c.check(
            f"{tag} constitutive residual, worst of {count} points",
            suite,
            worst_constitutive,
            0.0,
            RESIDUAL_REL,
            err_estimate=ctx.spec.rel_tol,
        )


def _balance_cases(ctx: VerifyContext) -> list[tuple[str, FluidParams]]:
    return [*_model_cases(ctx), ("oldroyd-b", ctx.fluid(0.2, 0.5))]


def check_energetics(c: CheckCollector, ctx: VerifyContext) -> None:
    suite = "energetics"
    spec, flow = ctx.spec, ctx.flow
    t = 1.0
    base = ctx.fluid(0.0, 0.0)
    ref = energetics.newtonian_reference(t, base, flow)

    computed = {
        "L": energetics.wall_power_integral(t, base, flow, spec=spec, model="newtonian"),
        "Phi": energetics.dissipation(t, base, flow, spec=spec, model="newtonian"),
        "delta": energetics.boundary_layer_thickness(t, base, flow, spec=spec, model="newtonian"),
    }
    expected = {"L": ref.L, "Phi": ref.Phi, "delta": ref.delta}
    for key, value in computed.items():
        c.check_relative(
            f"Newtonian {key} integral matches closed form",
            suite,
            value,
            expected[key],
            CLOSED_FORM_REL,
            err_estimate=ctx.budget(value),
        )

    joseph = ctx.fluid(JOSEPH_TIME, JOSEPH_TIME)
    joseph_values = {
        "L": energetics.wall_power(t, joseph, flow, spec=spec, model="oldroyd-b"),
        "Phi": energetics.dissipation(t, joseph, flow, spec=spec, model="oldroyd-b"),
        "delta": energetics.boundary_layer_thickness(
            t, joseph, flow, spec=spec, model="oldroyd-b"
        ),
    }
    for key, value in joseph_values.items():
        c.check_relative(
            f"{key} is Newtonian for lambda = lambda_r",
            suite,
            value,
            expected[key],
            JOSEPH_REL,
            err_estimate=ctx.budget(value),
        )

    fluid = ctx.fluid(0.5, 0.2)
    delta = energetics.boundary_layer_thickness(t, fluid, flow, spec=spec)
    scaled = energetics.boundary_layer_thickness(
        t, fluid, replace(flow, accel=10.0 * flow.accel), spec=spec
    )
    c.check("thickness independent of A", suite, scaled, delta, 0.0)

    for tag, params in _balance_cases(ctx):
        for t_b in BALANCE_TIMES:
            report = energetics.full_report(t_b, params, flow, spec=spec, model=tag)
            noise = (
                1.5 * abs(report.kinetic_energy) / (energetics.RATE_REL_STEP * t_b)
                + abs(report.L)
                + abs(report.Phi)
            ) / max(abs(report.L), energetics.BALANCE_FLOOR)
            label = f"{tag} (lambda={params.lambda_}, lambda_r={params.lambda_r}) t={t_b}"
            c.check(
                f"energy balance {label}",
                suite,
                report.balance_residual,
                0.0,
                BALANCE_THRESHOLD,
                err_estimate=ctx.spec.rel_tol * noise,
            )
            if flow.accel != 0:
                c.check_flag(f"L < 0 < Phi {label}", suite, report.L < 0 < report.Phi)

    for tag, params in (("newtonian", ctx.fluid(0.0, 0.0)), ("oldroyd-b", ctx.fluid(0.5, 0.2))):
        phi = energetics.dissipation(t, params, flow, spec=spec, model=tag)
        literal = energetics.dissipation_double_integral(t, params, flow, spec=spec, model=tag)
        c.check_relative(
            f"{tag} Phi by Parseval matches the double integral",
            suite,
            phi,
            literal,
            PARSEVAL_REL,
            err_estimate=ctx.budget(phi),
        )

    t_limit = LIMIT_POINT[1]
    quantities: dict[str, Callable[[FluidParams], float]] = {
        "L": lambda params: energetics.wall_power(t_limit, params, flow, spec=spec),
        "Phi": lambda params: energetics.dissipation(t_limit, params, flow, spec=spec),
        "delta": lambda params: energetics.boundary_layer_thickness(
            t_limit, params, flow, spec=spec
        ),
    }
    for target, limit, approaching in _limit_families(ctx):
        for key, evaluate in quantities.items():
            ref = evaluate(limit)
            _check_limit(
                c,
                suite,
                f"{key} approaches {target} at t={t_limit}",
                [abs(evaluate(params) - ref) for params in approaching],
            )

    ordering = energetics.full_report(t, ctx.fluid(0.6, 0.2), flow, spec=spec)
    for name, flag in (
        ("|L| below Newtonian for lambda > lambda_r", ordering.L_below_newtonian),
        ("Phi below Newtonian for lambda > lambda_r", ordering.Phi_below_newtonian),
        ("delta below Newtonian for lambda > lambda_r", ordering.delta_below_newtonian),
    ):
        c.check_flag(name, suite, flag, reported=True)


def check_asymptotic(c: CheckCollector, ctx: VerifyContext) -> None:
    suite = "asymptotic"
    spec, flow = ctx.spec, ctx.flow
    y, t = ORDER_POINT
    lambda_r = ctx.params.lambda_r
    start = ctx.fluid(ORDER_LAMBDAS[0], lambda_r)
    # Only the Maxwell case is unambiguous; retardation runs are diagnostics
    exploratory = lambda_r > 0

    report = asymptotics.order_of_accuracy(y, t, start, flow, ORDER_LAMBDAS, spec=spec)
    pairs = list(zip(ORDER_LAMBDAS, ORDER_LAMBDAS[1:]))
    ratios = {
        "velocity": report.ratio_u,
        "stress": report.ratio_tau,
        "wall power": report.ratio_L,
        "dissipation": report.ratio_Phi,
        "thickness": report.ratio_delta,
    }
    for quantity, values in ratios.items():
        for (a, b), ratio in zip(pairs, values):
            c.check(
                f"{quantity} error ratio lambda {a} -> {b}",
                suite,
                ratio,
                ORDER_TARGET,
                ORDER_SPREAD,
                reported=exploratory,
            )
    if exploratory:
        aware = asymptotics.order_of_accuracy(
            y, t, start, flow, ORDER_LAMBDAS, retardation=True, spec=spec
        )
        for (a, b), r_u in zip(pairs, aware.ratio_u):
            c.check(
                f"retardation-aware velocity error ratio lambda {a} -> {b}",
                suite,
                r_u,
                ORDER_TARGET,
                ORDER_SPREAD,
                reported=True,
            )

    small = ctx.fluid(0.02, 0.0)
    for t_c in (1.0, 5.0):
        for y_c in (0.0, 1.0):
            p = FieldPoint(y_c, t_c)
            u_n = fields.velocity_newtonian_closed(p, flow, small.nu)
            tau_n = fields.shear_newtonian_closed(p, flow, small)
            closed_u = asymptotics.velocity_approx(p, small, flow) - u_n
            closed_tau = asymptotics.shear_approx(p, small, flow) - tau_n
            integral_u = asymptotics.velocity_correction_integral(p, small, flow, spec=spec)
            integral_tau = asymptotics.shear_correction_integral(p, small, flow, spec=spec)
            c.check(
                f"velocity correction integral at y={y_c}, t={t_c}",
                suite,
                integral_u,
                closed_u,
                QUADRATURE_ATOL,
                err_estimate=ctx.budget(integral_u),
            )
            c.check(
                f"stress correction integral at y={y_c}, t={t_c}",
                suite,
                integral_tau,
                closed_tau,
                QUADRATURE_ATOL,
                err_estimate=ctx.budget(integral_tau),
            )


_RUNNERS: dict[str, Callable[[CheckCollector, VerifyContext], None]] = {
    "core": check_core,
    "special": check_special,
    "quadrature": check_quadrature,
    "fields": check_fields,
    "energetics": check_energetics,
    "asymptotic": check_asymptotic,
}


def run_suite(
    suite: str, ctx: VerifyContext, collector: CheckCollector | None = None
) -> CheckCollector:
    """
    Run one named suite, or all of them, and return the collected outcomes.

    Raises:
        ConfigurationError: unknown suite name.
        QuadratureFailure: an integral needed by a check did not converge.
    """
    if suite != "all" and suite not in _RUNNERS:
        choices = ", ".join(SUITES)
        raise ConfigurationError(f"unknown suite {suite!r}; choose all or one of {choices}")
    collector = collector or CheckCollector()
    for name in SUITES if suite == "all" else (suite,):
        _log.info("Running verification suite", suite=name)
        _RUNNERS[name](collector, ctx)
    return collector


__all__ = ["SuiteName", "SUITES", "VerifyContext", "run_suite"]
