from __future__ import annotations

import uuid
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Any, TypeVar

import typer

from ..config.loader import build_run_config, load_settings
from ..config.models import RunConfig
from ..core.asymptotics import order_of_accuracy
from ..core.energetics import EnergeticsReport, full_report
from ..core.fields import FieldPoint, FieldValue, field_value
from ..errors import NonFiniteIntegrand, NonRealResult, ObflowError, QuadratureFailure
from ..fluid import FluidParams
from ..utils.grid import parse_grid
from ..utils.logging import bind_context, get_logger, setup_logging
from ..utils.output import Cell, render, write_output
from ..verify.suite import VerifyContext, run_suite

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_QUADRATURE = 3

T = TypeVar("T")
R = TypeVar("R")

_log = get_logger(__name__)

# Create a CLI application using Typer
app = typer.Typer(
    add_completion=False,
    help="Oldroyd-B flow over a constantly accelerating plate: fields, energetics, checks.",
)

# Options shared by every subcommand; None keeps the value from the settings
_CONFIG = typer.Option(None, "--config", help="Path to the YAML configuration file")
_NU = typer.Option(None, "--nu", help="Kinematic viscosity nu")
_RHO = typer.Option(None, "--rho", help="Density rho")
_LAMBDA = typer.Option(None, "--lambda", help="Relaxation time lambda")
_LAMBDA_R = typer.Option(None, "--lambda-r", help="Retardation time lambda_r")
_ACCEL = typer.Option(None, "--A", help="Plate acceleration A")
_SLAB = typer.Option(None, "--l", help="Slab length l used by the energetics")
_Y = typer.Option(None, "--y", help="Wall distances: list 'a,b,c' or range 'start:stop:n'")
_T = typer.Option(None, "--t", help="Times: list 'a,b,c' or range 'start:stop:n'")
_REL_TOL = typer.Option(None, "--rel-tol", help="Relative quadrature tolerance")
_ABS_TOL = typer.Option(None, "--abs-tol", help="Absolute quadrature tolerance")
_OUT = typer.Option(None, "--out", help="Output file (default: standard output)")
_FORMAT = typer.Option(None, "--format", help="csv|table")
_MODEL = typer.Option(
    None, "--model", help="auto|newtonian|maxwell|second-grade|oldroyd-b"
)

FIELD_COLUMNS = ("y", "t", "u", "tau", "quad_err_u", "quad_err_tau")
ENERGETICS_COLUMNS = (
    "model",
    "t",
    "L",
    "Phi",
    "delta",
    "dEkin_dt",
    "balance_residual",
    "L_N",
    "Phi_N",
    "delta_N",
    "L_below_newtonian",
    "Phi_below_newtonian",
    "delta_below_newtonian",
)
VERIFY_COLUMNS = (
    "suite",
    "check",
    "measured",
    "expected",
    "discrepancy",
    "err_estimate",
    "threshold",
    "status",
)
ORDER_COLUMNS = (
    "y",
    "t",
    "lambda",
    "err_u",
    "err_tau",
    "err_L",
    "err_Phi",
    "err_delta",
    "ratio_u",
    "ratio_tau",
    "ratio_L",
    "ratio_Phi",
    "ratio_delta",
)


@app.callback()
def main() -> None:
    """Configure logging before any subcommand runs."""
    setup_logging()


@contextmanager
def _cli_errors(command: str) -> Iterator[None]:
    """Map library errors to exit codes, with the message on standard error."""
    try:
        yield
    except (QuadratureFailure, NonRealResult, NonFiniteIntegrand) as exc:
        _log.error("Numerical failure", command=command, error=str(exc))
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_QUADRATURE) from exc
    except ObflowError as exc:
        _log.error("Invalid configuration", command=command, error=str(exc))
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_CONFIG) from exc


def _run_config(command: str, config: str | None, **overrides: Any) -> RunConfig:
    cfg = build_run_config(load_settings(config), **overrides)
    bind_context(command=command, model=cfg.model, run_id=uuid.uuid4().hex[:12])
    _log.info("Run configured", threads=cfg.threads, points=len(cfg.ys) * len(cfg.ts))
    return cfg


def _map(cfg: RunConfig, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Evaluate ``fn`` over ``items`` on up to ``cfg.threads`` workers, keeping input order."""
    if cfg.threads == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(fn, items))


def _emit(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Sequence[Cell]]) -> None:
    write_output(render(columns, rows, cfg.format), cfg.out)


@app.command()
def field(
    config: str | None = _CONFIG,
    nu: float | None = _NU,
    rho: float | None = _RHO,
    lambda_: float | None = _LAMBDA,
    lambda_r: float | None = _LAMBDA_R,
    accel: float | None = _ACCEL,
    slab_length: float | None = _SLAB,
    y: str | None = _Y,
    t: str | None = _T,
    rel_tol: float | None = _REL_TOL,
    abs_tol: float | None = _ABS_TOL,
    out: str | None = _OUT,
    fmt: str | None = _FORMAT,
    model: str | None = _MODEL,
) -> None:
    """
    Velocity and shear stress on the (y, t) grid, one row per point.

    Rows run over y for each t in grid order.
    """
    with _cli_errors("field"):
        cfg = _run_config(
            "field",
            config,
            nu=nu,
            rho=rho,
            lambda_=lambda_,
            lambda_r=lambda_r,
            accel=accel,
            slab_length=slab_length,
            y=y,
            t=t,
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            model=model,
            fmt=fmt,
            out=out,
        )
        params, flow, spec = cfg.fluid_params(), cfg.flow_config(), cfg.quadrature_spec()
        points = [FieldPoint(y_i, t_j) for t_j in cfg.ts for y_i in cfg.ys]

        def evaluate(p: FieldPoint) -> FieldValue:
            return field_value(p, params, flow, spec=spec, model=cfg.model)

        values = _map(cfg, evaluate, points)
        rows = [
            (p.y, p.t, v.u, v.tau, v.quad_err_u, v.quad_err_tau) for p, v in zip(points, values)
        ]
        _emit(cfg, FIELD_COLUMNS, rows)


@app.command()
def energetics(
    config: str | None = _CONFIG,
    nu: float | None = _NU,
    rho: float | None = _RHO,
    lambda_: float | None = _LAMBDA,
    lambda_r: float | None = _LAMBDA_R,
    accel: float | None = _ACCEL,
    slab_length: float | None = _SLAB,
    t: str | None = _T,
    rel_tol: float | None = _REL_TOL,
    abs_tol: float | None = _ABS_TOL,
    out: str | None = _OUT,
    fmt: str | None = _FORMAT,
    model: str | None = _MODEL,
) -> None:
    """Wall power, dissipation, thickness and the energy balance for each time of the grid."""
    with _cli_errors("energetics"):
        cfg = _run_config(
            "energetics",
            config,
            nu=nu,
            rho=rho,
            lambda_=lambda_,
            lambda_r=lambda_r,
            accel=accel,
            slab_length=slab_length,
            t=t,
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            model=model,
            fmt=fmt,
            out=out,
        )
        params, flow, spec = cfg.fluid_params(), cfg.flow_config(), cfg.quadrature_spec()

        def evaluate(t_j: float) -> EnergeticsReport:
            return full_report(t_j, params, flow, spec=spec, model=cfg.model)

        reports = _map(cfg, evaluate, cfg.ts)
        rows = [
            (
                r.model,
                r.t,
                r.L,
                r.Phi,
                r.delta,
                r.dEkin_dt,
                r.balance_residual,
                r.newtonian.L,
                r.newtonian.Phi,
                r.newtonian.delta,
                r.L_below_newtonian,
                r.Phi_below_newtonian,
                r.delta_below_newtonian,
            )
            for r in reports
        ]
        _emit(cfg, ENERGETICS_COLUMNS, rows)


@app.command()
def verify(
    suite: str = typer.Option(
        "all", "--suite", help="all|core|special|quadrature|fields|energetics|asymptotic"
    ),
    config: str | None = _CONFIG,
    nu: float | None = _NU,
    rho: float | None = _RHO,
    lambda_r: float | None = _LAMBDA_R,
    accel: float | None = _ACCEL,
    slab_length: float | None = _SLAB,
    rel_tol: float | None = _REL_TOL,
    abs_tol: float | None = _ABS_TOL,
    out: str | None = _OUT,
    fmt: str | None = _FORMAT,
) -> None:
    """
    Run the verification checks and print a summary table.

    Exits with 1 when any check fails; the failing checks are named on standard error.
    """
    with _cli_errors("verify"):
        cfg = _run_config(
            "verify",
            config,
            nu=nu,
            rho=rho,
            lambda_r=lambda_r,
            accel=accel,
            slab_length=slab_length,
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            fmt=fmt,
            out=out,
        )
        ctx = VerifyContext(cfg.fluid_params(), cfg.flow_config(), cfg.quadrature_spec())
        collector = run_suite(suite, ctx)
        rows = [
            (
                o.suite,
                o.name,
                o.measured,
                o.expected,
                o.discrepancy,
                o.err_estimate,
                o.threshold,
                o.status,
            )
            for o in collector.outcomes
        ]
        _emit(cfg, VERIFY_COLUMNS, rows)

    failures = collector.failures
    if failures:
        for line in collector.failure_lines():
            typer.echo(line, err=True)
        typer.echo(f"{len(failures)} of {len(collector.outcomes)} checks failed", err=True)
        raise typer.Exit(EXIT_VERIFY_FAILED)


@app.command()
def asymptotic_check(
    config: str | None = _CONFIG,
    nu: float | None = _NU,
    rho: float | None = _RHO,
    lambda_r: float | None = _LAMBDA_R,
    accel: float | None = _ACCEL,
    y: str = typer.Option("1", "--y", help="Wall distances of the order test"),
    t: str = typer.Option("10", "--t", help="Times of the order test"),
    lambdas: str = typer.Option(
        "0.8,0.4,0.2,0.1", "--lambdas", help="Relaxation times, largest first"
    ),
    retardation: bool = typer.Option(
        False, "--retardation", help="Use the (lambda - lambda_r) / t correction coefficient"
    ),
    rel_tol: float | None = _REL_TOL,
    abs_tol: float | None = _ABS_TOL,
    out: str | None = _OUT,
    fmt: str | None = _FORMAT,
) -> None:
    """
    Order-of-accuracy table of the small-time-constant fields and energetics.

    lambda_r keeps its ratio to the first relaxation time; lambda_r = 0 is a Maxwell fluid.
    """
    with _cli_errors("asymptotic-check"):
        cfg = _run_config(
            "asymptotic-check",
            config,
            nu=nu,
            rho=rho,
            lambda_r=lambda_r,
            accel=accel,
            y=y,
            t=t,
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            fmt=fmt,
            out=out,
        )
        sequence = parse_grid(lambdas)
        base = cfg.fluid_params()
        start = FluidParams(
            nu=base.nu, rho=base.rho, lambda_=sequence[0], lambda_r=base.lambda_r
        )
        flow, spec = cfg.flow_config(), cfg.quadrature_spec()
        cases = [(y_i, t_j) for t_j in cfg.ts for y_i in cfg.ys]

        def evaluate(case: tuple[float, float]) -> list[tuple[Cell, ...]]:
            report = order_of_accuracy(
                case[0], case[1], start, flow, sequence, retardation=retardation, spec=spec
            )
            errors = zip(
                report.err_u, report.err_tau, report.err_L, report.err_Phi, report.err_delta
            )
            ratios = zip(
                report.ratio_u,
                report.ratio_tau,
                report.ratio_L,
                report.ratio_Phi,
                report.ratio_delta,
            )
            # the first relaxation time has no ratio
            blank: tuple[Cell, ...] = ("",) * 5
            return [
                (report.y, report.t, lam, *errs, *rats)
                for lam, errs, rats in zip(report.lambdas, errors, [blank, *ratios])
            ]

        rows = [row for block in _map(cfg, evaluate, cases) for row in block]
        _emit(cfg, ORDER_COLUMNS, rows)


if __name__ == "__main__":
    app()
