from __future__ import annotations

import os
from collections.abc import Iterator
from pathlib import Path

import pytest
from structlog.contextvars import clear_contextvars

from obflow.core.quadrature import QuadratureSpec
from obflow.fluid import FlowConfig, FluidParams


@pytest.fixture(autouse=True)
def _isolated_env(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Drop OBFLOW_* variables and point the default config at a missing file."""
    for name in list(os.environ):
        if name.startswith("OBFLOW_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("OBFLOW_CONFIG", str(tmp_path / "absent.yaml"))
    yield
    clear_contextvars()


@pytest.fixture()
def newtonian() -> FluidParams:
    return FluidParams(nu=1.0, rho=1.0)


@pytest.fixture()
def oldroyd() -> FluidParams:
    """Relaxation dominates retardation: lambda = 0.5, lambda_r = 0.2."""
    return FluidParams(nu=1.0, rho=1.0, lambda_=0.5, lambda_r=0.2)


@pytest.fixture()
def maxwell() -> FluidParams:
    return FluidParams(nu=1.0, rho=1.0, lambda_=0.4)


@pytest.fixture()
def second_grade() -> FluidParams:
    return FluidParams(nu=1.0, rho=1.0, lambda_r=0.4)


@pytest.fixture()
def flow() -> FlowConfig:
    return FlowConfig(accel=1.0, slab_length=1.0)


@pytest.fixture()
def spec() -> QuadratureSpec:
    """Default tolerances; tests that compare against closed forms rely on them."""
    return QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12)
