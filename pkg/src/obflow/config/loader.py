from __future__ import annotations

import os
from typing import Any

import yaml
from pydantic import ValidationError

from ..errors import ConfigurationError
from ..utils.grid import parse_grid
from .models import RunConfig, Settings

# Can be overridden with the "OBFLOW_CONFIG" environment variable.
CONFIG_ENV = "OBFLOW_CONFIG"
DEFAULT_CONFIG: str = "configs/default.yaml"


def load_settings(path: str | None = None) -> Settings:
    """
    Load project settings from a YAML configuration file.

    Args:
        path (str | None): Optional path to the configuration file. If not provided,
                           OBFLOW_CONFIG or DEFAULT_CONFIG is used.

    Returns:
        Settings: Settings initialized with the loaded configuration. A missing or empty
                  file gives the defaults (environment variables still apply).

    Raises:
        ConfigurationError: The file is not valid YAML or holds invalid values.
    """
    file_path: str = path or os.getenv(CONFIG_ENV, DEFAULT_CONFIG)
    data: dict[str, Any] = {}

    if os.path.exists(file_path):
        try:
            with open(file_path, encoding="utf-8") as f:
                loaded = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"cannot parse {file_path}: {exc}") from exc
        if isinstance(loaded, dict):
            data = loaded
    elif path:
        raise ConfigurationError(f"config file not found: {path}")

    try:
        return Settings(**data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid settings in {file_path}: {exc}") from exc


def _given(**values: Any) -> dict[str, Any]:
    return {k: v for k, v in values.items() if v is not None}


def build_run_config(
    settings: Settings,
    *,
    nu: float | None = None,
    rho: float | None = None,
    lambda_: float | None = None,
    lambda_r: float | None = None,
    accel: float | None = None,
    slab_length: float | None = None,
    y: str | None = None,
    t: str | None = None,
    rel_tol: float | None = None,
    abs_tol: float | None = None,
    model: str | None = None,
    fmt: str | None = None,
    out: str | None = None,
) -> RunConfig:
    """
    Merge command-line overrides into the settings and validate the result.

    Options left as None keep the settings value.

    Raises:
        ConfigurationError: Any value or grid is invalid.
    """
    fluid = {
        **settings.fluid.model_dump(),
        **_given(nu=nu, rho=rho, lambda_=lambda_, lambda_r=lambda_r),
    }
    flow = {**settings.flow.model_dump(), **_given(accel=accel, slab_length=slab_length)}
    quadrature = {
        **settings.quadrature.model_dump(),
        **_given(rel_tol=rel_tol, abs_tol=abs_tol),
    }
    try:
        return RunConfig(
            fluid=fluid,  # type: ignore[arg-type]
            flow=flow,  # type: ignore[arg-type]
            quadrature=quadrature,  # type: ignore[arg-type]
            ys=parse_grid(y if y is not None else settings.grid.y),
            ts=parse_grid(t if t is not None else settings.grid.t),
            model=model or settings.model,  # type: ignore[arg-type]
            format=fmt or settings.output.format,  # type: ignore[arg-type]
            out=out if out is not None else settings.output.path,
            threads=settings.threads,
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid run configuration: {exc}") from exc


__all__ = ["load_settings", "build_run_config", "DEFAULT_CONFIG", "CONFIG_ENV"]
