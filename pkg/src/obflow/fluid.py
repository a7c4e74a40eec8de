from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfigurationError

# Relative tolerance for deciding lambda == lambda_r
EQUAL_TIMES_RTOL = 1e-12
# Below LAMBDA_FLOOR_FACTOR * t_scale the two-mode formulas are not used
LAMBDA_FLOOR_FACTOR = 1e-9


class FluidModel(str, Enum):
    """
    Fluid taxonomy derived from the relaxation and retardation times.

    The string values double as the ``--model`` tags of the command line.
    """

    OLDROYD_B = "oldroyd-b"
    MAXWELL = "maxwell"
    SECOND_GRADE = "second-grade"
    NEWTONIAN = "newtonian"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigurationError(message)


@dataclass(frozen=True, slots=True)
class FluidParams:
    """
    Material constants of an Oldroyd-B fluid.

    Attributes:
        nu: Kinematic viscosity, > 0.
        rho: Density, > 0.
        lambda_: Relaxation time, >= 0.
        lambda_r: Retardation time, >= 0.
    """

    nu: float
    rho: float = 1.0
    lambda_: float = 0.0
    lambda_r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("nu", "rho", "lambda_", "lambda_r"):
            value = getattr(self, name)
            _require(math.isfinite(value), f"{name} must be finite, got {value!r}")
        _require(self.nu > 0, f"nu must be > 0, got {self.nu!r}")
        _require(self.rho > 0, f"rho must be > 0, got {self.rho!r}")
        _require(self.lambda_ >= 0, f"lambda must be >= 0, got {self.lambda_!r}")
        _require(self.lambda_r >= 0, f"lambda_r must be >= 0, got {self.lambda_r!r}")

    @property
    def mu(self) -> float:
        """Dynamic viscosity rho * nu."""
        return self.rho * self.nu

    @property
    def alpha(self) -> float:
        """Retardation length squared nu * lambda_r."""
        return self.nu * self.lambda_r


@dataclass(frozen=True, slots=True)
class FlowConfig:
    """Plate acceleration ``accel`` (>= 0) and control-volume length ``slab_length`` (> 0)."""

    accel: float = 1.0
    slab_length: float = 1.0

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.accel) and self.accel >= 0,
            f"accel must be finite and >= 0, got {self.accel!r}",
        )
        _require(
            math.isfinite(self.slab_length) and self.slab_length > 0,
            f"slab_length must be finite and > 0, got {self.slab_length!r}",
        )


def lambda_floor(t_scale: float = 1.0) -> float:
    """Smallest relaxation time the two-mode root formulas accept at time scale ``t_scale``."""
    return LAMBDA_FLOOR_FACTOR * t_scale


def classify(params: FluidParams) -> FluidModel:
    """
    Classify a fluid from its relaxation and retardation times.

    Equal times (both zero included) give a Newtonian fluid; the comparison uses a
    relative tolerance of 1e-12.
    """
    lam, lam_r = params.lambda_, params.lambda_r
    if abs(lam - lam_r) <= EQUAL_TIMES_RTOL * max(lam, lam_r):
        return FluidModel.NEWTONIAN
    if lam_r == 0:
        return FluidModel.MAXWELL
    if lam == 0:
        return FluidModel.SECOND_GRADE
    return FluidModel.OLDROYD_B


def with_model(params: FluidParams, model: FluidModel) -> FluidParams:
    """
    Restrict ``params`` to a forced model.

    Maxwell drops the retardation time, second grade drops the relaxation time and
    Newtonian drops both. Oldroyd-B keeps the parameters as given.

    Raises:
        ConfigurationError: Maxwell requested with a zero relaxation time.
    """
    if model is FluidModel.NEWTONIAN:
        return replace(params, lambda_=0.0, lambda_r=0.0)
    if model is FluidModel.MAXWELL:
        _require(params.lambda_ > 0, "maxwell model needs lambda > 0")
        return replace(params, lambda_r=0.0)
    if model is FluidModel.SECOND_GRADE:
        return replace(params, lambda_=0.0)
    return params


__all__ = [
    "FluidModel",
    "FluidParams",
    "FlowConfig",
    "classify",
    "lambda_floor",
    "with_model",
]
