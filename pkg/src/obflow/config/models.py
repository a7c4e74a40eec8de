from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from ..core.quadrature import QuadratureSpec
from ..fluid import FlowConfig, FluidParams

ModelTag = Literal["auto", "newtonian", "maxwell", "second-grade", "oldroyd-b"]
OutputFormat = Literal["csv", "table"]


class FluidSettings(BaseModel):
    """Material constants of the fluid (consistent units, no unit parsing)."""

    model_config = ConfigDict(populate_by_name=True)

    nu: float = Field(1.0, gt=0)  # kinematic viscosity
    rho: float = Field(1.0, gt=0)  # density
    lambda_: float = Field(0.0, ge=0, alias="lambda")  # relaxation time
    lambda_r: float = Field(0.0, ge=0)  # retardation time


class FlowSettings(BaseModel):
    """Plate motion and slab geometry."""

    accel: float = 1.0  # plate acceleration A
    slab_length: float = Field(1.0, gt=0)  # slab length l used by the energetics


class QuadratureSettings(BaseModel):
    """Tolerances of the wavenumber integrals."""

    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    max_panels: int = Field(1_000_000, ge=1)


class OutputSettings(BaseModel):
    """Where and how result rows are written."""

    format: OutputFormat = "csv"
    path: str | None = None  # None writes to standard output


class GridSettings(BaseModel):
    """Default evaluation grids in ``a,b,c`` or ``start:stop:n`` syntax."""

    y: str = "0,1,3"
    t: str = "0.5,1,5"


class Settings(BaseSettings):
    """
    Project settings.

    Loads values from the following sources:
    - Environment variables (prefix OBFLOW_, nested with "__", e.g. OBFLOW_FLUID__NU)
    - Initialization values (e.g., from YAML)
    - .env file
    - Secret files
    """

    model_config = SettingsConfigDict(env_prefix="OBFLOW_", env_nested_delimiter="__")

    threads: int = Field(1, ge=1)  # worker threads for grid evaluation
    model: ModelTag = "auto"
    fluid: FluidSettings = Field(default_factory=FluidSettings)
    flow: FlowSettings = Field(default_factory=FlowSettings)
    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    grid: GridSettings = Field(default_factory=GridSettings)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """
        Configure the order of configuration sources.

        Loading priority:
        1. Environment variables
        2. Initialization values (e.g., from YAML)
        3. .env file
        4. Secret files
        """
        return (env_settings, init_settings, dotenv_settings, file_secret_settings)


class RunConfig(BaseModel):
    """
    Fully resolved inputs of one CLI run.

    Grids are non-empty, strictly increasing and non-negative; tolerances are positive.
    """

    model_config = ConfigDict(frozen=True)

    fluid: FluidSettings
    flow: FlowSettings
    quadrature: QuadratureSettings
    ys: list[float]
    ts: list[float]
    model: ModelTag = "auto"
    format: OutputFormat = "csv"
    out: str | None = None
    threads: int = Field(1, ge=1)

    @field_validator("ys", "ts")
    @classmethod
    def _check_grid(cls, values: list[float]) -> list[float]:
        if not values:
            raise ValueError("grid must not be empty")
        if any(v < 0 for v in values):
            raise ValueError("grid values must be >= 0")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("grid must be strictly increasing")
        return values

    def fluid_params(self) -> FluidParams:
        return FluidParams(
            nu=self.fluid.nu,
            rho=self.fluid.rho,
            lambda_=self.fluid.lambda_,
            lambda_r=self.fluid.lambda_r,
        )

    def flow_config(self) -> FlowConfig:
        return FlowConfig(accel=self.flow.accel, slab_length=self.flow.slab_length)

    def quadrature_spec(self) -> QuadratureSpec:
        return QuadratureSpec(
            rel_tol=self.quadrature.rel_tol,
            abs_tol=self.quadrature.abs_tol,
            max_panels=self.quadrature.max_panels,
        )


__all__ = [
    "ModelTag",
    "OutputFormat",
    "FluidSettings",
    "FlowSettings",
    "QuadratureSettings",
    "OutputSettings",
    "GridSettings",
    "Settings",
    "RunConfig",
]
