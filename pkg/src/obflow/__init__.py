"""Oldroyd-B flow over a constantly accelerating plate."""

from __future__ import annotations

from .core.energetics import EnergeticsReport, full_report
from .core.fields import FieldPoint, FieldValue, field_value, shear_stress, velocity
from .errors import ObflowError
from .fluid import FlowConfig, FluidModel, FluidParams, classify

__version__ = "0.1.0"

__all__ = [
    "FluidParams",
    "FlowConfig",
    "FluidModel",
    "classify",
    "FieldPoint",
    "FieldValue",
    "velocity",
    "shear_stress",
    "field_value",
    "EnergeticsReport",
    "full_report",
    "ObflowError",
]
