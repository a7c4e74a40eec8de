from __future__ import annotations

import math
from enum import IntEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special as sp

from ..errors import UnsupportedOrder

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


class ErfcOrder(IntEnum):
    """Supported orders of the iterated complementary error function."""

    ERFC = 0
    FIRST = 1
    SECOND = 2


def _output(value: NDArray[np.float64]) -> float | NDArray[np.float64]:
    return float(value) if value.ndim == 0 else value


def erfc(x: ArrayLike) -> float | NDArray[np.float64]:
    """Complementary error function, vectorized over numpy arrays."""
    return _output(np.asarray(sp.erfc(np.asarray(x, dtype=float))))


def _ierfc1(x: NDArray[np.float64]) -> NDArray[np.float64]:
    # erfcx keeps x >= 0 finite where exp(-x^2) and erfc(x) underflow separately
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = np.exp(-x * x) * (_INV_SQRT_PI - x * sp.erfcx(x))
        direct = np.exp(-x * x) * _INV_SQRT_PI - x * sp.erfc(x)
    return np.where(x >= 0, scaled, direct)


def ierfc(x: ArrayLike, n: int = 1) -> float | NDArray[np.float64]:
    """
    Iterated complementary error function i^n erfc(x) for n in {0, 1, 2}.

    Uses i^1 erfc(x) = e^{-x^2}/sqrt(pi) - x erfc(x) and the recurrence
    2n i^n erfc(x) = i^{n-2} erfc(x) - 2x i^{n-1} erfc(x).

    Args:
        x: Argument, scalar or array.
        n: Order of iteration (0 returns erfc itself).

    Returns:
        float | ndarray: i^n erfc(x), a float for scalar input.

    Raises:
        UnsupportedOrder: n is not 0, 1 or 2.
    """
    try:
        order = ErfcOrder(n)
    except ValueError as exc:
        raise UnsupportedOrder(f"i^n erfc is implemented for n in {{0, 1, 2}}, got {n!r}") from exc

    arr = np.asarray(x, dtype=float)
    if order is ErfcOrder.ERFC:
        return _output(np.asarray(sp.erfc(arr)))
    first = _ierfc1(arr)
    if order is ErfcOrder.FIRST:
        return _output(first)
    return _output((sp.erfc(arr) - 2.0 * arr * first) / 4.0)


__all__ = ["ErfcOrder", "erfc", "ierfc"]
