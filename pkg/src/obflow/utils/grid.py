from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError


def _number(token: str, text: str) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise ConfigurationError(f"not a number {token!r} in grid {text!r}") from exc
    if not math.isfinite(value):
        raise ConfigurationError(f"grid values must be finite, got {token!r}")
    return value


def parse_grid(text: str) -> list[float]:
    """
    Parse a grid given as a list ``"0,1,3"`` or a range ``"start:stop:n"``.

    A range gives n points from start to stop inclusive (n = 1 gives start alone).
    Ordering is checked later by RunConfig.

    Raises:
        ConfigurationError: Empty text, non-numeric tokens or a malformed range.
    """
    text = text.strip()
    if not text:
        raise ConfigurationError("grid must not be empty")

    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            raise ConfigurationError(f"range grid must be start:stop:n, got {text!r}")
        start, stop = _number(parts[0], text), _number(parts[1], text)
        try:
            count = int(parts[2])
        except ValueError as exc:
            raise ConfigurationError(f"point count must be an integer in {text!r}") from exc
        if count < 1:
            raise ConfigurationError(f"point count must be >= 1 in {text!r}")
        return [float(v) for v in np.linspace(start, stop, count)]

    return [_number(token.strip(), text) for token in text.split(",") if token.strip()]


__all__ = ["parse_grid"]
