from __future__ import annotations

import csv
import io
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError

Cell = float | int | bool | str
# Plain notation between these magnitudes, scientific outside
SCI_BELOW = 1e-4
SCI_FROM = 1e6


def format_number(x: float) -> str:
    """
    Shortest round-trip decimal text of ``x``.

    Zero prints as "0.0"; 0 < |x| < 1e-4 and |x| >= 1e6 use scientific notation.
    """
    x = float(x)
    if x == 0 or not math.isfinite(x):
        return repr(x if x != 0 else 0.0)
    if abs(x) < SCI_BELOW or abs(x) >= SCI_FROM:
        return np.format_float_scientific(x, unique=True, trim="-")
    return repr(x)


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return format_number(value)


def render_csv(columns: Sequence[str], rows: Sequence[Sequence[Cell]]) -> str:
    """One header row, comma delimiter, ``\\n`` line ends."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def render_table(columns: Sequence[str], rows: Sequence[Sequence[Cell]]) -> str:
    """Right-aligned columns for terminals."""
    cells = [list(columns)] + [[format_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render(columns: Sequence[str], rows: Sequence[Sequence[Cell]], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(columns, rows)
    if fmt == "table":
        return render_table(columns, rows)
    raise ConfigurationError(f"unknown output format {fmt!r}")


def write_output(text: str, out: str | None) -> None:
    """Write to ``out`` (parents created) or to standard output when it is None."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot write {out}: {exc}") from exc


__all__ = ["format_number", "format_cell", "render_csv", "render_table", "render", "write_output"]
