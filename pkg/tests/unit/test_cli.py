from __future__ import annotations

import csv
import math
from pathlib import Path

import pytest
from typer.testing import CliRunner

from obflow.runner.main import (
    ENERGETICS_COLUMNS,
    EXIT_CONFIG,
    EXIT_VERIFY_FAILED,
    FIELD_COLUMNS,
    ORDER_COLUMNS,
    VERIFY_COLUMNS,
    app,
)

runner = CliRunner()


def _rows(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def _header(path: Path) -> list[str]:
    return path.read_text(encoding="utf-8").splitlines()[0].split(",")


def test_field_default_grid_to_csv(tmp_path: Path) -> None:
    out = tmp_path / "field.csv"
    result = runner.invoke(app, ["field", "--out", str(out)])
    assert result.exit_code == 0, result.output

    assert _header(out) == list(FIELD_COLUMNS)
    rows = _rows(out)
    # y runs fastest, t in grid order
    assert [(float(r["y"]), float(r["t"])) for r in rows] == [
        (y, t) for t in (0.5, 1.0, 5.0) for y in (0.0, 1.0, 3.0)
    ]
    walls = [r for r in rows if float(r["y"]) == 0.0]
    assert [float(r["u"]) for r in walls] == pytest.approx([0.5, 1.0, 5.0])
    assert all(float(r["tau"]) < 0 for r in walls)


def test_field_table_to_stdout() -> None:
    args = ["field", "--lambda", "0.5", "--lambda-r", "0.2", "--y", "0", "--t", "1"]
    result = runner.invoke(app, [*args, "--format", "table"])
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert lines[0].split() == list(FIELD_COLUMNS)
    assert set(lines[1].replace(" ", "")) == {"-"}
    assert len(lines) == 3


def test_field_reads_config_file(tmp_path: Path) -> None:
    cfg = tmp_path / "run.yaml"
    cfg.write_text('flow:\n  accel: 2.0\ngrid:\n  y: "0"\n  t: "1,2"\n', encoding="utf-8")
    out = tmp_path / "field.csv"
    result = runner.invoke(app, ["field", "--config", str(cfg), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert [float(r["u"]) for r in _rows(out)] == pytest.approx([2.0, 4.0])


@pytest.mark.parametrize(
    "args",
    [
        ["field", "--model", "bingham"],
        ["field", "--t", "2,1"],
        ["field", "--y", "0:1:x"],
        ["field", "--nu", "-1"],
        ["field", "--format", "json"],
        ["field", "--config", "does-not-exist.yaml"],
        ["verify", "--suite", "physics"],
    ],
)
def test_configuration_errors_exit_2(args: list[str]) -> None:
    result = runner.invoke(app, args)
    assert result.exit_code == EXIT_CONFIG
    assert "error:" in result.output


def test_energetics_newtonian(tmp_path: Path) -> None:
    out = tmp_path / "energetics.csv"
    result = runner.invoke(app, ["energetics", "--t", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output

    assert _header(out) == list(ENERGETICS_COLUMNS)
    (row,) = _rows(out)
    assert row["model"] == "newtonian"
    assert float(row["L"]) == pytest.approx(-2.0 / math.sqrt(math.pi), rel=1e-9)
    assert float(row["L"]) == pytest.approx(float(row["L_N"]), rel=1e-9)
    assert float(row["balance_residual"]) < 1e-3


def test_verify_suite_passes(tmp_path: Path) -> None:
    out = tmp_path / "verify.csv"
    result = runner.invoke(app, ["verify", "--suite", "special", "--out", str(out)])
    assert result.exit_code == 0, result.output

    assert _header(out) == list(VERIFY_COLUMNS)
    rows = _rows(out)
    assert {r["suite"] for r in rows} == {"special"}
    assert {r["status"] for r in rows} == {"pass"}


def test_verify_failure_exit_1(tmp_path: Path) -> None:
    out = tmp_path / "verify.csv"
    result = runner.invoke(
        app, ["verify", "--suite", "special", "--rel-tol", "1", "--out", str(out)]
    )
    assert result.exit_code == EXIT_VERIFY_FAILED
    assert "FAIL [special] i1erfc is the integral of erfc" in result.output
    assert "1 of 4 checks failed" in result.output
    # the summary table is still written
    assert "FAIL" in {r["status"] for r in _rows(out)}


@pytest.mark.slow
def test_asymptotic_check_table(tmp_path: Path) -> None:
    out = tmp_path / "order.csv"
    result = runner.invoke(
        app, ["asymptotic-check", "--lambdas", "0.4,0.2", "--rel-tol", "1e-8", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output

    assert _header(out) == list(ORDER_COLUMNS)
    first, second = _rows(out)
    assert float(first["lambda"]) == 0.4
    assert first["ratio_u"] == ""
    assert float(second["err_u"]) < float(first["err_u"])
    assert float(second["ratio_u"]) > 2.0
    assert first["ratio_delta"] == ""
    for name in ("L", "Phi", "delta"):
        assert float(second[f"err_{name}"]) < float(first[f"err_{name}"])
        assert float(second[f"ratio_{name}"]) > 2.0


def test_equal_times_config_matches_newtonian(tmp_path: Path) -> None:
    joseph = Path(__file__).resolve().parents[2] / "configs" / "joseph.yaml"
    grid = ["--y", "0,1", "--t", "1"]
    out_j, out_n = tmp_path / "joseph.csv", tmp_path / "newtonian.csv"
    result = runner.invoke(app, ["field", "--config", str(joseph), *grid, "--out", str(out_j)])
    assert result.exit_code == 0, result.output
    result = runner.invoke(app, ["field", *grid, "--out", str(out_n)])
    assert result.exit_code == 0, result.output

    for rj, rn in zip(_rows(out_j), _rows(out_n), strict=True):
        assert float(rj["u"]) == pytest.approx(float(rn["u"]), rel=1e-6)
        assert float(rj["tau"]) == pytest.approx(float(rn["tau"]), rel=1e-6)
