from __future__ import annotations

import json
from pathlib import Path

import pytest
import structlog

from obflow.utils.logging import bind_context, get_logger, setup_logging


def _records(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_setup_logging_produces_json(capsys: pytest.CaptureFixture[str]) -> None:
    """Configure logging and verify that structlog writes JSON lines to stderr."""
    setup_logging(force=True)
    log = structlog.get_logger()
    log.warning("hello", foo=123)

    captured = capsys.readouterr()
    # stdout carries result rows only
    assert captured.out == ""
    data = _records(captured.err)[-1]
    # Verify keys added by processors
    assert data["event"] == "hello"
    assert data["message"] == "hello"
    assert data["level"] in ("warning", "WARNING")
    assert "timestamp" in data
    assert data["foo"] == 123


def test_default_level_hides_info(capsys: pytest.CaptureFixture[str]) -> None:
    setup_logging(force=True)
    get_logger("obflow.test").info("quiet")
    assert capsys.readouterr().err == ""


def test_level_and_context_from_environment(
    capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv("OBFLOW_LOG_LEVEL", "DEBUG")
    setup_logging(force=True)
    bind_context(command="field", model="maxwell", run_id="abc123")

    get_logger("obflow.test").debug("evaluating", points=4, skipped=None)

    data = _records(capsys.readouterr().err)[-1]
    assert data["command"] == "field"
    assert data["model"] == "maxwell"
    assert data["run_id"] == "abc123"
    assert data["points"] == 4
    assert "skipped" not in data  # None values are dropped

    monkeypatch.delenv("OBFLOW_LOG_LEVEL")
    setup_logging(force=True)


def test_records_duplicated_into_log_file(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    target = tmp_path / "logs" / "run.jsonl"
    monkeypatch.setenv("OBFLOW_LOG_FILE", str(target))
    setup_logging(force=True)

    get_logger("obflow.test").warning("integral did not converge", t=1.0)

    lines = _records(target.read_text(encoding="utf-8"))
    assert lines[-1]["event"] == "integral did not converge"
    assert lines[-1]["t"] == 1.0
    assert _records(capsys.readouterr().err)[-1]["t"] == 1.0
