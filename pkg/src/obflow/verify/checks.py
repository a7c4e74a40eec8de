from __future__ import annotations

from dataclasses import dataclass

from ..utils.logging import get_logger

_log = get_logger(__name__)


@dataclass(frozen=True, slots=True)
class CheckOutcome:
    """
    One named invariant: measured against expected with an error budget.

    A check holds when |measured - expected| + err_estimate <= threshold. Reported
    checks are shown in the summary but never fail a run.
    """

    name: str
    suite: str
    measured: float
    expected: float
    threshold: float
    err_estimate: float = 0.0
    reported: bool = False

    @property
    def discrepancy(self) -> float:
        return abs(self.measured - self.expected)

    @property
    def holds(self) -> bool:
        return self.discrepancy + self.err_estimate <= self.threshold

    @property
    def failed(self) -> bool:
        return not self.reported and not self.holds

    @property
    def status(self) -> str:
        if self.reported:
            return "info"
        return "pass" if self.holds else "FAIL"


class CheckCollector:
    """Soft assertions over named checks: every outcome is kept, failures are reported together."""

    def __init__(self) -> None:
        self.outcomes: list[CheckOutcome] = []

    def record(self, outcome: CheckOutcome) -> CheckOutcome:
        self.outcomes.append(outcome)
        if outcome.failed:
            _log.warning(
                "Check failed",
                check=outcome.name,
                suite=outcome.suite,
                discrepancy=outcome.discrepancy,
                err_estimate=outcome.err_estimate,
                threshold=outcome.threshold,
            )
        return outcome

    def check(
        self,
        name: str,
        suite: str,
        measured: float,
        expected: float,
        threshold: float,
        *,
        err_estimate: float = 0.0,
        reported: bool = False,
    ) -> CheckOutcome:
        return self.record(
            CheckOutcome(
                name=name,
                suite=suite,
                measured=float(measured),
                expected=float(expected),
                threshold=float(threshold),
                err_estimate=float(err_estimate),
                reported=reported,
            )
        )

    def check_relative(
        self,
        name: str,
        suite: str,
        measured: float,
        expected: float,
        rel: float,
        *,
        err_estimate: float = 0.0,
        reported: bool = False,
    ) -> CheckOutcome:
        """Like ``check`` with threshold rel * |expected|."""
        return self.check(
            name,
            suite,
            measured,
            expected,
            rel * abs(expected),
            err_estimate=err_estimate,
            reported=reported,
        )

    def check_flag(
        self, name: str, suite: str, flag: bool, *, reported: bool = False
    ) -> CheckOutcome:
        """A yes/no claim, stored as measured 1.0 / 0.0 against expected 1.0."""
        return self.check(name, suite, 1.0 if flag else 0.0, 1.0, 0.5, reported=reported)

    @property
    def failures(self) -> list[CheckOutcome]:
        return [o for o in self.outcomes if o.failed]

    def failure_lines(self) -> list[str]:
        """One line per failed check, with the numbers that broke it."""
        return [
            f"FAIL [{f.suite}] {f.name}: |{f.measured!r} - {f.expected!r}|"
            f" + {f.err_estimate!r} > {f.threshold!r}"
            for f in self.failures
        ]


__all__ = ["CheckOutcome", "CheckCollector"]
