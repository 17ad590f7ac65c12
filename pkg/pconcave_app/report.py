"""Comparison reports: per-check records, verdicts, slack budgets and their JSON/CSV rendering."""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

from pconcave_app.errors import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS

PASS = "pass"
INCONCLUSIVE = "inconclusive"
FAIL = "fail"
INFO = "info"


def judge(slack: float, epsilon: float) -> str:
    """pass when slack >= -eps, inconclusive down to -2 eps, fail below."""
    if math.isnan(slack):
        return FAIL
    if slack >= -epsilon:
        return PASS
    if slack >= -2.0 * epsilon:
        return INCONCLUSIVE
    return FAIL


@dataclass(frozen=True)
class SlackBudget:
    solver: float = 0.0
    interpolation: float = 0.0
    quadrature: float = 0.0

    @property
    def epsilon(self) -> float:
        return 2.0 * self.solver + self.interpolation + self.quadrature

    def as_dict(self) -> Dict[str, float]:
        return {"solver": self.solver, "interpolation": self.interpolation, "quadrature": self.quadrature}


@dataclass(frozen=True)
class CheckRecord:
    name: str
    lhs: float
    rhs: float
    slack: float
    verdict: str
    tolerance: Optional[float] = None

    def as_dict(self) -> Dict[str, object]:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "verdict": self.verdict}


@dataclass
class ComparisonReport:
    """Outcome of one verification experiment.

    Checks default to the budget's epsilon; records added with their own
    `tolerance` are judged against it instead, and `informational` records never
    affect the verdict.
    """

    experiment: str
    config_echo: Mapping[str, str]
    slack_budget: SlackBudget = field(default_factory=SlackBudget)
    epsilon_override: Optional[float] = None
    checks: List[CheckRecord] = field(default_factory=list)
    witnesses: List[Dict[str, object]] = field(default_factory=list)
    runtime_seconds: float = 0.0

    @property
    def epsilon(self) -> float:
        return self.epsilon_override if self.epsilon_override is not None else self.slack_budget.epsilon

    def add_check(
        self,
        name: str,
        lhs: float,
        rhs: float,
        tolerance: Optional[float] = None,
        informational: bool = False,
    ) -> CheckRecord:
        """Record lhs >= rhs; slack = lhs - rhs."""
        lhs, rhs = float(lhs), float(rhs)
        slack = lhs - rhs if not (math.isinf(lhs) and math.isinf(rhs) and lhs == rhs) else 0.0
        verdict = INFO if informational else judge(slack, self.epsilon if tolerance is None else tolerance)
        record = CheckRecord(name=name, lhs=lhs, rhs=rhs, slack=slack, verdict=verdict, tolerance=tolerance)
        self.checks.append(record)
        if verdict == INCONCLUSIVE:
            logging.warning("%s: %s is inconclusive (slack %.3e), refine h", self.experiment, name, slack)
        elif verdict == FAIL:
            logging.warning("%s: %s failed (slack %.3e)", self.experiment, name, slack)
        return record

    def add_flag(self, name: str, holds: bool, informational: bool = False) -> CheckRecord:
        """Boolean check recorded as lhs = 1 or 0 against rhs = 1 with zero tolerance."""
        return self.add_check(name, 1.0 if holds else 0.0, 1.0, tolerance=0.0, informational=informational)

    def add_witness(self, check: str, **coordinates: object) -> None:
        self.witnesses.append({"check": check, **coordinates})

    def waive(self) -> None:
        """Turn every judged record into an informational one."""
        self.checks = [
            CheckRecord(c.name, c.lhs, c.rhs, c.slack, INFO, c.tolerance) if c.verdict != INFO else c for c in self.checks
        ]

    @property
    def min_slack(self) -> float:
        judged = [c.slack for c in self.checks if c.verdict != INFO]
        return min(judged) if judged else math.inf

    @property
    def verdict(self) -> str:
        verdicts = {c.verdict for c in self.checks}
        if FAIL in verdicts:
            return FAIL
        if INCONCLUSIVE in verdicts:
            return INCONCLUSIVE
        if PASS in verdicts:
            return PASS
        return INFO

    @property
    def exit_code(self) -> int:
        return {FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}.get(self.verdict, EXIT_PASS)

    def check(self, name: str) -> CheckRecord:
        for record in self.checks:
            if record.name == name:
                return record
        raise KeyError(name)

    def to_dict(self) -> Dict[str, object]:
        return {
            "experiment": self.experiment,
            "config_echo": dict(self.config_echo),
            "checks": [c.as_dict() for c in self.checks],
            "min_slack": self.min_slack,
            "slack_budget": self.slack_budget.as_dict(),
            "witnesses": list(self.witnesses),
            "runtime_seconds": self.runtime_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(_finite(self.to_dict()), indent=2) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["experiment", "name", "lhs", "rhs", "slack", "verdict"])
        for c in self.checks:
            writer.writerow([self.experiment, c.name, repr(c.lhs), repr(c.rhs), repr(c.slack), c.verdict])
        return buffer.getvalue()

    def write(self, out_dir: Union[str, Path], fmt: str = "json", stem: Optional[str] = None) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{stem or self.experiment}.{fmt}"
        path.write_text(self.to_json() if fmt == "json" else self.to_csv())
        logging.info("Wrote %s report (%s) to %s", self.experiment, self.verdict, path)
        return path


def _finite(value: object) -> object:
    """Non-finite floats become the strings 'inf', '-inf' and 'nan' so the output stays strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value
