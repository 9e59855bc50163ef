"""Experiment reports with Hoeffding confidence radii."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

CONFIDENCE = 0.99
CSV_SCHEMA = "robustgap-report/1"
CSV_COLUMNS = (
    "schema", "family", "params", "classifier", "adversary", "metric",
    "trials", "successes", "estimate", "ci_radius", "threshold", "passed", "seed",
)


def hoeffding_radius(trials: int, confidence: float = CONFIDENCE) -> float:
    """Two-sided Hoeffding radius sqrt(ln(2 / (1 - confidence)) / (2 trials))."""
    if trials < 1:
        raise ValueError("trials must be positive")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * trials))


def _fmt(x: float) -> str:
    return f"{x:.6f}"


@dataclass
class ExperimentReport:
    family: str
    params: dict
    classifier: str
    adversary: str
    metric: str            # "accuracy", "advantage" or "tv-lower-bound"
    trials: int
    successes: int
    estimate: float
    ci_radius: float
    seed: str
    threshold: float | None = None
    passed: bool | None = None
    notes: list[str] = field(default_factory=list)

    def to_row(self) -> dict:
        return {
            "schema": CSV_SCHEMA,
            "family": self.family,
            "params": json.dumps(self.params, sort_keys=True, separators=(",", ":")),
            "classifier": self.classifier,
            "adversary": self.adversary,
            "metric": self.metric,
            "trials": str(self.trials),
            "successes": str(self.successes),
            "estimate": _fmt(self.estimate),
            "ci_radius": _fmt(self.ci_radius),
            "threshold": "" if self.threshold is None else _fmt(self.threshold),
            "passed": "" if self.passed is None else str(bool(self.passed)).lower(),
            "seed": self.seed,
        }

    def to_json(self) -> dict:
        d = asdict(self)
        d["estimate"] = round(self.estimate, 12)
        d["ci_radius"] = round(self.ci_radius, 12)
        return d

    def summary(self) -> str:
        status = {None: "----", True: "PASS", False: "FAIL"}[self.passed]
        return (f"{status} {self.family} {self.classifier} vs {self.adversary}: "
                f"{self.metric} {self.estimate:.4f} +/- {self.ci_radius:.4f} ({self.trials} trials)")


def reports_to_csv(reports: list[ExperimentReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.to_row())
    return buf.getvalue()


def reports_to_json(reports: list[ExperimentReport], header: dict | None = None) -> str:
    doc = {"schema": CSV_SCHEMA, "header": header or {}, "reports": [r.to_json() for r in reports]}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
