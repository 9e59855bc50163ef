"""Premise checks for the one-way-function converse.

A family that is far apart after perturbation (certified by a robust
classifier) yet indistinguishable to every learner in the battery yields
the candidate ``f(b, r) = P(sample_{D_b}(r))``. This module evaluates that
candidate and both premises; it does not build further primitives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .framework.evaluate import evaluate, perturbed_batch
from .framework.learners import BASELINES, span_learner, train_baseline
from .framework.report import CONFIDENCE, ExperimentReport
from .framework.task import Adversary, Classifier, TaskFamily
from .rng import RngStream

FARNESS = 0.8
BATTERY = BASELINES + ("span-learner",)


# --------------------------------------------------------------------------
# the candidate function


@dataclass
class OwfCandidate:
    """f(b, r): sample D_b and perturb it, all randomness taken from the bit string r."""

    task: TaskFamily
    adversary: Adversary | None
    rand_bits: int = 256

    def __post_init__(self):
        if not 1 <= self.rand_bits <= 256:
            raise ValueError("randomness length must lie in [1, 256] bits")

    def _stream(self, r) -> RngStream:
        r = np.asarray(r, dtype=np.uint8).ravel()
        if r.size != self.rand_bits:
            raise ValueError(f"randomness must have {self.rand_bits} bits, got {r.size}")
        seed = np.packbits(r, bitorder="little").tobytes()
        return RngStream(seed, ("owf-candidate", str(self.rand_bits)))

    def payload(self, b: int, r) -> np.ndarray:
        rng = self._stream(r)
        X = self.task.sample_many(np.array([b], dtype=np.uint8), rng.child("sample"))
        if self.adversary is not None:
            X = self.adversary.perturb_many(X, np.array([b]), rng.child("adversary"))
        return X[0]

    def __call__(self, b: int, r) -> bytes:
        return serialize_payload(self.payload(b, r), self.task.modulus)


def serialize_payload(x, modulus: int) -> bytes:
    x = np.asarray(x, dtype=np.int64)
    if modulus == 2:
        return np.packbits(x.astype(np.uint8)).tobytes()
    width = max(1, ((modulus - 1).bit_length() + 7) // 8)
    return b"".join(int(v).to_bytes(width, "big") for v in x % modulus)


def owf_candidate_eval(cand: OwfCandidate, b: int, r) -> bytes:
    return cand(b, r)


def invert_exhaustive(cand: OwfCandidate, y: bytes) -> tuple[int, np.ndarray] | None:
    """Some (b, r) with f(b, r) = y, by trying every input (micro scale only)."""
    if cand.rand_bits > 16:
        raise ValueError("exhaustive inversion is limited to 16 random bits")
    for v in range(1 << cand.rand_bits):
        r = ((v >> np.arange(cand.rand_bits)) & 1).astype(np.uint8)
        for b in (0, 1):
            if cand(b, r) == y:
                return b, r
    return None


# --------------------------------------------------------------------------
# statistical farness


def tv_radius(trials_per_class: int, confidence: float = CONFIDENCE) -> float:
    """Hoeffding radius for a difference of two means over T samples each: sqrt(ln(2/delta) / T)."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / trials_per_class)


@dataclass
class TvBound:
    estimate: float
    trials: int
    ci_radius: float
    threshold: float = FARNESS

    @property
    def lower(self) -> float:
        return self.estimate - self.ci_radius

    @property
    def passed(self) -> bool:
        return self.lower >= self.threshold


def _class_rate(classifier, task, adversary, label, count, rng) -> float:
    labels = np.full(count, label, dtype=np.uint8)
    X = task.sample_many(labels, rng.child("sample"))
    if adversary is not None:
        X = adversary.perturb_many(X, labels, rng.child("adversary"))
    # any fixed test function bounds TV; abstentions count as 0
    return float((classifier.predict(X) == 1).mean())


def tv_lower_bound(classifier: Classifier, task: TaskFamily, adversary: Adversary | None,
                   trials: int, rng, threshold: float = FARNESS) -> TvBound:
    """E_{D'_1}[R] - E_{D'_0}[R] over ``trials`` samples per class."""
    hi = _class_rate(classifier, task, adversary, 1, trials, rng.child("class", 1))
    lo = _class_rate(classifier, task, adversary, 0, trials, rng.child("class", 0))
    return TvBound(hi - lo, trials, tv_radius(trials), threshold)


def tv_report(bound: TvBound, classifier: Classifier, task: TaskFamily, adversary, rng) -> ExperimentReport:
    return ExperimentReport(
        family=task.family, params=task.params(), classifier=classifier.name,
        adversary=adversary.describe() if adversary is not None else "none[0]",
        metric="tv-lower-bound", trials=2 * bound.trials,
        successes=int(round((bound.estimate + 1) * bound.trials)),
        estimate=bound.estimate, ci_radius=bound.ci_radius,
        seed=rng.seed_hex + "/" + "/".join(rng.path), threshold=bound.threshold,
        passed=bound.passed,
    )


# --------------------------------------------------------------------------
# indistinguishability battery


def train_learner(kind: str, X, y, modulus: int = 2) -> Classifier:
    if kind == "span-learner":
        return span_learner(X, y, modulus).classifier()
    return train_baseline(kind, X, y, modulus)


class NullTask(TaskFamily):
    """Both labels draw from D_0 of the wrapped family (a null control)."""

    def __init__(self, inner: TaskFamily):
        self.inner = inner
        self.family = f"null({inner.family})"
        self.norm = inner.norm

    @property
    def payload_len(self) -> int:
        return self.inner.payload_len

    @property
    def modulus(self) -> int:
        return self.inner.modulus

    def params(self) -> dict:
        return self.inner.params()

    def sample_many(self, labels, rng):
        return self.inner.sample_many(np.zeros(len(labels), dtype=np.uint8), rng)


def advantage_battery(task: TaskFamily, adversary: Adversary | None, trials: int, rng, *,
                      learners=BATTERY, train_size: int = 2000,
                      oracle: Classifier | None = None) -> list[ExperimentReport]:
    """Train each learner on fresh perturbed samples; report its advantage over 1/2.

    ``oracle`` adds an untrained classifier (for instance one holding the
    secret) as a positive control; it should be flagged as distinguishing.
    """
    labels, _, Xt = perturbed_batch(task, adversary, train_size, rng.child("train"))
    reports = []
    for kind in learners:
        clf = train_learner(kind, Xt, labels, task.modulus)
        reports.append(evaluate(clf, task, adversary, trials, rng.child("eval", kind), metric="advantage"))
    if oracle is not None:
        reports.append(evaluate(oracle, task, adversary, trials, rng.child("eval", "oracle"), metric="advantage"))
    return reports


def battery_passed(reports: list[ExperimentReport]) -> bool:
    return all(r.passed for r in reports)


def premise_report(task: TaskFamily, classifier: Classifier, adversary: Adversary | None,
                   trials: int, rng, *, threshold: float = FARNESS, controls: bool = True) -> dict:
    """Combined farness and indistinguishability check for one family."""
    bound = tv_lower_bound(classifier, task, adversary, trials, rng.child("tv"), threshold)
    battery = advantage_battery(task, adversary, trials, rng.child("battery"))
    out = {
        "family": task.family,
        "params": task.params(),
        "classifier": classifier.name,
        "adversary": adversary.describe() if adversary is not None else "none[0]",
        "tv_lower_bound": {"estimate": round(bound.estimate, 12), "ci_radius": round(bound.ci_radius, 12),
                           "threshold": threshold, "trials_per_class": trials, "passed": bound.passed},
        "battery": [r.to_json() for r in battery],
        "battery_passed": battery_passed(battery),
    }
    if controls:
        pos = advantage_battery(task, adversary, trials, rng.child("positive"), learners=(), oracle=classifier)
        null = advantage_battery(NullTask(task), adversary, trials, rng.child("null"))
        out["positive_control"] = {"report": pos[0].to_json(), "distinguishes": not pos[0].passed}
        out["null_control"] = {"reports": [r.to_json() for r in null], "passed": battery_passed(null)}
    out["premises_hold"] = bool(bound.passed and out["battery_passed"])
    return out
