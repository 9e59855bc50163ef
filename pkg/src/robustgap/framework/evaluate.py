"""Monte-Carlo evaluation of a classifier against a (perturbed) task.

Trials are split into fixed-size chunks, each with its own derived stream,
so the result does not depend on how many workers process the chunks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .report import ExperimentReport, hoeffding_radius
from .task import Adversary, BudgetViolation, Classifier, Identity, TaskFamily, distance

CHUNK = 2048


def worker_count() -> int:
    """Read from ``ROBUSTGAP_WORKERS``; never influences results."""
    try:
        return max(1, int(os.environ.get("ROBUSTGAP_WORKERS", "1")))
    except ValueError:
        return 1


def perturbed_batch(task: TaskFamily, adversary: Adversary | None, count: int, rng):
    """Balanced-coin labels, samples, and budget-checked perturbations."""
    labels = rng.child("labels").bits(count)
    X = task.sample_many(labels, rng.child("sample"))
    if adversary is None:
        return labels, X, X
    Xt = adversary.perturb_many(X, labels, rng.child("adversary"))
    dist = distance(X, Xt, task.norm, task.modulus)
    if dist.max(initial=0) > adversary.budget:
        bad = int(np.argmax(dist))
        raise BudgetViolation(
            f"{adversary.describe()} moved a sample by {int(dist[bad])} > budget {adversary.budget}"
        )
    return labels, X, Xt


def _run_chunk(classifier, task, adversary, rng, j, size):
    stream = rng.child("chunk", j)
    labels, _, Xt = perturbed_batch(task, adversary, size, stream)
    pred = classifier.predict(Xt)
    return int((pred == labels).sum())


def evaluate(classifier: Classifier, task: TaskFamily, adversary: Adversary | None = None,
             trials: int = 1000, rng=None, *, threshold: float | None = None,
             metric: str = "accuracy", exact: bool = False) -> ExperimentReport:
    """Estimate Pr[classifier(P(x)) = b] over b uniform, x from D_b.

    ``metric="advantage"`` reports accuracy - 1/2 and passes when it is at
    most the confidence radius; ``metric="accuracy"`` passes when the
    estimate is at least ``threshold - radius`` (``threshold`` itself when
    ``exact``).
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if rng is None:
        raise ValueError("an RngStream is required")
    sizes = [min(CHUNK, trials - s) for s in range(0, trials, CHUNK)]
    workers = worker_count()
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda a: _run_chunk(classifier, task, adversary, rng, *a),
                                   enumerate(sizes)))
    else:
        counts = [_run_chunk(classifier, task, adversary, rng, j, s) for j, s in enumerate(sizes)]
    successes = sum(counts)
    acc = successes / trials
    radius = hoeffding_radius(trials)
    adv = adversary or Identity()
    if metric == "advantage":
        estimate = acc - 0.5
        passed = estimate <= radius
    elif metric == "accuracy":
        estimate = acc
        slack = 0.0 if exact else radius
        passed = None if threshold is None else estimate >= threshold - slack
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return ExperimentReport(
        family=task.family, params=task.params(), classifier=classifier.name,
        adversary=adv.describe(), metric=metric, trials=trials, successes=successes,
        estimate=estimate, ci_radius=radius, seed=rng.seed_hex + "/" + "/".join(rng.path),
        threshold=threshold if metric == "accuracy" else radius, passed=passed,
    )
