"""Learners: the span learner (with generator/evaluator) and three baselines."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra.gf2 import Gf2Span, gf2_matmul
from ..algebra.zq import ZqSpan, _rref_unit, centered, zq_matmul
from .evaluate import evaluate, perturbed_batch
from .report import ExperimentReport
from .task import Adversary, Classifier, TaskFamily

BASELINES = ("majority-bit", "nearest-centroid", "gf2-affine")


class InsufficientData(ValueError):
    pass


class Unsaturated(RuntimeError):
    """The model's span has not reached the expected rank."""


# --------------------------------------------------------------------------
# spans over GF(2) or Z_q behind one interface


def _span(rows: np.ndarray, q: int):
    if q == 2:
        return Gf2Span(rows)
    return _ZqPartialSpan(rows, q)


class _ZqPartialSpan(ZqSpan):
    """Z_q span that keeps the unit-pivot part when elimination cannot finish."""

    def __init__(self, A, q: int):
        self.q = int(q)
        A = np.array(A, dtype=np.int64, ndmin=2)
        self.cols = A.shape[1]
        self.complete = True
        if A.shape[0] == 0 or not (A % q).any():
            self.basis = np.zeros((0, self.cols), dtype=np.int64)
            self.pivots = np.zeros(0, dtype=np.int64)
            return
        M = A % q
        rank, piv = _rref_unit(M, q, self.cols)
        self.complete = not M[rank:].any()
        self.basis, self.pivots = M[:rank].copy(), piv


@dataclass
class LearnedSpanModel:
    basis: np.ndarray
    pivots: np.ndarray
    modulus: int
    samples_used: int
    offset: np.ndarray | None = None
    expected_rank: int | None = None
    rank_history: list[int] = field(default_factory=list)
    complete: bool = True

    @property
    def rank(self) -> int:
        return int(self.basis.shape[0])

    @property
    def insufficient(self) -> bool:
        """Rank 0, below the expected rank, or a non-unit remainder mod q."""
        if self.rank == 0 or not self.complete:
            return True
        return self.expected_rank is not None and self.rank < self.expected_rank

    @property
    def saturated(self) -> bool:
        return not self.insufficient

    def span(self):
        return _span(self.basis, self.modulus)

    def contains_many(self, X) -> np.ndarray:
        if self.rank == 0:
            return ~np.atleast_2d(np.asarray(X) % self.modulus).any(axis=1)
        return self.span().contains_many(X)

    def classifier(self) -> Classifier:
        sp = self.span() if self.rank else None

        def predict(X):
            inside = sp.contains_many(X) if sp is not None else ~(X % self.modulus).any(axis=1)
            return np.where(inside, 0, 1)

        return Classifier("span-learner", predict)


def span_learner(payloads, labels=None, modulus: int = 2, *, expected_rank: int | None = None,
                 use_label1: bool = False) -> LearnedSpanModel:
    """Row-reduce the label-0 payloads; optionally record a label-1 offset."""
    X = np.atleast_2d(np.asarray(payloads, dtype=np.int64)) % modulus
    labels = np.zeros(X.shape[0], dtype=np.int64) if labels is None else np.asarray(labels)
    zero = X[labels == 0]
    offset = None
    if use_label1 and (labels == 1).any():
        offset = X[labels == 1][0].copy()
    sp = _span(zero if zero.size else np.zeros((0, X.shape[1]), dtype=np.int64), modulus)
    complete = getattr(sp, "complete", True)
    return LearnedSpanModel(
        basis=sp.basis.astype(np.uint8 if modulus == 2 else np.int64), pivots=sp.pivots,
        modulus=modulus, samples_used=int(X.shape[0]), offset=offset,
        expected_rank=expected_rank, complete=complete,
    )


def rank_trajectory(payloads, modulus: int = 2) -> list[int]:
    """Rank of the first k rows for k = 1..len (should never decrease)."""
    X = np.atleast_2d(np.asarray(payloads, dtype=np.int64)) % modulus
    sp = _span(np.zeros((0, X.shape[1]), dtype=np.int64), modulus)
    out = []
    for row in X:
        if not sp.contains_many(row[None, :])[0]:
            sp = _span(np.vstack([sp.basis.astype(np.int64), row[None, :]]), modulus)
        out.append(sp.rank)
    return out


def generator_sample(model: LearnedSpanModel, rng, label: int = 0, count: int | None = None):
    """Uniform element of the learned span (shifted by the offset for label 1)."""
    if model.insufficient:
        raise Unsaturated(f"rank {model.rank} (expected {model.expected_rank})")
    k = 1 if count is None else int(count)
    q = model.modulus
    c = rng.integers(q, (k, model.rank))
    if q == 2:
        Y = gf2_matmul(c.astype(np.uint8), model.basis)
    else:
        Y = zq_matmul(c, model.basis, q)
    if label == 1:
        if model.offset is None:
            raise Unsaturated("no label-1 offset was learned")
        Y = (Y.astype(np.int64) + model.offset) % q
        Y = Y.astype(np.uint8) if q == 2 else Y
    return Y[0] if count is None else Y


def evaluator_pdf(model: LearnedSpanModel, y, label: int = 0) -> float:
    """Density of the generator: q^-rank on the (shifted) span, 0 elsewhere."""
    if model.insufficient:
        raise Unsaturated(f"rank {model.rank} (expected {model.expected_rank})")
    y = np.asarray(y, dtype=np.int64) % model.modulus
    if label == 1:
        if model.offset is None:
            raise Unsaturated("no label-1 offset was learned")
        y = (y - model.offset) % model.modulus
    inside = bool(model.contains_many(y[None, :])[0])
    return float(model.modulus) ** (-model.rank) if inside else 0.0


# --------------------------------------------------------------------------
# baselines


def _check_training(X, y):
    y = np.asarray(y)
    if (y == 0).sum() < 2 or (y == 1).sum() < 2:
        raise InsufficientData("need at least two samples of each label")
    return np.atleast_2d(np.asarray(X, dtype=np.int64)), y.astype(np.int64)


def _majority_bit(X, y, q):
    F = X if q == 2 else (X % q >= q // 2).astype(np.int64)
    agree = (F == y[:, None]).mean(axis=0)
    score = np.maximum(agree, 1.0 - agree)
    j = int(np.argmax(score))  # first maximum: lowest index wins ties
    flip = bool(agree[j] < 0.5)

    def predict(Z):
        Z = np.atleast_2d(Z)
        col = Z[:, j] if q == 2 else (Z[:, j] % q >= q // 2)
        return (col.astype(np.int64) ^ int(flip))

    return Classifier("majority-bit", predict)


def _lift(X, q):
    return X.astype(np.float64) if q == 2 else centered(X, q).astype(np.float64)


def _nearest_centroid(X, y, q):
    F = _lift(X, q)
    c0 = F[y == 0].mean(axis=0)
    c1 = F[y == 1].mean(axis=0)

    def predict(Z):
        G = _lift(np.atleast_2d(Z), q)
        d0 = ((G - c0) ** 2).sum(axis=1)
        d1 = ((G - c1) ** 2).sum(axis=1)
        return (d1 < d0).astype(np.int64)

    return Classifier("nearest-centroid", predict)


def _affine_hull(rows, q):
    base = rows[0]
    return base, _span((rows[1:] - base) % q, q)


def _hull_contains(hull, Z, q):
    base, sp = hull
    D = (Z - base) % q
    if sp.rank == 0:
        return ~D.any(axis=1)
    return sp.contains_many(D)


def _gf2_affine(X, y, q):
    # over the payload ring: GF(2) for binary payloads, Z_q otherwise
    h0 = _affine_hull(X[y == 0] % q, q)
    h1 = _affine_hull(X[y == 1] % q, q)
    fallback = int((y == 1).sum() > (y == 0).sum())

    def predict(Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=np.int64)) % q
        in0 = _hull_contains(h0, Z, q)
        in1 = _hull_contains(h1, Z, q)
        out = np.full(Z.shape[0], fallback, dtype=np.int64)
        out[in0 & ~in1] = 0
        out[in1 & ~in0] = 1
        return out

    return Classifier("gf2-affine", predict)


def train_baseline(kind: str, X, y, modulus: int = 2) -> Classifier:
    X, y = _check_training(X, y)
    if kind == "majority-bit":
        return _majority_bit(X, y, modulus)
    if kind == "nearest-centroid":
        return _nearest_centroid(X, y, modulus)
    if kind == "gf2-affine":
        return _gf2_affine(X, y, modulus)
    raise ValueError(f"unknown baseline {kind!r}; choose from {BASELINES}")


def baseline_battery(task: TaskFamily, adversary: Adversary | None, trials: int, rng, *,
                     train_size: int = 2000, kinds=BASELINES) -> list[ExperimentReport]:
    """Train each baseline on perturbed samples, then measure advantage on fresh ones."""
    labels, _, Xt = perturbed_batch(task, adversary, train_size, rng.child("train"))
    reports = []
    for kind in kinds:
        clf = train_baseline(kind, Xt, labels, task.modulus)
        reports.append(evaluate(clf, task, adversary, trials, rng.child("eval", kind), metric="advantage"))
    return reports
