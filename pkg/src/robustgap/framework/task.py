"""Task families, perturbation adversaries and classifiers."""
from __future__ import annotations

import copy
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..algebra.zq import centered

ABSTAIN = -1


class SecretUnavailable(PermissionError):
    """The operation needs the family's secret, which this view does not hold."""


class BudgetViolation(AssertionError):
    pass


@dataclass(frozen=True)
class TaskInstance:
    label: int
    payload: np.ndarray

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


def distance(X, Xt, norm: str, modulus: int = 2) -> np.ndarray:
    """Row-wise distance: Hamming count or centered l-infinity mod q."""
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    Xt = np.atleast_2d(np.asarray(Xt, dtype=np.int64))
    if X.shape != Xt.shape:
        raise ValueError(f"shape mismatch {X.shape} vs {Xt.shape}")
    if norm == "hamming":
        return (X != Xt).sum(axis=1)
    if norm == "linf":
        if X.shape[1] == 0:
            return np.zeros(X.shape[0], dtype=np.int64)
        return np.abs(centered(Xt - X, modulus)).max(axis=1)
    raise ValueError(f"unknown norm {norm!r}")


class TaskFamily(ABC):
    """A pair of distributions (D_0, D_1) over payload vectors.

    Subclasses hold a public part and, optionally, a secret part; ``public()``
    returns a copy without the secret for learner-facing code.
    """

    family: str = "abstract"
    norm: str = "hamming"
    secret = None

    @property
    @abstractmethod
    def payload_len(self) -> int: ...

    @property
    def modulus(self) -> int:
        return 2

    @property
    def budget(self) -> int:
        """Declared robustness radius in the family norm."""
        return 0

    @abstractmethod
    def params(self) -> dict: ...

    @abstractmethod
    def sample_many(self, labels: np.ndarray, rng) -> np.ndarray:
        """One payload row per label."""

    def sample(self, b: int, rng) -> TaskInstance:
        return TaskInstance(int(b), self.sample_many(np.array([b], dtype=np.uint8), rng)[0])

    sample_labeled = sample

    def has_secret(self) -> bool:
        return self.secret is not None

    def require_secret(self):
        if self.secret is None:
            raise SecretUnavailable(f"{self.family}: secret part not held by this view")
        return self.secret

    def public(self) -> "TaskFamily":
        view = copy.copy(self)
        view.secret = None
        return view


class Adversary(ABC):
    """Maps samples to perturbed samples within ``budget`` in the family norm."""

    name: str = "adversary"
    budget: int = 0

    @abstractmethod
    def perturb_many(self, X: np.ndarray, labels: np.ndarray, rng) -> np.ndarray: ...

    def perturb(self, x, rng, label: int = 0) -> np.ndarray:
        return self.perturb_many(np.asarray(x)[None, :], np.array([label]), rng)[0]

    def describe(self) -> str:
        return f"{self.name}[{self.budget}]"


class Identity(Adversary):
    name = "none"

    def perturb_many(self, X, labels, rng):
        return X


class RandomFlips(Adversary):
    """Flip exactly ``budget`` uniformly chosen positions."""

    name = "random-flips"

    def __init__(self, budget: int):
        self.budget = int(budget)

    def perturb_many(self, X, labels, rng):
        E = rng.fixed_weight(X.shape[1], self.budget, X.shape[0])
        return X ^ E


class Classifier:
    """A named batch predictor returning labels in {0, 1} or ``ABSTAIN``."""

    def __init__(self, name: str, fn: Callable[[np.ndarray], np.ndarray]):
        self.name = name
        self._fn = fn

    def predict(self, X) -> np.ndarray:
        return np.asarray(self._fn(np.atleast_2d(X)), dtype=np.int64)

    def __call__(self, x) -> int:
        return int(self.predict(np.asarray(x)[None, :])[0])

    def __repr__(self):
        return f"Classifier({self.name})"


def constant_classifier(bit: int) -> Classifier:
    return Classifier(f"constant-{bit}", lambda X: np.full(X.shape[0], bit))


def coin_classifier(rng) -> Classifier:
    """Independent fair coins, drawn from a private stream."""
    stream = rng.child("coin-classifier")
    return Classifier("coin", lambda X: stream.bits(X.shape[0]).astype(np.int64))


def first_bit_classifier() -> Classifier:
    return Classifier("first-bit", lambda X: X[:, 0].astype(np.int64))
