"""LPN task families, the sparse trapdoor sampler and its robust classifier.

Two regimes, both with m = 8n:

* ``no-efficient``: D_0 = {s A}, D_1 = {s A + 1} for uniform A, perturbed by
  uniform weight-(2n-1) noise; no efficient robust classifier is expected.
* ``trapdoor``: D_0 uniform on ker H, D_1 = D_0 + 1, with H = [A; S A + E]
  for a row-weight-t matrix E that decodes any perturbation of weight at
  most eps, t * eps <= n / 3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra.gf2 import Gf2Span, gf2_matmul, gf2_nullspace, gf2_rank, gf2_rowspan_contains
from .algebra.kernels import weight_class_syndromes
from .algebra.serialize import dump_gf2, load
from .framework.task import Adversary, Classifier, TaskFamily

REGIMES = ("no-efficient", "trapdoor")
MAX_RESAMPLE = 1000


class ResampleExhausted(RuntimeError):
    pass


class SizeGuard(ValueError):
    """The instance is too large for exhaustive computation."""


@dataclass(frozen=True)
class LpnParams:
    n: int
    regime: str
    t: int
    eps: int

    @property
    def m(self) -> int:
        return 8 * self.n

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if self.n < 1 or not 0 <= self.t <= self.m:
            raise ValueError("need n >= 1 and 0 <= t <= m")
        if self.regime == "trapdoor":
            if self.t < 1 or self.t % 2 == 0:
                raise ValueError(f"trapdoor regime needs odd t >= 1, got t = {self.t}")
            if 3 * self.t * self.eps > self.n:
                raise ValueError(f"t * eps = {self.t * self.eps} exceeds n/3 = {self.n / 3:.2f}")

    @classmethod
    def no_efficient(cls, n: int) -> "LpnParams":
        return cls(n, "no-efficient", 2 * n - 1, 2 * n)

    @classmethod
    def trapdoor(cls, n: int, t: int | None = None, eps: int | None = None) -> "LpnParams":
        """Default t = 2 floor(sqrt(n)/6) - 1 and eps = floor(sqrt(n)); valid from n = 36."""
        if t is None:
            t = 2 * math.floor(math.sqrt(n) / 6) - 1
        if eps is None:
            eps = math.isqrt(n)
        return cls(n, "trapdoor", t, eps)

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "t": self.t, "eps": self.eps, "regime": self.regime}

    @classmethod
    def from_dict(cls, d: dict) -> "LpnParams":
        return cls(int(d["n"]), d["regime"], int(d["t"]), int(d["eps"]))


def lpn_sample(A, t: int, rng, count: int | None = None) -> np.ndarray:
    """s A + e with s uniform and e uniform of weight exactly t."""
    A = np.asarray(A, dtype=np.uint8)
    n, m = A.shape
    k = 1 if count is None else int(count)
    s = rng.child("secret").bits((k, n))
    e = rng.child("error").fixed_weight(m, t, k)
    out = gf2_matmul(s, A) ^ e
    return out[0] if count is None else out


# --------------------------------------------------------------------------
# trapdoor sampling


@dataclass(frozen=True)
class LpnTrapdoor:
    E: np.ndarray
    t: int
    max_col_weight: int
    resamples: int = 0

    def verify(self, H) -> list[str]:
        """Names of violated identities (empty when the trapdoor is sound)."""
        E = self.E
        problems = []
        rows = E.sum(axis=1)
        if (rows != self.t).any():
            problems.append(f"row-weight: rows {np.flatnonzero(rows != self.t).tolist()} differ from t = {self.t}")
        cols = E.sum(axis=0)
        if cols.max(initial=0) > self.t:
            problems.append(f"column-weight: max {int(cols.max())} > t = {self.t}")
        span = Gf2Span(H)
        bad = np.flatnonzero(~span.contains_many(E))
        if bad.size:
            problems.append(f"rowspan: rows {bad.tolist()} of E are not in rowspan(H)")
        if self.t % 2 == 1 and not (E.sum(axis=1) % 2 == 1).all():
            problems.append("E*1 != 1")
        return problems


def sample_sparse_rows(n: int, m: int, t: int, rng) -> np.ndarray:
    return rng.fixed_weight(m, t, n)


def lpn_trapsamp(n: int, t: int, rng, *, enforce_column_bound: bool = True,
                 max_resample: int = MAX_RESAMPLE) -> tuple[np.ndarray, LpnTrapdoor]:
    """H = [A; S A + E] with row weights of E exactly t and column weights at most t."""
    if t < 1 or t % 2 == 0:
        raise ValueError(f"t must be odd and positive, got {t}")
    m = 8 * n
    A = rng.child("A").bits((n, m))
    S = rng.child("S").bits((n, n))
    for attempt in range(max_resample):
        E = sample_sparse_rows(n, m, t, rng.child("E", attempt))
        colmax = int(E.sum(axis=0).max())
        if colmax <= t or not enforce_column_bound:
            break
    else:
        raise ResampleExhausted(f"column bound failed {max_resample} times")
    H = np.vstack([A, gf2_matmul(S, A) ^ E])
    return H, LpnTrapdoor(E, t, colmax, attempt)


def column_violation_bound(n: int, t: int) -> float:
    """The Chernoff-plus-union bound 8n exp(-7t/24) on Pr[some column weight > t]."""
    return 8 * n * math.exp(-7 * t / 24)


def column_violation_union(n: int, t: int) -> float:
    """Sharper union bound: column weights are Binomial(n, t/(8n)) exactly."""
    m = 8 * n
    p = t / m
    tail = sum(math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(t + 1, n + 1))
    return min(1.0, m * tail)


def column_violation_rate(n: int, t: int, samples: int, rng) -> float:
    """Fraction of raw (unenforced) E draws with some column heavier than t."""
    hits = 0
    for i in range(samples):
        E = sample_sparse_rows(n, 8 * n, t, rng.child("draw", i))
        hits += int(E.sum(axis=0).max() > t)
    return hits / samples


# --------------------------------------------------------------------------
# task families


class LpnUniformTask(TaskFamily):
    family = "lpn-uniform"

    def __init__(self, params: LpnParams, A: np.ndarray):
        self.lpn = params
        self.A = np.asarray(A, dtype=np.uint8)

    @property
    def payload_len(self) -> int:
        return self.lpn.m

    @property
    def budget(self) -> int:
        return self.lpn.eps

    def params(self) -> dict:
        return self.lpn.as_dict()

    def sample_many(self, labels, rng):
        labels = np.asarray(labels, dtype=np.uint8)
        s = rng.bits((labels.size, self.lpn.n))
        return gf2_matmul(s, self.A) ^ labels[:, None]

    def support_basis(self) -> np.ndarray:
        return self.A

    def well_formed(self) -> bool:
        return not gf2_rowspan_contains(self.A, np.ones(self.lpn.m, dtype=np.uint8))

    def public_dict(self) -> dict:
        return {"params": self.params(), "A": dump_gf2(self.A)}

    def secret_dict(self) -> dict:
        return {}

    @classmethod
    def from_dicts(cls, pub: dict, sec: dict | None = None) -> "LpnUniformTask":
        A, _ = load(pub["A"])
        return cls(LpnParams.from_dict(pub["params"]), A)


class LpnDualTask(TaskFamily):
    family = "lpn-trapdoor"

    def __init__(self, params: LpnParams, H: np.ndarray, trapdoor: LpnTrapdoor | None = None):
        self.lpn = params
        self.H = np.asarray(H, dtype=np.uint8)
        self.secret = trapdoor
        self.kernel = gf2_nullspace(self.H)

    @property
    def payload_len(self) -> int:
        return self.lpn.m

    @property
    def budget(self) -> int:
        return self.lpn.eps

    def params(self) -> dict:
        return self.lpn.as_dict()

    def sample_many(self, labels, rng):
        labels = np.asarray(labels, dtype=np.uint8)
        c = rng.bits((labels.size, self.kernel.shape[0]))
        return gf2_matmul(c, self.kernel) ^ labels[:, None]

    def support_basis(self) -> np.ndarray:
        return self.kernel

    def well_formed(self) -> bool:
        return bool(gf2_matmul(self.H, np.ones((self.lpn.m, 1), dtype=np.uint8)).any())

    def public_dict(self) -> dict:
        return {"params": self.params(), "H": dump_gf2(self.H)}

    def secret_dict(self) -> dict:
        tr = self.require_secret()
        return {"E": dump_gf2(tr.E), "t": tr.t, "max_col_weight": tr.max_col_weight,
                "resamples": tr.resamples}

    @classmethod
    def from_dicts(cls, pub: dict, sec: dict | None = None) -> "LpnDualTask":
        H, _ = load(pub["H"])
        tr = None
        if sec:
            E, _ = load(sec["E"])
            tr = LpnTrapdoor(E, int(sec["t"]), int(sec["max_col_weight"]), int(sec.get("resamples", 0)))
        return cls(LpnParams.from_dict(pub["params"]), H, tr)


def make_task(params: LpnParams, rng, *, max_resample: int = 100):
    """Build a well-formed task: the all-ones shift lies outside the class-0 support."""
    for attempt in range(max_resample):
        r = rng.child("attempt", attempt)
        if params.regime == "no-efficient":
            task = LpnUniformTask(params, r.child("A").bits((params.n, params.m)))
        else:
            H, tr = lpn_trapsamp(params.n, params.t, r.child("trapsamp"))
            task = LpnDualTask(params, H, tr)
        if task.well_formed():
            return task
    raise ResampleExhausted("could not place the shift outside the class-0 support")


# --------------------------------------------------------------------------
# classifiers and adversaries


def robust_classify_E(E, Y) -> np.ndarray:
    """0 iff wt(E y) <= floor(n/2), where n is the number of rows of E.

    A perturbation of weight at most eps moves E y by at most t * eps <= n/3,
    while E 1 = 1 for odd t, so the two classes stay on opposite sides.
    """
    E = np.asarray(E, dtype=np.uint8)
    Y = np.atleast_2d(np.asarray(Y, dtype=np.uint8))
    if Y.shape[1] != E.shape[1]:
        raise ValueError(f"payload length {Y.shape[1]} does not match {E.shape[1]}")
    z = gf2_matmul(Y, E.T)
    return (z.sum(axis=1) > E.shape[0] // 2).astype(np.int64)


def trapdoor_classifier(task: LpnDualTask) -> Classifier:
    E = task.require_secret().E
    return Classifier("robust-E", lambda Y: robust_classify_E(E, Y))


class FixedWeightAdversary(Adversary):
    """Add a uniformly random error of Hamming weight exactly ``budget``."""

    name = "fixed-weight"

    def __init__(self, budget: int, family_eps: int | None = None):
        if family_eps is not None and budget > family_eps:
            raise ValueError(f"budget {budget} exceeds the family radius {family_eps}")
        self.budget = int(budget)

    def perturb_many(self, X, labels, rng):
        return X ^ rng.fixed_weight(X.shape[1], self.budget, X.shape[0])


def hardness_adversary(params: LpnParams) -> FixedWeightAdversary:
    """The regime's noise adversary: weight 2n - 1 (no-efficient) or t (trapdoor)."""
    return FixedWeightAdversary(params.t, params.eps)


def heavy_column_patterns(E, eps: int, count: int, rng) -> np.ndarray:
    """Weight-eps patterns that greedily maximise wt(E e) (columns with disjoint supports first)."""
    E = np.asarray(E, dtype=np.uint8)
    n, m = E.shape
    out = np.zeros((count, m), dtype=np.uint8)
    colw = E.sum(axis=0)
    for i in range(count):
        # random tie-breaking between equally good columns
        order = np.argsort(-colw * (m + 1) - rng.integers(m, (m,)), kind="stable")
        z = np.zeros(n, dtype=np.uint8)
        chosen = []
        for _ in range(eps):
            cand = order[~np.isin(order, chosen)]
            gain = (z[:, None] ^ E[:, cand]).sum(axis=0)
            j = int(cand[int(np.argmax(gain))])
            chosen.append(j)
            z ^= E[:, j]
        out[i, chosen] = 1
    return out


class ColumnConcentratedAdversary(Adversary):
    """Worst case for the sparse trapdoor: flip eps heavy, non-overlapping columns of E."""

    name = "column-concentrated"

    def __init__(self, E, eps: int, rng, pool: int = 64):
        self.budget = int(eps)
        self.patterns = heavy_column_patterns(E, eps, pool, rng.child("pool"))
        E = np.asarray(E, dtype=np.uint8)
        self.achieved = int(gf2_matmul(self.patterns, E.T).sum(axis=1).min())

    def perturb_many(self, X, labels, rng):
        pick = rng.integers(self.patterns.shape[0], (X.shape[0],))
        return X ^ self.patterns[pick]


# --------------------------------------------------------------------------
# exhaustive oracles for tiny instances

MAX_ENUM = 1 << 16


def _syndrome_ints(P: np.ndarray) -> np.ndarray:
    """Column syndromes of a check matrix as integers (bit i = row i)."""
    P = np.asarray(P, dtype=np.uint64)
    if P.shape[0] > 63:
        raise SizeGuard("syndrome space exceeds 63 bits")
    return (P << np.arange(P.shape[0], dtype=np.uint64)[:, None]).sum(axis=0).astype(np.uint64)


def weight_syndrome_counts(P, t: int) -> np.ndarray:
    """counts[w, s] = number of weight-w vectors with syndrome s under check matrix P."""
    P = np.asarray(P, dtype=np.uint8)
    k, m = P.shape
    if 1 << k > 1 << 22:
        raise SizeGuard(f"syndrome space 2^{k} too large for the table")
    cols = _syndrome_ints(P).astype(np.int64)
    counts = np.zeros((t + 1, 1 << k), dtype=np.int64)
    counts[0, 0] = 1
    idx = np.arange(1 << k)
    for c in cols:
        for w in range(t, 0, -1):
            counts[w] += counts[w - 1][idx ^ c]
    return counts


def _class_geometry(task):
    """(support basis, check matrix, shift syndrome) for either family."""
    if isinstance(task, LpnDualTask):
        P = task.H
    else:
        P = gf2_nullspace(task.A)
    ones = np.ones((task.lpn.m, 1), dtype=np.uint8)
    s1 = int(_syndrome_ints(gf2_matmul(P, ones))[0]) if P.shape[0] else 0
    return P, s1


def exact_tv(task, t: int) -> float:
    """Exact total variation between P(D_0) and P(D_1) under weight-t noise.

    Both perturbed classes are uniform on cosets of the support mixed with
    weight-t noise, so TV = 1/2 sum_s |W_t(s) - W_t(s + s1)| / C(m, t),
    with W_t(s) the number of weight-t vectors of syndrome s.
    """
    P, s1 = _class_geometry(task)
    k, m = P.shape
    total = math.comb(m, t)
    if k <= 22:
        W = weight_syndrome_counts(P, t)[t]
        diff = np.abs(W - W[np.arange(W.size) ^ s1]).sum()
        return float(diff) / (2 * total)
    if total > 5 * 10**7:
        raise SizeGuard(f"C({m}, {t}) weight-t vectors is too many to enumerate")
    syn = weight_class_syndromes(_syndrome_ints(P), t)
    vals, cnt = np.unique(syn, return_counts=True)
    shifted = vals ^ np.uint64(s1)
    pos = np.searchsorted(vals, shifted)
    pos_c = np.minimum(pos, vals.size - 1)
    partner = np.where(vals[pos_c] == shifted, cnt[pos_c], 0)
    # syndromes s with W(s) > 0 contribute |W(s) - W(s+s1)|; those with W(s) = 0
    # but W(s+s1) > 0 mirror the cases where partner == 0
    diff = np.abs(cnt - partner).sum() + cnt[partner == 0].sum()
    return float(diff) / (2 * total)


def coset_leader_weights(P) -> np.ndarray:
    """Minimum weight of a vector with each syndrome (BFS over column syndromes)."""
    P = np.asarray(P, dtype=np.uint8)
    k = P.shape[0]
    if 1 << k > 1 << 22:
        raise SizeGuard(f"syndrome space 2^{k} too large")
    cols = np.unique(_syndrome_ints(P).astype(np.int64))
    dist = np.full(1 << k, -1, dtype=np.int64)
    dist[0] = 0
    frontier = np.array([0])
    d = 0
    while frontier.size:
        d += 1
        nxt = np.unique((frontier[:, None] ^ cols[None, :]).ravel())
        nxt = nxt[dist[nxt] < 0]
        dist[nxt] = d
        frontier = nxt
    return dist


class BruteForceOracle:
    """Exact classifier for tiny instances, by enumeration.

    ``mode="ml"`` picks the label with the larger likelihood under weight-``t``
    noise (ties go to 0); ``mode="nearest"`` picks the class support at smaller
    Hamming distance. Requires the class-0 support or the syndrome space to
    have at most 2^16 elements.
    """

    def __init__(self, task, t: int, mode: str = "ml"):
        if mode not in ("ml", "nearest"):
            raise ValueError("mode must be 'ml' or 'nearest'")
        self.task, self.t, self.mode = task, int(t), mode
        self.m = task.lpn.m
        basis = task.support_basis()
        rank = gf2_rank(basis)
        P, self.s1 = _class_geometry(task)
        self.P = P
        self.via_syndrome = P.shape[0] <= 16
        if self.via_syndrome:
            self.P_int = _syndrome_ints(P)
            if mode == "ml":
                self.W = weight_syndrome_counts(P, self.t)[self.t]
            else:
                self.lead = coset_leader_weights(P)
        elif rank <= 16:
            B = Gf2Span(basis).basis
            coeffs = ((np.arange(1 << rank)[:, None] >> np.arange(rank)) & 1).astype(np.uint8)
            self.codewords = gf2_matmul(coeffs, B)
        else:
            raise SizeGuard(f"support 2^{rank} and syndrome space 2^{P.shape[0]} both exceed 2^16")

    def _syndromes(self, Y):
        S = gf2_matmul(Y, self.P.T).astype(np.uint64)
        return (S << np.arange(S.shape[1], dtype=np.uint64)).sum(axis=1).astype(np.int64)

    def scores(self, Y) -> tuple[np.ndarray, np.ndarray]:
        """Per-label scores (likelihood counts, or negated distances)."""
        Y = np.atleast_2d(np.asarray(Y, dtype=np.uint8))
        if self.via_syndrome:
            s = self._syndromes(Y)
            table = self.W if self.mode == "ml" else -self.lead
            return table[s], table[s ^ self.s1]
        D0 = np.empty((Y.shape[0], self.codewords.shape[0]), dtype=np.int64)
        for i, y in enumerate(Y):
            D0[i] = (self.codewords ^ y).sum(axis=1)
        D1 = self.m - D0  # distance to c + 1 is m - distance to c
        if self.mode == "ml":
            return (D0 == self.t).sum(axis=1), (D1 == self.t).sum(axis=1)
        return -D0.min(axis=1), -D1.min(axis=1)

    def predict(self, Y) -> np.ndarray:
        a, b = self.scores(Y)
        return (b > a).astype(np.int64)

    def classifier(self) -> Classifier:
        return Classifier(f"brute-force-{self.mode}", self.predict)


def brute_force_classifier(task, y, t: int, mode: str = "ml") -> int:
    return int(BruteForceOracle(task, t, mode).predict(np.asarray(y)[None, :])[0])
