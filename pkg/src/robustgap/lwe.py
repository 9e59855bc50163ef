"""LWE task families, gadget trapdoors and the small-kernel robust classifier.

A trapdoor matrix has the form A = [Abar | G - Abar R] with G = I_n (x) g,
g = (1, 2, ..., 2^(k-1)) and q = 2^k, so A [R; I] = G. Multiplying by the
integer kernel basis S_k of g gives T = [R; I] (I_n (x) S_k) with A T = 0 mod q
and entries bounded by 3 when R has entries in {-1, 0, 1}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra.samplers import TruncGaussParams, trunc_gauss_sample
from .algebra.serialize import dump_zq, load
from .algebra.zq import NonUnitPivot, Unsolvable, centered, zq_matmul, zq_solve
from .framework.task import Adversary, Classifier, TaskFamily

REGIMES = ("no-efficient", "trapdoor")
MAX_BETA = 3


class ResampleExhausted(RuntimeError):
    pass


def default_modulus(n: int) -> int:
    """Power of two q = 2^ceil(3 log2 n), the nearest exact gadget modulus to n^3."""
    return 1 << max(2, math.ceil(3 * math.log2(n)))


def regime_chi(n: int, q: int, regime: str) -> TruncGaussParams:
    if regime == "no-efficient":
        return TruncGaussParams(q / 100, q // 10, q)
    if regime == "trapdoor":
        return TruncGaussParams(q / n**2, q // (2 * n), q)
    raise ValueError(f"regime must be one of {REGIMES}")


@dataclass(frozen=True)
class LweParams:
    n: int
    q: int
    m: int
    chi: TruncGaussParams
    regime: str

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if self.q < 4 or self.q & (self.q - 1):
            raise ValueError(f"q must be a power of two >= 4, got {self.q}")
        if self.chi.modulus != self.q:
            raise ValueError("chi modulus differs from q")
        if self.regime == "trapdoor" and self.m <= self.n * self.log_q:
            raise ValueError(f"trapdoor regime needs m > n log2 q = {self.n * self.log_q}")

    @property
    def log_q(self) -> int:
        return self.q.bit_length() - 1

    @property
    def shift(self) -> int:
        return self.q // 2

    @classmethod
    def make(cls, n: int, regime: str = "trapdoor", q: int | None = None,
             m: int | None = None) -> "LweParams":
        q = default_modulus(n) if q is None else int(q)
        m = n * (q.bit_length() - 1) + 2 * n if m is None else int(m)
        return cls(n, q, m, regime_chi(n, q, regime), regime)

    def as_dict(self) -> dict:
        return {"n": self.n, "q": self.q, "m": self.m, "regime": self.regime,
                "chi_sigma": round(float(self.chi.sigma), 9), "chi_bound": self.chi.bound,
                "q_note": "power of two nearest n^3"}

    @classmethod
    def from_dict(cls, d: dict) -> "LweParams":
        q = int(d["q"])
        chi = TruncGaussParams(float(d["chi_sigma"]), int(d["chi_bound"]), q)
        return cls(int(d["n"]), q, int(d["m"]), chi, d["regime"])


def lwe_sample(A, chi: TruncGaussParams, rng, count: int | None = None, *,
               return_secret: bool = False):
    """s A + e mod q with s uniform over Z_q^n and e i.i.d. from chi."""
    A = np.asarray(A, dtype=np.int64)
    n, m = A.shape
    q = chi.modulus
    k = 1 if count is None else int(count)
    s = rng.child("secret").integers(q, (k, n))
    e = trunc_gauss_sample(chi, rng.child("error"), (k, m))
    Y = (zq_matmul(s, A, q) + e) % q
    if count is None:
        Y, s = Y[0], s[0]
    return (Y, s) if return_secret else Y


def exhaustive_secrets(A, y, q: int) -> np.ndarray:
    """Every s in Z_q^n with s A = y (mod q), by enumeration (q^n <= 2^20)."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if q**n > 1 << 20:
        raise ValueError("search space too large")
    grids = np.indices((q,) * n).reshape(n, -1).T
    hits = ~(zq_matmul(grids, A, q) - np.asarray(y) % q).any(axis=1)
    return grids[hits]


# --------------------------------------------------------------------------
# trapdoor


def gadget_kernel(k: int) -> np.ndarray:
    """Integer basis S_k of {x : g x = 0 mod 2^k}: 2 on the diagonal, -1 below."""
    S = 2 * np.eye(k, dtype=np.int64)
    S[np.arange(1, k), np.arange(k - 1)] = -1
    return S


def gadget_matrix(n: int, k: int) -> np.ndarray:
    return np.kron(np.eye(n, dtype=np.int64), (1 << np.arange(k, dtype=np.int64))[None, :])


def odd_columns(T) -> np.ndarray:
    return np.flatnonzero(np.asarray(T, dtype=np.int64).sum(axis=0) % 2)


@dataclass(frozen=True)
class LweTrapdoor:
    T: np.ndarray           # centered integers, m x w
    odd_cols: np.ndarray
    beta: int
    resamples: int = 0


@dataclass
class TrapdoorCertificate:
    passed: bool
    beta: int
    odd_cols: int
    problems: list[str] = field(default_factory=list)


def verify_trapdoor(A, trap: LweTrapdoor, q: int) -> TrapdoorCertificate:
    A = np.asarray(A, dtype=np.int64)
    T = np.asarray(trap.T, dtype=np.int64)
    problems = []
    if A.shape[1] != T.shape[0]:
        return TrapdoorCertificate(False, 0, 0, [f"shape: A is {A.shape}, T is {T.shape}"])
    AT = zq_matmul(A, T, q)
    bad = np.argwhere(AT != 0)
    if bad.size:
        problems.append(f"A*T != 0 mod q at {bad[:8].tolist()}" + (" ..." if len(bad) > 8 else ""))
    beta = int(np.abs(T).max(initial=0))
    if beta > trap.beta or beta > MAX_BETA:
        where = np.argwhere(np.abs(T) > min(trap.beta, MAX_BETA))
        problems.append(f"entry bound: |T| reaches {beta} at {where[:8].tolist()}")
    J = odd_columns(T)
    if J.size == 0:
        problems.append("odd columns: none")
    if not np.array_equal(J, np.asarray(trap.odd_cols)):
        problems.append("odd columns: stored set differs from recomputed set")
    return TrapdoorCertificate(not problems, beta, int(J.size), problems)


def lwe_trapdoor_sample(params: LweParams, rng, max_resample: int = 100):
    """(A, trapdoor) with A T = 0 mod q, |T| <= 3 and at least one odd-sum column."""
    n, q, m, k = params.n, params.q, params.m, params.log_q
    wide = n * k
    G = gadget_matrix(n, k)
    S = np.kron(np.eye(n, dtype=np.int64), gadget_kernel(k))
    for attempt in range(max_resample):
        r = rng.child("attempt", attempt)
        Abar = r.child("Abar").integers(q, (n, m - wide))
        R = r.child("R").integers(3, (m - wide, wide)) - 1
        A = np.concatenate([Abar, (G - zq_matmul(Abar, R, q)) % q], axis=1)
        T = np.vstack([R @ S, S])
        J = odd_columns(T)
        if J.size:
            return A, LweTrapdoor(T, J, int(np.abs(T).max()), attempt)
    raise ResampleExhausted("no odd-sum trapdoor column")


def robust_radius(params: LweParams, beta: int) -> int:
    """Largest l-infinity perturbation the classifier provably tolerates."""
    return (params.q // 4 - 1) // (beta * params.m)


def robust_classify_T(trap: LweTrapdoor, Y, q: int) -> np.ndarray:
    """0 iff every odd-column coordinate of y T is within q/4 of zero (centered)."""
    T = np.asarray(trap.T, dtype=np.int64)[:, trap.odd_cols]
    Y = np.atleast_2d(np.asarray(Y, dtype=np.int64))
    if Y.shape[1] != T.shape[0]:
        raise ValueError(f"payload length {Y.shape[1]} does not match {T.shape[0]}")
    z = centered(zq_matmul(Y % q, T % q, q), q)
    return (np.abs(z) >= q // 4).any(axis=1).astype(np.int64)


# --------------------------------------------------------------------------
# tasks


class LweTask(TaskFamily):
    norm = "linf"

    def __init__(self, params: LweParams, A, trapdoor: LweTrapdoor | None = None):
        self.lwe = params
        self.A = np.asarray(A, dtype=np.int64)
        self.secret = trapdoor
        self.family = f"lwe-{'trapdoor' if params.regime == 'trapdoor' else 'uniform'}"

    @property
    def payload_len(self) -> int:
        return self.lwe.m

    @property
    def modulus(self) -> int:
        return self.lwe.q

    @property
    def budget(self) -> int:
        return self.lwe.chi.bound

    def params(self) -> dict:
        return self.lwe.as_dict()

    def sample_many(self, labels, rng):
        labels = np.asarray(labels, dtype=np.int64)
        s = rng.integers(self.lwe.q, (labels.size, self.lwe.n))
        return (zq_matmul(s, self.A, self.lwe.q) + self.lwe.shift * labels[:, None]) % self.lwe.q

    def support_basis(self) -> np.ndarray:
        return self.A

    def well_formed(self) -> bool:
        """The shift vector (q/2) 1 is certified outside {s A}."""
        target = np.full(self.lwe.m, self.lwe.shift, dtype=np.int64)
        try:
            zq_solve(self.A.T, target, self.lwe.q)
        except Unsolvable:
            return True
        except NonUnitPivot:
            return False
        return False

    def robust_radius(self) -> int:
        return robust_radius(self.lwe, self.require_secret().beta)

    def public_dict(self) -> dict:
        return {"params": self.params(), "A": dump_zq(self.A, self.lwe.q)}

    def secret_dict(self) -> dict:
        tr = self.require_secret()
        return {"T": dump_zq(tr.T % self.lwe.q, self.lwe.q), "odd_cols": tr.odd_cols.tolist(),
                "beta": tr.beta, "resamples": tr.resamples}

    @classmethod
    def from_dicts(cls, pub: dict, sec: dict | None = None) -> "LweTask":
        params = LweParams.from_dict(pub["params"])
        A, _ = load(pub["A"])
        tr = None
        if sec:
            T, _ = load(sec["T"])
            tr = LweTrapdoor(centered(T, params.q), np.asarray(sec["odd_cols"], dtype=np.int64),
                             int(sec["beta"]), int(sec.get("resamples", 0)))
        return cls(params, A, tr)


def make_task(params: LweParams, rng, max_resample: int = 100) -> LweTask:
    for attempt in range(max_resample):
        r = rng.child("attempt", attempt)
        if params.regime == "trapdoor":
            A, tr = lwe_trapdoor_sample(params, r.child("trapdoor"))
            task = LweTask(params, A, tr)
        else:
            task = LweTask(params, r.child("A").integers(params.q, (params.n, params.m)))
        if task.well_formed():
            return task
    raise ResampleExhausted("could not certify the shift outside the row space")


def trapdoor_classifier(task: LweTask) -> Classifier:
    tr = task.require_secret()
    q = task.lwe.q
    return Classifier("robust-T", lambda Y: robust_classify_T(tr, Y, q))


# --------------------------------------------------------------------------
# adversaries


class ChiAdversary(Adversary):
    """x + e with e drawn coordinate-wise from chi."""

    name = "chi"

    def __init__(self, chi: TruncGaussParams):
        self.chi = chi
        self.budget = int(chi.bound)

    def perturb_many(self, X, labels, rng):
        e = trunc_gauss_sample(self.chi, rng, X.shape)
        return (X + e) % self.chi.modulus


class SignAlignedAdversary(Adversary):
    """Worst case for one trapdoor column: e = +/- eps sign(T_j).

    Half of the trials target the column of largest l1 norm, the rest a
    uniform odd column; coordinates where T_j is zero get random signs.
    """

    name = "sign-aligned"

    def __init__(self, trap: LweTrapdoor, eps: int, q: int):
        self.budget = int(eps)
        self.q = q
        cols = np.asarray(trap.T, dtype=np.int64)[:, trap.odd_cols]
        self.signs = np.sign(cols).T                       # |J| x m
        self.heaviest = int(np.argmax(np.abs(cols).sum(axis=0)))

    def perturb_many(self, X, labels, rng):
        k, m = X.shape
        J = self.signs.shape[0]
        pick = rng.child("column").integers(J, (k,))
        pick = np.where(rng.child("heavy").bits(k) == 1, self.heaviest, pick)
        flip = 2 * rng.child("flip").bits(k).astype(np.int64) - 1
        filler = 2 * rng.child("filler").bits((k, m)).astype(np.int64) - 1
        s = self.signs[pick]
        s = np.where(s == 0, filler, s) * flip[:, None]
        return (X + self.budget * s) % self.q


def hardness_adversary(params: LweParams) -> ChiAdversary:
    return ChiAdversary(params.chi)
