"""Linear algebra over Z_q for prime or power-of-two moduli.

Elimination only pivots on units, which is exact for prime q and for
q = 2^k whenever the relevant columns contain an odd entry.
"""
from __future__ import annotations

from math import gcd

import numpy as np


class Unsolvable(ValueError):
    pass


class NonUnitPivot(ValueError):
    """Elimination left rows with no unit entry (only possible for composite q)."""


def centered(x, q: int) -> np.ndarray:
    """Lift residues to ``[-floor(q/2), ceil(q/2))``."""
    x = np.asarray(x, dtype=np.int64) % q
    return np.where(x >= (q + 1) // 2, x - q, x)


def zq_matmul(X, Y, q: int) -> np.ndarray:
    """``X @ Y mod q``; uses float64 BLAS when every partial sum is exact."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    inner = X.shape[-1]
    bound = int(np.abs(X).max(initial=0)) * int(np.abs(Y).max(initial=0)) * max(inner, 1)
    if bound < 1 << 53:
        out = np.rint(X.astype(np.float64) @ Y.astype(np.float64)).astype(np.int64)
    elif bound < 1 << 62:
        out = X @ Y
    else:
        out = (X.astype(object) @ Y.astype(object)) % q
        return out.astype(np.int64)
    return out % q


def _is_unit(v: int, q: int) -> bool:
    return gcd(int(v), q) == 1


def _rref_unit(M: np.ndarray, q: int, ncols: int):
    """In-place unit-pivot RREF over the first ``ncols`` columns of ``M``."""
    M %= q
    rows = M.shape[0]
    pivots = []
    rank = 0
    for col in range(ncols):
        if rank == rows:
            break
        cand = [i for i in range(rank, rows) if _is_unit(M[i, col], q)]
        if not cand:
            continue
        p = cand[0]
        if p != rank:
            M[[rank, p]] = M[[p, rank]]
        inv = pow(int(M[rank, col]), -1, q)
        M[rank] = (M[rank] * inv) % q
        f = M[:, col].copy()
        f[rank] = 0
        nz = np.flatnonzero(f)
        if nz.size:
            M[nz] = (M[nz] - f[nz, None] * M[rank]) % q
        pivots.append(col)
        rank += 1
    return rank, np.asarray(pivots, dtype=np.int64)


def _check_fits(q: int):
    # row updates multiply two residues: keep them inside int64
    if q >= 1 << 31:
        raise ValueError("modulus too large for int64 elimination")


def zq_rref(A, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced basis of the row span of ``A`` (unit pivots normalised to 1)."""
    _check_fits(q)
    M = np.array(A, dtype=np.int64, ndmin=2) % q
    rank, piv = _rref_unit(M, q, M.shape[1])
    if M[rank:].any():
        raise NonUnitPivot("rows without a unit entry remain after elimination")
    return M[:rank].copy(), piv


def zq_solve(A, b, q: int) -> np.ndarray:
    """Return ``x`` with ``A @ x = b (mod q)``; free variables are set to zero."""
    _check_fits(q)
    A = np.array(A, dtype=np.int64, ndmin=2) % q
    b = np.asarray(b, dtype=np.int64).ravel() % q
    if A.shape[0] != b.size:
        raise ValueError(f"{A.shape[0]} equations against a right-hand side of length {b.size}")
    cols = A.shape[1]
    M = np.concatenate([A, b[:, None]], axis=1)
    rank, piv = _rref_unit(M, q, cols)
    rest = M[rank:]
    if rest[:, :cols].any():
        raise NonUnitPivot("coefficient rows without a unit entry remain")
    if rest[:, cols].any():
        raise Unsolvable("system has no solution mod q")
    x = np.zeros(cols, dtype=np.int64)
    x[piv] = M[:rank, cols]
    return x


class ZqSpan:
    """Row span over Z_q with reduction-based membership."""

    def __init__(self, A, q: int):
        self.q = int(q)
        A = np.array(A, dtype=np.int64, ndmin=2)
        self.cols = A.shape[1]
        if A.shape[0] and (A % q).any():
            self.basis, self.pivots = zq_rref(A, q)
        else:
            self.basis = np.zeros((0, self.cols), dtype=np.int64)
            self.pivots = np.zeros(0, dtype=np.int64)

    @property
    def rank(self) -> int:
        return int(self.basis.shape[0])

    def reduce_many(self, V) -> np.ndarray:
        V = np.array(V, dtype=np.int64, ndmin=2) % self.q
        if V.shape[1] != self.cols:
            raise ValueError(f"vectors of length {V.shape[1]} against {self.cols} columns")
        for i, p in enumerate(self.pivots):
            V = (V - V[:, p, None] * self.basis[i]) % self.q
        return V

    def contains_many(self, V) -> np.ndarray:
        return ~self.reduce_many(V).any(axis=1)

    def contains(self, v) -> bool:
        return bool(self.contains_many(v)[0])

    def __eq__(self, other):
        if not isinstance(other, ZqSpan):
            return NotImplemented
        return (
            self.q == other.q
            and self.rank == other.rank
            and bool(other.contains_many(self.basis).all() if self.rank else True)
        )

    __hash__ = None
