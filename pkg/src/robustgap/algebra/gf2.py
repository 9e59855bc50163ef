"""Dense linear algebra over GF(2).

Public functions take and return ``uint8`` arrays of 0/1 entries; rows are
packed into little-endian 64-bit words internally for elimination.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import rref_packed


class InconsistentSystem(ValueError):
    """Raised when the target vector is not in the row span."""


class DimensionMismatch(ValueError):
    pass


def as_bits(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype != np.uint8:
        arr = arr.astype(np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("GF(2) entries must be 0 or 1")
    return arr


def pack_rows(A: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix into ``(rows, ceil(cols/64))`` uint64 words, bit j of word k = column 64k+j."""
    A = np.atleast_2d(np.asarray(A, dtype=np.uint8))
    rows, cols = A.shape
    words = max(1, (cols + 63) // 64)
    by = np.packbits(A, axis=1, bitorder="little")
    buf = np.zeros((rows, words * 8), dtype=np.uint8)
    buf[:, : by.shape[1]] = by
    return buf.view("<u8").astype(np.uint64).reshape(rows, words)


def unpack_rows(W: np.ndarray, cols: int) -> np.ndarray:
    W = np.ascontiguousarray(W, dtype="<u8")
    if W.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    by = W.view(np.uint8).reshape(W.shape[0], -1)
    return np.unpackbits(by, axis=1, bitorder="little")[:, :cols].copy()


def gf2_matmul(X, Y) -> np.ndarray:
    """``X @ Y mod 2`` through float32 BLAS (exact while the inner size < 2**24)."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape[-1] != Y.shape[0]:
        raise DimensionMismatch(f"inner dimensions {X.shape} and {Y.shape} disagree")
    if X.shape[-1] >= 1 << 24:
        prod = X.astype(np.int64) @ Y.astype(np.int64)
    else:
        prod = X.astype(np.float32) @ Y.astype(np.float32)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Elimination:
    rank: int
    basis: np.ndarray          # reduced row echelon form, ``rank`` rows
    pivots: np.ndarray         # pivot column of each basis row
    solution: np.ndarray | None = None  # x with x @ A = b


def _eliminate_packed(A: np.ndarray):
    rows, cols = A.shape
    W = pack_rows(A)
    T = pack_rows(np.eye(rows, dtype=np.uint8))
    rank, pivots = rref_packed(W, T, cols)
    return W, T, int(rank), np.asarray(pivots, dtype=np.int64)


def gf2_eliminate(A, b=None) -> Elimination:
    """Row-reduce ``A``; optionally express ``b`` as a combination of its rows."""
    A = np.atleast_2d(as_bits(A))
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        raise ValueError("matrix must be non-empty")
    W, T, rank, pivots = _eliminate_packed(A)
    basis = unpack_rows(W[:rank], cols)
    solution = None
    if b is not None:
        b = as_bits(b).ravel()
        if b.size != cols:
            raise DimensionMismatch(f"vector of length {b.size} against {cols} columns")
        rem = pack_rows(b[None, :])[0]
        coef = np.zeros(T.shape[1], dtype=np.uint64)
        for i, p in enumerate(pivots):
            if (int(rem[p >> 6]) >> (int(p) & 63)) & 1:
                rem ^= W[i]
                coef ^= T[i]
        if rem.any():
            raise InconsistentSystem("vector is not in the row span")
        solution = unpack_rows(coef[None, :], rows)[0]
    return Elimination(rank, basis, pivots, solution)


def gf2_rank(A) -> int:
    A = np.atleast_2d(as_bits(A))
    if A.size == 0:
        return 0
    return _eliminate_packed(A)[2]


def gf2_rref(A) -> tuple[np.ndarray, np.ndarray]:
    e = gf2_eliminate(A)
    return e.basis, e.pivots


def gf2_nullspace(A) -> np.ndarray:
    """Basis ``K`` (rows) of ``{x : A x = 0}``, so that ``A @ K.T = 0``."""
    A = np.atleast_2d(as_bits(A))
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.uint8)
    R, piv = gf2_rref(A)
    free = np.setdiff1d(np.arange(cols), piv)
    K = np.zeros((free.size, cols), dtype=np.uint8)
    K[np.arange(free.size), free] = 1
    # x[piv_i] = sum over free f of R[i, f] x[f]
    K[:, piv] = R[:, free].T
    return K


def gf2_rowspan_contains(A, v) -> bool:
    A = np.atleast_2d(as_bits(A))
    v = as_bits(v).ravel()
    if A.shape[1] != v.size:
        raise DimensionMismatch(f"vector of length {v.size} against {A.shape[1]} columns")
    if not v.any():
        return True
    if A.shape[0] == 0:
        return False
    try:
        gf2_eliminate(A, v)
    except InconsistentSystem:
        return False
    return True


class Gf2Span:
    """Row span of a matrix with a vectorised membership test via parity checks."""

    def __init__(self, A):
        A = np.atleast_2d(as_bits(A))
        self.cols = A.shape[1]
        if A.shape[0] and A.any():
            e = gf2_eliminate(A)
            self.basis, self.pivots = e.basis, e.pivots
        else:
            self.basis = np.zeros((0, self.cols), dtype=np.uint8)
            self.pivots = np.zeros(0, dtype=np.int64)
        self.checks = gf2_nullspace(self.basis) if self.basis.shape[0] else np.eye(self.cols, dtype=np.uint8)

    @property
    def rank(self) -> int:
        return int(self.basis.shape[0])

    def contains_many(self, V) -> np.ndarray:
        V = np.atleast_2d(as_bits(V))
        if V.shape[1] != self.cols:
            raise DimensionMismatch(f"vectors of length {V.shape[1]} against {self.cols} columns")
        if self.checks.shape[0] == 0:
            return np.ones(V.shape[0], dtype=bool)
        return ~gf2_matmul(V, self.checks.T).any(axis=1)

    def contains(self, v) -> bool:
        return bool(self.contains_many(np.asarray(v)[None, :])[0])

    def issubspace(self, other: "Gf2Span") -> bool:
        return bool(other.contains_many(self.basis).all()) if self.rank else True

    def __eq__(self, other):
        if not isinstance(other, Gf2Span):
            return NotImplemented
        return self.rank == other.rank and self.issubspace(other)

    __hash__ = None


def gf2_sample_fixed_weight(m: int, t: int, rng, size=None) -> np.ndarray:
    if t > m or t < 0:
        raise ValueError(f"weight {t} outside [0, {m}]")
    return rng.fixed_weight(m, t, size)
