"""Hot loops for GF(2) elimination and fixed-weight sampling.

Each kernel has a numba implementation and a vectorised numpy one; the
module-level names point at whichever backend is active. Both are kept
importable so the test-suite can cross-check them.
"""
from __future__ import annotations

import numpy as np

from .._accel import njit, pick

# --------------------------------------------------------------------------
# GF(2) reduced row echelon form on 64-bit packed rows


@njit
def _rref_packed_nb(W, T, ncols):
    r, words = W.shape
    tw = T.shape[1]
    pivots = np.empty(min(r, ncols), dtype=np.int64)
    rank = 0
    for col in range(ncols):
        if rank == r:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for i in range(rank, r):
            if W[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(words):
                tmp = W[piv, k]
                W[piv, k] = W[rank, k]
                W[rank, k] = tmp
            for k in range(tw):
                tmp = T[piv, k]
                T[piv, k] = T[rank, k]
                T[rank, k] = tmp
        for i in range(r):
            if i != rank and (W[i, w] & bit):
                # the pivot row is zero left of ``col``
                for k in range(w, words):
                    W[i, k] ^= W[rank, k]
                for k in range(tw):
                    T[i, k] ^= T[rank, k]
        pivots[rank] = col
        rank += 1
    return rank, pivots[:rank].copy()


def _rref_packed_np(W, T, ncols):
    r = W.shape[0]
    pivots = []
    rank = 0
    for col in range(ncols):
        if rank == r:
            break
        w = col >> 6
        shift = np.uint64(col & 63)
        colbits = (W[:, w] >> shift) & np.uint64(1)
        cand = np.flatnonzero(colbits[rank:])
        if cand.size == 0:
            continue
        piv = rank + int(cand[0])
        if piv != rank:
            W[[rank, piv]] = W[[piv, rank]]
            T[[rank, piv]] = T[[piv, rank]]
            colbits[[rank, piv]] = colbits[[piv, rank]]
        mask = colbits.astype(bool)
        mask[rank] = False
        if mask.any():
            W[mask] ^= W[rank]
            T[mask] ^= T[rank]
        pivots.append(col)
        rank += 1
    return rank, np.asarray(pivots, dtype=np.int64)


rref_packed = pick(_rref_packed_nb, _rref_packed_np)

# --------------------------------------------------------------------------
# partial Fisher-Yates: positions of uniform fixed-weight vectors


@njit
def _partial_shuffle_nb(m, r):
    count, t = r.shape
    out = np.empty((count, t), dtype=np.int64)
    perm = np.empty(m, dtype=np.int64)
    for row in range(count):
        for i in range(m):
            perm[i] = i
        for i in range(t):
            j = i + r[row, i]
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            out[row, i] = perm[i]
    return out


def _partial_shuffle_np(m, r):
    count, t = r.shape
    perm = np.tile(np.arange(m, dtype=np.int64), (count, 1))
    rows = np.arange(count)
    for i in range(t):
        j = i + r[:, i]
        a = perm[:, i].copy()
        perm[:, i] = perm[rows, j]
        perm[rows, j] = a
    return perm[:, :t].copy()


def partial_shuffle(m: int, r: np.ndarray) -> np.ndarray:
    """``r[:, i]`` must be uniform in ``[0, m - i)``; returns distinct positions."""
    r = np.ascontiguousarray(r, dtype=np.int64)
    return pick(_partial_shuffle_nb, _partial_shuffle_np)(int(m), r)


# --------------------------------------------------------------------------
# popcount on uint64 words (SWAR)


@njit
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


# --------------------------------------------------------------------------
# syndromes of every weight-t vector (tiny-instance enumeration)


@njit
def _weight_class_syndromes_nb(col_syn, t):
    m = col_syn.shape[0]
    # number of t-subsets of m
    total = 1
    for i in range(t):
        total = total * (m - i) // (i + 1)
    out = np.empty(total, dtype=np.uint64)
    if t == 0:
        out[0] = 0
        return out
    idx = np.arange(t)
    acc = np.zeros(t + 1, dtype=np.uint64)
    for i in range(t):
        acc[i + 1] = acc[i] ^ col_syn[idx[i]]
    k = 0
    while True:
        out[k] = acc[t]
        k += 1
        # advance to the next combination in lexicographic order
        i = t - 1
        while i >= 0 and idx[i] == m - t + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, t):
            idx[j] = idx[j - 1] + 1
        for j in range(i, t):
            acc[j + 1] = acc[j] ^ col_syn[idx[j]]
    return out


def _weight_class_syndromes_np(col_syn, t):
    from itertools import combinations

    col_syn = np.asarray(col_syn, dtype=np.uint64)
    if t == 0:
        return np.zeros(1, dtype=np.uint64)
    combos = np.array(list(combinations(range(col_syn.size), t)), dtype=np.int64)
    return np.bitwise_xor.reduce(col_syn[combos], axis=1)


def weight_class_syndromes(col_syn: np.ndarray, t: int) -> np.ndarray:
    """Syndrome (as an integer) of each of the C(m, t) weight-t vectors."""
    col_syn = np.ascontiguousarray(col_syn, dtype=np.uint64)
    return pick(_weight_class_syndromes_nb, _weight_class_syndromes_np)(col_syn, int(t))
