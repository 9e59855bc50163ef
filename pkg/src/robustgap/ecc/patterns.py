"""Error patterns of a fixed Hamming weight for stress-testing the decoder.

The code is GF(2)-linear, so an error pattern acts the same way on every
codeword and patterns can be generated independently of the message.
"""
from __future__ import annotations

import numpy as np

from .._accel import njit
from .code import ConcatenatedCode

KINDS = ("random", "burst", "block")


@njit
def _xorshift(s):
    s ^= s << np.uint64(13)
    s ^= s >> np.uint64(7)
    s ^= s << np.uint64(17)
    return s


@njit
def _block_targeted(seeds, N, L, w, codebook, out):
    nsymb = codebook.shape[0]
    d = (L + 1) // 2
    half = d // 2
    perm = np.empty(N, dtype=np.int64)
    supp = np.empty(L, dtype=np.int64)
    m = N * L
    for row in range(seeds.shape[0]):
        s = seeds[row] | np.uint64(1)
        for i in range(N):
            perm[i] = i
        for i in range(N - 1):
            s = _xorshift(s)
            j = i + np.int64(s % np.uint64(N - i))
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
        s = _xorshift(s)
        full = min(np.int64(s % np.uint64(w // d + 1)), N)
        rem = w
        bi = 0
        # whole blocks moved onto another inner codeword: invisible to the inner decoder
        for _ in range(full):
            blk = perm[bi]
            bi += 1
            s = _xorshift(s)
            word = codebook[1 + np.int64(s % np.uint64(nsymb - 1))]
            for j in range(L):
                if (word >> np.uint64(j)) & np.uint64(1):
                    out[row, blk * L + j] = 1
            rem -= d
        # half or just over half of a codeword difference: ties or deceptive symbols
        while rem >= half and bi < N:
            blk = perm[bi]
            bi += 1
            s = _xorshift(s)
            word = codebook[1 + np.int64(s % np.uint64(nsymb - 1))]
            k = 0
            for j in range(L):
                if (word >> np.uint64(j)) & np.uint64(1):
                    supp[k] = j
                    k += 1
            s = _xorshift(s)
            take = half + np.int64(s & np.uint64(1))
            if take > rem:
                take = rem
            for i in range(take):
                s = _xorshift(s)
                j = i + np.int64(s % np.uint64(k - i))
                tmp = supp[i]
                supp[i] = supp[j]
                supp[j] = tmp
                out[row, blk * L + supp[i]] = 1
            rem -= take
        while rem > 0:
            s = _xorshift(s)
            pos = np.int64(s % np.uint64(m))
            if out[row, pos] == 0:
                out[row, pos] = 1
                rem -= 1
    return out


def random_patterns(m: int, w: int, rng, count: int) -> np.ndarray:
    return rng.fixed_weight(m, w, count)


def burst_patterns(m: int, w: int, rng, count: int) -> np.ndarray:
    start = rng.integers(m - w + 1, (count,))
    idx = np.arange(m)
    return ((idx >= start[:, None]) & (idx < start[:, None] + w)).astype(np.uint8)


def block_patterns(code: ConcatenatedCode, w: int, rng, count: int) -> np.ndarray:
    p = code.params
    if w > p.code_len:
        raise ValueError("weight exceeds code length")
    out = np.zeros((count, p.code_len), dtype=np.uint8)
    return _block_targeted(rng.uint64((count,)), p.outer_len, p.inner_len, int(w), code.codebook, out)


def error_patterns(code: ConcatenatedCode, w: int, rng, count: int, kind: str = "mixed") -> np.ndarray:
    """``count`` patterns of weight exactly ``w``; ``mixed`` cycles through every kind."""
    m = code.params.code_len
    if kind == "random":
        return random_patterns(m, w, rng.child("random"), count)
    if kind == "burst":
        return burst_patterns(m, w, rng.child("burst"), count)
    if kind == "block":
        return block_patterns(code, w, rng.child("block"), count)
    if kind != "mixed":
        raise ValueError(f"unknown pattern kind {kind!r}")
    sizes = [count // 3 + (i < count % 3) for i in range(3)]
    parts = [error_patterns(code, w, rng, s, k) for s, k in zip(sizes, KINDS)]
    return np.concatenate(parts)
