"""Concatenated code: shortened Reed-Solomon over GF(2^b) with a simplex inner code.

Outer: narrow-sense RS [N, K, N-K+1] with consecutive roots alpha^1..alpha^(N-K),
systematic. Inner: simplex [2^b - 1, b, 2^(b-1)]. The composite minimum
distance is at least (N-K+1) * 2^(b-1) and generalized minimum distance
decoding corrects every pattern of weight below half of it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra.gf2 import as_bits, gf2_matmul
from .kernels import decode_batch, rs_encode_sys

# primitive polynomials, bit i = coefficient of x^i
PRIMITIVE_POLY = {3: 0b1011, 4: 0b10011, 5: 0b100101, 6: 0b1000011, 7: 0b10001001, 8: 0b100011101}
DEFAULT_RATE_CAP = 32


class DecodeFailure(ValueError):
    """No codeword lies within the decoding radius."""


@dataclass(frozen=True)
class CodeParams:
    msg_len: int
    code_len: int
    radius: int
    symbol_bits: int
    outer_len: int
    outer_dim: int
    rate_cap: int = DEFAULT_RATE_CAP

    @property
    def inner_len(self) -> int:
        return (1 << self.symbol_bits) - 1

    @property
    def inner_dist(self) -> int:
        return 1 << (self.symbol_bits - 1)

    @property
    def designed_distance(self) -> int:
        return (self.outer_len - self.outer_dim + 1) * self.inner_dist

    def as_dict(self) -> dict:
        return {
            "msg_len": self.msg_len, "code_len": self.code_len, "radius": self.radius,
            "symbol_bits": self.symbol_bits, "outer_len": self.outer_len,
            "outer_dim": self.outer_dim, "rate_cap": self.rate_cap,
        }


def choose_params(msg_len: int, rate_cap: int = DEFAULT_RATE_CAP) -> CodeParams:
    """Shortest code with guaranteed radius >= floor(m/8) and m <= rate_cap * n."""
    if msg_len < 8:
        raise ValueError("message length must be at least 8")
    best = None
    for b in sorted(PRIMITIVE_POLY):
        K = -(-msg_len // b)
        L = (1 << b) - 1
        d = 1 << (b - 1)
        for N in range(K, L + 1):
            m = N * L
            radius = (N - K + 1) * d // 2 - 1
            if radius >= m // 8:
                if m <= rate_cap * msg_len and (best is None or m < best.code_len):
                    best = CodeParams(msg_len, m, radius, b, N, K, rate_cap)
                break
    if best is None:
        raise ValueError(f"no code within rate cap {rate_cap} for n = {msg_len}")
    return best


def _field_tables(b: int):
    size = 1 << b
    order = size - 1
    exp = np.zeros(2 * size, dtype=np.int64)
    log = np.zeros(size, dtype=np.int64)
    x = 1
    for i in range(order):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= PRIMITIVE_POLY[b]
    exp[order : 2 * order] = exp[:order]
    return exp, log


def _gmul(a, b, exp, log):
    return 0 if a == 0 or b == 0 else int(exp[log[a] + log[b]])


def _generator_poly(nsym: int, exp, log) -> np.ndarray:
    g = [1]
    for i in range(1, nsym + 1):
        root = int(exp[i])
        nxt = [0] * (len(g) + 1)
        for j, c in enumerate(g):
            nxt[j + 1] ^= c
            nxt[j] ^= _gmul(c, root, exp, log)
        g = nxt
    return np.asarray(g, dtype=np.int64)


def _simplex_codebook(b: int) -> np.ndarray:
    L = (1 << b) - 1
    book = np.zeros(1 << b, dtype=np.uint64)
    for u in range(1 << b):
        w = 0
        for j in range(L):
            if bin(u & (j + 1)).count("1") & 1:
                w |= 1 << j
        book[u] = w
    return book


@dataclass(frozen=True, eq=False)
class ConcatenatedCode:
    params: CodeParams
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    gen: np.ndarray = field(repr=False)
    codebook: np.ndarray = field(repr=False)
    generator_matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.params.msg_len

    @property
    def m(self) -> int:
        return self.params.code_len

    @property
    def radius(self) -> int:
        return self.params.radius

    def _symbols(self, x: np.ndarray) -> np.ndarray:
        p = self.params
        padded = np.zeros(p.outer_dim * p.symbol_bits, dtype=np.int64)
        padded[: p.msg_len] = x
        weights = 1 << np.arange(p.symbol_bits)
        return padded.reshape(p.outer_dim, p.symbol_bits) @ weights

    def encode_slow(self, x) -> np.ndarray:
        """Reference encoder (symbol arithmetic, no generator matrix)."""
        p = self.params
        x = as_bits(x).ravel()
        if x.size != p.msg_len:
            raise ValueError(f"message must have {p.msg_len} bits, got {x.size}")
        c = np.zeros(p.outer_len, dtype=np.int64)
        rs_encode_sys(self._symbols(x), self.gen, p.outer_len - p.outer_dim, self.exp, self.log, c)
        L = p.inner_len
        shifts = np.arange(L, dtype=np.uint64)
        blocks = (self.codebook[c][:, None] >> shifts) & np.uint64(1)
        return blocks.astype(np.uint8).ravel()

    def encode(self, x) -> np.ndarray:
        x = as_bits(x)
        if x.shape[-1] != self.params.msg_len:
            raise ValueError(f"message must have {self.params.msg_len} bits, got {x.shape[-1]}")
        return gf2_matmul(x, self.generator_matrix)

    def decode_many(self, Y) -> tuple[np.ndarray, np.ndarray]:
        """Decode rows of ``Y``; returns ``(messages, ok)``."""
        p = self.params
        Y = np.ascontiguousarray(np.atleast_2d(as_bits(Y)))
        if Y.shape[1] != p.code_len:
            raise ValueError(f"received word must have {p.code_len} bits, got {Y.shape[1]}")
        return decode_batch(
            Y, self.codebook, self.exp, self.log, self.gen,
            p.outer_len, p.outer_dim, p.symbol_bits, p.inner_len, p.radius, p.msg_len,
        )

    def decode(self, y) -> np.ndarray:
        msgs, ok = self.decode_many(np.asarray(y)[None, :])
        if not ok[0]:
            raise DecodeFailure("no codeword within the decoding radius")
        return msgs[0]


def ecc_build(msg_len: int, rate_cap: int = DEFAULT_RATE_CAP) -> ConcatenatedCode:
    p = choose_params(msg_len, rate_cap)
    exp, log = _field_tables(p.symbol_bits)
    gen = _generator_poly(p.outer_len - p.outer_dim, exp, log)
    book = _simplex_codebook(p.symbol_bits)
    code = ConcatenatedCode(p, exp, log, gen, book, np.zeros((0, 0), dtype=np.uint8))
    # the composite map is GF(2)-linear: rows are images of unit vectors
    G = np.stack([code.encode_slow(row) for row in np.eye(msg_len, dtype=np.uint8)])
    object.__setattr__(code, "generator_matrix", G)
    return code


def encode(code: ConcatenatedCode, x) -> np.ndarray:
    return code.encode(x)


def decode(code: ConcatenatedCode, y) -> np.ndarray:
    return code.decode(y)
