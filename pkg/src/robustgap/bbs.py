"""Blum-Blum-Shub generator, its factoring trapdoor, and the BLPR task.

The hard-core bit is parity. A generator output is ``y_1 .. y_{m-1}``
followed by the final state ``x_m`` written big-endian in ``bitlen(N)``
bits. Knowing ``p`` and ``q`` (both 3 mod 4) the square-root chain can be
walked backwards from ``x_m``: the root that is itself a square is
``x^((p+1)/4)`` mod ``p`` (and likewise mod ``q``), joined by CRT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .framework.task import Adversary, Classifier, TaskFamily
from .numtheory import crt_pair, random_prime

MIN_BITS = 16
MAX_BALL_RADIUS = 3


class KeygenExhausted(RuntimeError):
    pass


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class BbsKey:
    N: int
    p: int | None = None
    q: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if self.p * self.q != self.N or self.p == self.q:
                raise ValueError("N must be the product of two distinct primes")
            if self.p % 4 != 3 or self.q % 4 != 3:
                raise ValueError("both primes must be 3 mod 4")

    @property
    def bitlen(self) -> int:
        return self.N.bit_length()

    @property
    def has_factors(self) -> bool:
        return self.p is not None

    def public(self) -> "BbsKey":
        return BbsKey(self.N)

    def to_dict(self) -> dict:
        return {"N": format(self.N, "x")}

    def secret_dict(self) -> dict:
        return {"p": format(self.p, "x"), "q": format(self.q, "x")}

    @classmethod
    def from_dicts(cls, pub: dict, sec: dict | None = None) -> "BbsKey":
        N = int(pub["N"], 16)
        if not sec:
            return cls(N)
        return cls(N, int(sec["p"], 16), int(sec["q"], 16))


def bbs_keygen(bits: int, rng, max_tries: int = 100) -> BbsKey:
    """N = p q with p, q distinct primes of about bits/2 bits, both 3 mod 4."""
    if bits < MIN_BITS:
        raise ValueError(f"need at least {MIN_BITS} bits")
    half = bits // 2
    for attempt in range(max_tries):
        r = rng.child("attempt", attempt)
        p = random_prime(half, r.child("p"), mod4=3)
        q = random_prime(bits - half, r.child("q"), mod4=3)
        if p != q:
            return BbsKey(p * q, p, q)
    raise KeygenExhausted("could not find two distinct primes")


@dataclass(frozen=True)
class BbsOutput:
    y: np.ndarray      # m - 1 parity bits
    x_m: int

    def to_bits(self, bitlen: int) -> np.ndarray:
        return np.concatenate([self.y, _int_to_be(self.x_m, bitlen)]).astype(np.uint8)


def _int_to_be(x: int, width: int) -> np.ndarray:
    return np.array([(x >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def _be_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def squaring_chain(N: int, x0: int, m: int) -> list[int]:
    """[x_1, ..., x_m] with x_i = x_{i-1}^2 mod N."""
    xs = []
    x = x0 % N
    for _ in range(m):
        x = x * x % N
        xs.append(x)
    return xs


def bbs_prg(N: int, x0: int, m: int) -> BbsOutput:
    if m < 1:
        raise ValueError("m must be positive")
    xs = squaring_chain(N, x0, m)
    return BbsOutput(np.array([x & 1 for x in xs[:-1]], dtype=np.uint8), xs[-1])


def parse_output(z, m: int, bitlen: int) -> BbsOutput:
    z = np.asarray(z, dtype=np.uint8).ravel()
    if z.size != m - 1 + bitlen:
        raise ParseError(f"expected {m - 1 + bitlen} bits, got {z.size}")
    return BbsOutput(z[: m - 1].copy(), _be_to_int(z[m - 1 :]))


def is_square(key: BbsKey, x: int) -> bool:
    """Square in Z_N (zero residues included), via Euler's criterion mod p and q."""
    p, q = key.p, key.q
    return all(x % r == 0 or pow(x, (r - 1) // 2, r) == 1 for r in (p, q))


def principal_root(key: BbsKey, x: int) -> int:
    """The square root of x that is itself a square mod N (x must be a square)."""
    p, q = key.p, key.q
    return crt_pair(pow(x, (p + 1) // 4, p), p, pow(x, (q + 1) // 4, q), q)


def backward_parities(key: BbsKey, x_m: int, count: int) -> np.ndarray | None:
    """Parities of x_{m-1}, ..., x_{m-count} (returned in forward order), or None if x_m is not a square."""
    if not 0 <= x_m < key.N or not is_square(key, x_m):
        return None
    out = np.empty(count, dtype=np.uint8)
    x = x_m
    for i in range(count - 1, -1, -1):
        x = principal_root(key, x)
        out[i] = x & 1
    return out


def bbs_trapdoor_distinguish(key: BbsKey, z, m: int) -> int:
    """1 iff x_m is a square and the backward chain reproduces every y_i."""
    if not key.has_factors:
        raise PermissionError("the distinguisher needs the factorization of N")
    out = parse_output(z, m, key.bitlen)
    par = backward_parities(key, out.x_m, m - 1)
    return int(par is not None and np.array_equal(par, out.y))


def random_acceptance_rate(key: BbsKey, m: int) -> float:
    """Exact acceptance probability on uniform bits: squares in Z_N over 2^bitlen, times 2^-(m-1)."""
    squares = (key.p + 1) // 2 * ((key.q + 1) // 2)
    return squares / 2**key.bitlen * 0.5 ** (m - 1)


def nominal_acceptance_rate(m: int) -> float:
    return 0.25 * 0.5 ** (m - 1)


# --------------------------------------------------------------------------
# the BLPR task


class BlprTask(TaskFamily):
    """D_0 = (0, BBS(x_0)), D_1 = (1, uniform bits of the same length)."""

    family = "bbs-blpr"

    def __init__(self, key: BbsKey, m: int, radius: int = 2):
        self.key_public = key.public()
        self.secret = key if key.has_factors else None
        self.m = int(m)
        self.radius = int(radius)

    @property
    def payload_len(self) -> int:
        return 1 + self.m - 1 + self.key_public.bitlen

    @property
    def budget(self) -> int:
        return self.radius

    def params(self) -> dict:
        return {"m": self.m, "bitlen": self.key_public.bitlen, "radius": self.radius}

    def sample_many(self, labels, rng):
        labels = np.asarray(labels, dtype=np.uint8)
        k = labels.size
        N, L = self.key_public.N, self.key_public.bitlen
        out = rng.child("uniform").bits((k, self.payload_len))
        seeds = rng.child("seed")
        for i in np.flatnonzero(labels == 0):
            x0 = seeds.randbelow(N)
            out[i, 1:] = bbs_prg(N, x0, self.m).to_bits(L)
        out[:, 0] = labels
        return out

    def public_dict(self) -> dict:
        return {"params": self.params(), "key": self.key_public.to_dict()}

    def secret_dict(self) -> dict:
        return self.require_secret().secret_dict()

    @classmethod
    def from_dicts(cls, pub: dict, sec: dict | None = None) -> "BlprTask":
        p = pub["params"]
        return cls(BbsKey.from_dicts(pub["key"], sec), int(p["m"]), int(p.get("radius", 2)))


def make_task(bits: int, m: int, rng, radius: int = 2) -> BlprTask:
    return BlprTask(bbs_keygen(bits, rng.child("key")), m, radius)


def ball_volume(length: int, c: int) -> int:
    return sum(math.comb(length, j) for j in range(c + 1))


@dataclass
class BallSearchStats:
    chains: int = 0


def ball_search(key: BbsKey, z, m: int, c: int, stats: BallSearchStats | None = None) -> int:
    """1 iff some z' within Hamming distance c of z is accepted by the distinguisher.

    Grouped by the state field: for each x_m' with j flips, one backward
    chain gives the parities, and the y-part may still absorb c - j flips.
    This is equivalent to enumerating the whole ball.
    """
    if not 0 <= c <= MAX_BALL_RADIUS:
        raise ValueError(f"ball radius must lie in [0, {MAX_BALL_RADIUS}]")
    if not key.has_factors:
        raise PermissionError("ball search needs the factorization of N")
    out = parse_output(z, m, key.bitlen)
    L = key.bitlen
    for j in range(c + 1):
        for flips in combinations(range(L), j):
            x = out.x_m
            for pos in flips:
                x ^= 1 << (L - 1 - pos)
            if stats is not None:
                stats.chains += 1
            par = backward_parities(key, x, m - 1)
            if par is not None and int((par != out.y).sum()) <= c - j:
                return 1
    return 0


def ball_search_classifier(task: BlprTask, c: int | None = None) -> Classifier:
    """Label 0 (generator class) iff the ball around the payload reaches an accepted word."""
    key = task.require_secret()
    c = task.radius if c is None else int(c)

    def predict(Y):
        return np.array([1 - ball_search(key, y[1:], task.m, c) for y in Y], dtype=np.int64)

    return Classifier(f"ball-search-{c}", predict)


def distinguisher_classifier(task: BlprTask) -> Classifier:
    key = task.require_secret()
    return Classifier("bbs-trapdoor",
                      lambda Y: np.array([1 - bbs_trapdoor_distinguish(key, y[1:], task.m) for y in Y],
                                         dtype=np.int64))


class StateFlips(Adversary):
    """Flip exactly ``budget`` bits, all inside the final-state field."""

    name = "state-flips"

    def __init__(self, budget: int, m: int, bitlen: int):
        self.budget = int(budget)
        self.offset = m  # label bit plus m - 1 parity bits
        self.bitlen = bitlen

    def perturb_many(self, X, labels, rng):
        E = rng.fixed_weight(self.bitlen, self.budget, X.shape[0])
        Xt = X.copy()
        Xt[:, self.offset :] ^= E
        return Xt
