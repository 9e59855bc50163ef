"""Hard-function primitives: length-doubling PRG, GGM PRF, secret random table, OWP.

Bit strings are ``uint8`` arrays of 0/1.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .numtheory import primitive_root, random_prime
from .rng import RngStream

_PRG_DOMAIN = b"robustgap/prg-double/v1"


class OutOfDomain(ValueError):
    pass


def _bits_to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(bits, bitorder="little").tobytes()


def bits_to_int(bits) -> int:
    """Little-endian: bit i carries weight 2**i."""
    return int.from_bytes(_bits_to_bytes(np.asarray(bits, dtype=np.uint8)), "little")


def int_to_bits(x: int, n: int) -> np.ndarray:
    raw = np.frombuffer(int(x).to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


def prg_double(seed) -> np.ndarray:
    """Expand ``n`` bits to ``2n`` bits with SHAKE-256 under a fixed domain tag."""
    seed = np.asarray(seed, dtype=np.uint8).ravel()
    n = seed.size
    h = hashlib.shake_256(_PRG_DOMAIN + n.to_bytes(4, "big") + _bits_to_bytes(seed))
    raw = np.frombuffer(h.digest((2 * n + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: 2 * n].copy()


@dataclass(frozen=True)
class PrfKey:
    key: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.key, dtype=np.uint8).ravel()
        if k.size < 2 or k.max(initial=0) > 1:
            raise ValueError("key must hold at least two bits")
        object.__setattr__(self, "key", k)

    @property
    def n(self) -> int:
        return int(self.key.size)

    @property
    def input_len(self) -> int:
        return self.n - 1

    @classmethod
    def generate(cls, n: int, rng: RngStream) -> "PrfKey":
        return cls(rng.bits(n))

    def hex(self) -> str:
        return _bits_to_bytes(self.key).hex()

    @classmethod
    def from_hex(cls, text: str, n: int) -> "PrfKey":
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        return cls(np.unpackbits(raw, bitorder="little")[:n])


def prf_trace(k: PrfKey, x) -> list[np.ndarray]:
    """Seeds along the GGM path: root key, then one seed per input bit."""
    x = np.asarray(x, dtype=np.uint8).ravel()
    if x.size != k.input_len:
        raise ValueError(f"input must have {k.input_len} bits, got {x.size}")
    n = k.n
    seeds = [k.key]
    s = k.key
    for bit in x:
        out = prg_double(s)
        s = out[n:] if bit else out[:n]
        seeds.append(s)
    return seeds


def prf_eval(k: PrfKey, x) -> int:
    """GGM tree walk; the output is the first bit of the leaf seed."""
    return int(prf_trace(k, x)[-1][0])


def prf_eval_many(k: PrfKey, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.uint8))
    return np.array([prf_eval(k, x) for x in X], dtype=np.uint8)


class TableFunction:
    """A secret uniformly random function on ``n`` bits, materialised lazily from a seed."""

    MAX_N = 24

    def __init__(self, seed, n: int):
        if not 1 <= n <= self.MAX_N:
            raise ValueError(f"table input length must lie in [1, {self.MAX_N}]")
        self.seed = RngStream(seed).seed
        self.n = int(n)
        self.reads = 0
        self._table: np.ndarray | None = None

    def __repr__(self):
        return f"TableFunction(n={self.n})"

    def _materialise(self) -> np.ndarray:
        if self._table is None:
            self._table = RngStream(self.seed, ("table-function", str(self.n))).bits(1 << self.n)
        return self._table

    def index(self, z) -> int:
        z = np.asarray(z, dtype=np.uint8).ravel()
        if z.size != self.n:
            raise ValueError(f"input must have {self.n} bits, got {z.size}")
        return bits_to_int(z)

    def eval(self, z) -> int:
        self.reads += 1
        return int(self._materialise()[self.index(z)])

    def eval_many(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=np.uint8))
        if Z.shape[1] != self.n:
            raise ValueError(f"inputs must have {self.n} bits, got {Z.shape[1]}")
        self.reads += Z.shape[0]
        idx = Z.astype(np.int64) @ (1 << np.arange(self.n, dtype=np.int64))
        return self._materialise()[idx].copy()

    def table_bits(self) -> np.ndarray:
        """Full table copy (tests only; never part of a payload)."""
        return self._materialise().copy()

    def to_dict(self) -> dict:
        return {"seed": self.seed.hex(), "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "TableFunction":
        return cls(d["seed"], int(d["n"]))


def table_fn_eval(g: TableFunction, z) -> int:
    return g.eval(z)


@dataclass
class OwpInstance:
    """x -> g^x mod p on exponents {1, ..., p-1}; hard-core bit is x > (p-1)/2."""

    p: int
    g: int
    forward_calls: int = 0
    inverse_calls: int = 0
    _dlog: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def generate(cls, bits: int, rng: RngStream) -> "OwpInstance":
        p = random_prime(bits, rng)
        return cls(p, primitive_root(p))

    @property
    def nbits(self) -> int:
        """Bits needed to write a domain element."""
        return (self.p - 1).bit_length()

    def _check(self, x: int) -> int:
        x = int(x)
        if not 1 <= x <= self.p - 1:
            raise OutOfDomain(f"{x} outside [1, {self.p - 1}]")
        return x

    def eval(self, x: int) -> int:
        self.forward_calls += 1
        return pow(self.g, self._check(x), self.p)

    def hardcore_bit(self, x: int) -> int:
        return int(self._check(x) > (self.p - 1) // 2)

    def eval_many(self, X) -> np.ndarray:
        self.forward_calls += len(X)
        return np.array([pow(self.g, self._check(x), self.p) for x in X], dtype=np.int64)

    def hardcore_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        if X.size and (X.min() < 1 or X.max() > self.p - 1):
            raise OutOfDomain("input outside the domain")
        return (X > (self.p - 1) // 2).astype(np.uint8)

    def invert(self, y: int) -> int:
        """Exhaustive search; toy moduli only."""
        self.inverse_calls += 1
        y = self._check(y)
        acc = 1
        for x in range(1, self.p):
            acc = acc * self.g % self.p
            if acc == y:
                return x
        raise AssertionError("g is not a generator")

    def invert_many(self, Y) -> np.ndarray:
        """Table-driven inversion (exhaustive once, then lookups); toy moduli only."""
        if self.p > 1 << 24:
            raise ValueError("inversion table limited to p < 2**24")
        Y = np.asarray(Y, dtype=np.int64)
        if Y.size and (Y.min() < 1 or Y.max() > self.p - 1):
            raise OutOfDomain("input outside the domain")
        self.inverse_calls += int(Y.size)
        if self._dlog is None:
            table = np.zeros(self.p, dtype=np.int64)
            acc = 1
            for x in range(1, self.p):
                acc = acc * self.g % self.p
                table[acc] = x
            self._dlog = table
        return self._dlog[Y]

    def to_dict(self) -> dict:
        return {"p": self.p, "g": self.g}


def owp_eval(inst: OwpInstance, x: int) -> int:
    return inst.eval(x)


def hardcore_bit(inst: OwpInstance, x: int) -> int:
    return inst.hardcore_bit(x)
