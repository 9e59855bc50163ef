"""Seeded, hierarchically derived random streams.

Every random choice in the package is drawn from an :class:`RngStream`.
A stream is identified by a 256-bit master seed plus a path of labels;
the ChaCha20 key for the stream is SHA-256 of both, so equal
``(seed, path)`` pairs give identical bytes and distinct paths give
independent streams.
"""
from __future__ import annotations

import hashlib

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

_DOMAIN = b"robustgap/rng/v1"
_NONCE = bytes(16)


def _seed_bytes(seed) -> bytes:
    if isinstance(seed, RngStream):
        return seed.seed
    if isinstance(seed, (bytes, bytearray)):
        if len(seed) > 32:
            raise ValueError("seed longer than 256 bits")
        return bytes(seed).rjust(32, b"\0")
    if isinstance(seed, str):
        return _seed_bytes(bytes.fromhex(seed))
    seed = int(seed)
    if not 0 <= seed < 1 << 256:
        raise ValueError("seed must lie in [0, 2**256)")
    return seed.to_bytes(32, "big")


class RngStream:
    """A deterministic ChaCha20 keystream tied to ``(seed, path)``."""

    def __init__(self, seed=0, path: tuple[str, ...] = ()):
        self.seed = _seed_bytes(seed)
        self.path = tuple(str(p) for p in path)
        h = hashlib.sha256(_DOMAIN)
        h.update(self.seed)
        for label in self.path:
            enc = label.encode()
            h.update(len(enc).to_bytes(4, "big"))
            h.update(enc)
        self.key = h.digest()
        self._enc = Cipher(algorithms.ChaCha20(self.key, _NONCE), mode=None).encryptor()

    def __repr__(self):
        return f"RngStream(seed={self.seed.hex()[:12]}..., path={'/'.join(self.path)!r})"

    @property
    def seed_hex(self) -> str:
        return self.seed.hex()

    def child(self, *labels) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(str(x) for x in labels))

    # -- raw material -------------------------------------------------
    def bytes(self, n: int) -> bytes:
        return self._enc.update(bytes(n))

    def uint64(self, size=None) -> np.ndarray:
        count = int(np.prod(size)) if size is not None else 1
        out = np.frombuffer(self.bytes(8 * count), dtype="<u8").astype(np.uint64)
        return out.reshape(size) if size is not None else out[0]

    # -- derived distributions ----------------------------------------
    def bits(self, size) -> np.ndarray:
        count = int(np.prod(size))
        raw = np.frombuffer(self.bytes((count + 7) // 8), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[:count].reshape(size)

    def random(self, size=None) -> np.ndarray:
        """Uniform doubles in [0, 1) with 53 random bits each."""
        u = self.uint64(size if size is not None else (1,))
        x = (u >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
        return x if size is not None else float(x[0])

    def bounded(self, bounds) -> np.ndarray:
        """Exactly uniform integers ``0 <= r < bounds`` (elementwise)."""
        bounds = np.asarray(bounds, dtype=np.uint64)
        if np.any(bounds == 0):
            raise ValueError("bounds must be positive")
        flat = bounds.ravel()
        # reject the top sliver so that u % bound is exactly uniform
        limit = np.uint64(0) - (np.uint64(0) - flat) % flat  # 2^64 - (2^64 mod b), wraps to 0 when b | 2^64
        out = np.empty(flat.shape, dtype=np.uint64)
        todo = np.arange(flat.size)
        while todo.size:
            u = self.uint64((todo.size,))
            lim = limit[todo]
            ok = (lim == 0) | (u < lim)
            out[todo[ok]] = u[ok] % flat[todo[ok]]
            todo = todo[~ok]
        return out.reshape(bounds.shape).astype(np.int64)

    def integers(self, high: int, size=None) -> np.ndarray:
        """Uniform integers in ``[0, high)``."""
        shape = size if size is not None else (1,)
        high = int(high)
        if high <= 0:
            raise ValueError("high must be positive")
        if high & (high - 1) == 0:
            out = (self.uint64(shape) & np.uint64(high - 1)).astype(np.int64)
        else:
            out = self.bounded(np.full(shape, high, dtype=np.uint64))
        return out if size is not None else int(out.reshape(-1)[0])

    def randbelow(self, n: int) -> int:
        """Uniform Python int in ``[0, n)`` for arbitrarily large ``n``."""
        if n <= 0:
            raise ValueError("n must be positive")
        nbits = (n - 1).bit_length()
        nbytes = (nbits + 7) // 8
        while True:
            v = int.from_bytes(self.bytes(nbytes), "big") >> (8 * nbytes - nbits)
            if v < n:
                return v

    def fixed_weight(self, m: int, t: int, size=None) -> np.ndarray:
        """Binary vectors of length ``m`` with exactly ``t`` ones, uniformly."""
        from .algebra.kernels import partial_shuffle

        if not 0 <= t <= m:
            raise ValueError(f"weight {t} outside [0, {m}]")
        count = 1 if size is None else int(size)
        bounds = np.arange(m, m - t, -1, dtype=np.uint64)
        r = self.bounded(np.broadcast_to(bounds, (count, t)).copy())
        pos = partial_shuffle(m, r)
        out = np.zeros((count, m), dtype=np.uint8)
        if t:
            out[np.repeat(np.arange(count), t), pos.ravel()] = 1
        return out[0] if size is None else out

    def fixed_weight_positions(self, m: int, t: int, count: int) -> np.ndarray:
        """Support indices (``count x t``) of uniform weight-``t`` vectors."""
        from .algebra.kernels import partial_shuffle

        if not 0 <= t <= m:
            raise ValueError(f"weight {t} outside [0, {m}]")
        bounds = np.arange(m, m - t, -1, dtype=np.uint64)
        r = self.bounded(np.broadcast_to(bounds, (count, t)).copy())
        return partial_shuffle(m, r)
