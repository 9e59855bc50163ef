"""Encode-a-hard-bit task families: PRF, random table, and one-way permutation.

A payload is ``[b] + Encode(msg)`` where ``msg = (x, c)`` and
``c = hard_bit(x) xor b``. The label sits in the clear at position 0, so
the first-bit classifier is exact, yet zeroing that one bit leaves a
payload whose label is hidden behind the hard bit. The secret holder
decodes ``msg`` and recomputes the hard bit, which tolerates every
perturbation inside the code's radius.

For the permutation variant the encoded pair is ``(f(x), b(x) xor b)``,
sampled with forward evaluations only.
"""
from __future__ import annotations

import numpy as np

from .ecc import ConcatenatedCode, ecc_build, error_patterns
from .framework.task import ABSTAIN, Adversary, Classifier, TaskFamily
from .hardprim import OwpInstance, PrfKey, TableFunction, bits_to_int, int_to_bits, prf_eval_many

VARIANTS = ("prf", "avgcase", "owp")
DEFAULT_N = 16


class HardBitTask(TaskFamily):
    """One of the three variants; ``secret`` is the primitive that defines the hard bit."""

    def __init__(self, variant: str, n: int, secret, code: ConcatenatedCode | None = None):
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        self.variant = variant
        self.n = int(n)
        self.secret = secret
        self.family = f"hardbit-{variant}"
        self.code = code if code is not None else ecc_build(self.msg_len)
        if self.code.n != self.msg_len:
            raise ValueError(f"code takes {self.code.n}-bit messages, need {self.msg_len}")

    @property
    def x_len(self) -> int:
        """Bits of the encoded first component (x, or f(x) for the permutation)."""
        return self.n - 1 if self.variant == "prf" else self.n

    @property
    def msg_len(self) -> int:
        return self.x_len + 1

    @property
    def m(self) -> int:
        return self.code.m

    @property
    def payload_len(self) -> int:
        return 1 + self.code.m

    @property
    def budget(self) -> int:
        return self.code.m // 8

    def params(self) -> dict:
        return {"variant": self.variant, "n": self.n, "m": self.code.m,
                "payload_len": self.payload_len, "radius": self.code.m // 8}

    # -- hard bit ------------------------------------------------------

    def _draw_x(self, k: int, rng) -> np.ndarray:
        if self.variant == "owp":
            return 1 + rng.integers(self.secret.p - 1, (k,))
        return rng.bits((k, self.x_len))

    def hard_bits(self, X) -> np.ndarray:
        """Hard bit of each input row (integers for the permutation variant)."""
        sec = self.require_secret()
        if self.variant == "prf":
            return prf_eval_many(sec, X)
        if self.variant == "avgcase":
            return sec.eval_many(X)
        return sec.hardcore_many(X)

    def sample_many(self, labels, rng):
        labels = np.asarray(labels, dtype=np.uint8)
        k = labels.size
        sec = self.require_secret()
        X = self._draw_x(k, rng)
        c = self.hard_bits(X) ^ labels
        if self.variant == "owp":
            Y = sec.eval_many(X)
            first = np.stack([int_to_bits(int(y), self.x_len) for y in Y]) if k else np.zeros((0, self.x_len), np.uint8)
        else:
            first = X
        msg = np.concatenate([first, c[:, None]], axis=1).astype(np.uint8)
        return np.concatenate([labels[:, None], self.code.encode(msg)], axis=1)

    # -- serialization -------------------------------------------------

    def public_dict(self) -> dict:
        return {"params": self.params()}

    def secret_dict(self) -> dict:
        sec = self.require_secret()
        if self.variant == "prf":
            return {"key": sec.hex()}
        return sec.to_dict()

    @classmethod
    def from_dicts(cls, pub: dict, sec: dict | None = None) -> "HardBitTask":
        p = pub["params"]
        variant, n = p["variant"], int(p["n"])
        secret = None
        if sec:
            if variant == "prf":
                secret = PrfKey.from_hex(sec["key"], n)
            elif variant == "avgcase":
                secret = TableFunction.from_dict(sec)
            else:
                secret = OwpInstance(int(sec["p"]), int(sec["g"]))
        return cls(variant, n, secret)


def make_task(variant: str, n: int = DEFAULT_N, rng=None) -> HardBitTask:
    if rng is None:
        raise ValueError("an RngStream is required")
    if variant == "prf":
        secret = PrfKey.generate(n, rng.child("prf-key"))
    elif variant == "avgcase":
        secret = TableFunction(rng.child("table").bytes(32), n)
    elif variant == "owp":
        secret = OwpInstance.generate(n, rng.child("owp"))
    else:
        raise ValueError(f"variant must be one of {VARIANTS}")
    return HardBitTask(variant, n, secret)


def robust_decode_check(task: HardBitTask, Y) -> np.ndarray:
    """Decode, recompute the hard bit, and output c xor hard_bit; abstain on decode failure."""
    sec = task.require_secret()
    Y = np.atleast_2d(np.asarray(Y, dtype=np.uint8))
    if Y.shape[1] != task.payload_len:
        raise ValueError(f"payload length {Y.shape[1]} does not match {task.payload_len}")
    msgs, ok = task.code.decode_many(Y[:, 1:])
    out = np.full(Y.shape[0], ABSTAIN, dtype=np.int64)
    first, c = msgs[:, :-1], msgs[:, -1].astype(np.int64)
    if task.variant == "owp":
        vals = first.astype(np.int64) @ (1 << np.arange(task.x_len, dtype=np.int64))
        ok = ok & (vals >= 1) & (vals <= sec.p - 1)
        X = sec.invert_many(vals[ok])
    else:
        X = first[ok]
    if ok.any():
        out[ok] = c[ok] ^ task.hard_bits(X).astype(np.int64)
    return out


def decode_check_classifier(task: HardBitTask) -> Classifier:
    task.require_secret()
    return Classifier("decode-check", lambda Y: robust_decode_check(task, Y))


def decoded_message(task: HardBitTask, y) -> tuple[int | np.ndarray, int]:
    """(x or f(x), c) from a single payload; raises when decoding fails."""
    msg = task.code.decode(np.asarray(y, dtype=np.uint8)[1:])
    first = msg[:-1]
    if task.variant == "owp":
        first = bits_to_int(first)
    return first, int(msg[-1])


class ZeroFirstBit(Adversary):
    """Overwrite the label position with 0."""

    name = "zero-first-bit"
    budget = 1

    def perturb_many(self, X, labels, rng):
        Xt = X.copy()
        Xt[:, 0] = 0
        return Xt


class CodewordNoise(Adversary):
    """Weight-``budget`` errors aimed at the codeword part (random, burst or block-targeted).

    Half of the trials spend one unit of budget on the label bit.
    """

    def __init__(self, code: ConcatenatedCode, budget: int | None = None, kind: str = "mixed"):
        self.code = code
        self.budget = code.m // 8 if budget is None else int(budget)
        self.kind = kind
        self.name = f"codeword-{kind}"

    def perturb_many(self, X, labels, rng):
        k = X.shape[0]
        hit_label = rng.child("label").bits(k).astype(bool) & (self.budget > 0)
        full = error_patterns(self.code, self.budget, rng.child("full"), k, self.kind)
        short = error_patterns(self.code, max(self.budget - 1, 0), rng.child("short"), k, self.kind)
        E = np.where(hit_label[:, None], short, full)
        Xt = X.copy()
        Xt[:, 1:] ^= E
        Xt[:, 0] ^= hit_label.astype(np.uint8)
        return Xt
