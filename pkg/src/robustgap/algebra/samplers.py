"""Truncated discrete Gaussian over Z_q."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_REJECTIONS = 10**6


class RejectionCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncGaussParams:
    sigma: float
    bound: int
    modulus: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.bound < 0:
            raise ValueError("bound must be non-negative")
        if self.modulus < 2 or 2 * self.bound >= self.modulus:
            raise ValueError("the truncation window must fit inside Z_q")

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Support and exact normalised probabilities (for reference checks)."""
        xs = np.arange(-self.bound, self.bound + 1)
        if self.sigma == 0:
            w = (xs == 0).astype(float)
        else:
            w = np.exp(-(xs.astype(float) ** 2) / (2 * self.sigma**2))
        return xs, w / w.sum()


def _degenerate(p: TruncGaussParams) -> bool:
    # below this width the mass at 0 exceeds 1 - 1e-30
    return p.bound == 0 or p.sigma < 0.08


def trunc_gauss_centered(p: TruncGaussParams, rng, size: int) -> np.ndarray:
    """``size`` centered samples proportional to exp(-x^2 / 2 sigma^2) on |x| <= bound."""
    size = int(size)
    if _degenerate(p):
        return np.zeros(size, dtype=np.int64)
    s = float(p.sigma)
    # proposal: two-sided geometric with P(x) proportional to exp(-|x|/s)
    log_r = -1.0 / s
    out = np.empty(size, dtype=np.int64)
    filled = 0
    rejected = 0
    while filled < size:
        need = size - filled
        batch = max(64, int(need * 1.6) + 16)
        u = rng.random(batch)
        sign = rng.bits(batch).astype(np.int64)
        v = rng.random(batch)
        k = np.floor(np.log1p(-u) / log_r).astype(np.int64)
        x = np.where(sign == 1, -k, k)
        # (-, 0) would double-count zero
        ok = ~((sign == 1) & (k == 0)) & (k <= p.bound)
        # exp(-x^2/2s^2) / exp(-|x|/s + 1/2) <= 1, equality at |x| = s
        ratio = np.exp(-((k - s) ** 2) / (2 * s * s))
        ok &= v < ratio
        good = x[ok][:need]
        out[filled : filled + good.size] = good
        filled += good.size
        rejected += batch - int(ok.sum())
        if rejected > MAX_REJECTIONS and filled < size:
            raise RejectionCapExceeded(f"more than {MAX_REJECTIONS} rejections")
    return out


def trunc_gauss_sample(p: TruncGaussParams, rng, size=None):
    """Residues mod q whose centered lifts follow the truncated Gaussian."""
    n = 1 if size is None else int(np.prod(size))
    v = trunc_gauss_centered(p, rng, n) % p.modulus
    if size is None:
        return int(v[0])
    return v.reshape(size)


def exact_moments(p: TruncGaussParams) -> tuple[float, float]:
    xs, w = p.weights()
    mean = float((xs * w).sum())
    return mean, math.sqrt(float(((xs - mean) ** 2 * w).sum()))
