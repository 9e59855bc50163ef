"""Compare the numba kernels with their numpy / plain-Python fallbacks.

Kernels with a vectorised numpy twin are compared in-process; the ECC
decoder, which has no twin, is timed again in a subprocess started with
``ROBUSTGAP_NUMBA=0``. Outputs are checked before timings are reported.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from robustgap import RngStream, backend
from robustgap.algebra import kernels as K
from robustgap.algebra.gf2 import pack_rows
from robustgap.ecc import ecc_build, error_patterns


def timed(fn, *args, repeat: int = 3):
    fn(*args)  # warm-up (and compilation)
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_rref(rows: int, cols: int, rng):
    A = rng.bits((rows, cols))

    def run(kernel):
        W = pack_rows(A)
        T = np.zeros((rows, 1), dtype=np.uint64)
        return kernel(W, T, cols)

    t_nb, (r1, p1) = timed(run, K._rref_packed_nb)
    t_np, (r2, p2) = timed(run, K._rref_packed_np)
    assert r1 == r2 and np.array_equal(p1, p2)
    return f"rref {rows}x{cols}", t_nb, t_np


def bench_syndromes(m: int, t: int, rng):
    cols = rng.uint64((m,)) & np.uint64((1 << 40) - 1)
    t_nb, a = timed(K._weight_class_syndromes_nb, cols, t, repeat=1)
    t_np, b = timed(K._weight_class_syndromes_np, cols, t, repeat=1)
    assert np.array_equal(np.sort(a), np.sort(b))
    return f"weight-{t} syndromes m={m}", t_nb, t_np


def bench_shuffle(m: int, t: int, count: int, rng):
    r = np.stack([rng.child(i).integers(m - i, (count,)) for i in range(t)], axis=1).astype(np.int64)
    t_nb, a = timed(K._partial_shuffle_nb, m, r)
    t_np, b = timed(K._partial_shuffle_np, m, r)
    assert np.array_equal(a, b)
    return f"partial shuffle m={m} t={t} x{count}", t_nb, t_np


def decode_seconds(n: int, words: int, seed: int) -> float:
    """Decode ``words`` noisy codewords with the active backend; checks every result."""
    rng = RngStream(seed).child("decode")
    code = ecc_build(n)
    msgs = rng.child("msg").bits((words, n))
    Y = code.encode(msgs) ^ error_patterns(code, code.m // 8, rng.child("err"), words)
    t, (out, ok) = timed(code.decode_many, Y, repeat=1)
    assert ok.all() and np.array_equal(out, msgs)
    return t


def bench_decode(n: int, words: int, seed: int):
    # the fallback re-imports the package with the jit switched off
    t_nb = decode_seconds(n, words, seed)
    env = dict(os.environ, ROBUSTGAP_NUMBA="0")
    cmd = [sys.executable, __file__, "--decode-only", str(n), str(words), "--seed", str(seed)]
    t_py = float(subprocess.run(cmd, env=env, check=True, capture_output=True, text=True).stdout)
    return f"ECC decode n={n} x{words}", t_nb, t_py


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    ap.add_argument("--decode-only", nargs=2, type=int, metavar=("N", "WORDS"), help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.decode_only:
        print(decode_seconds(*args.decode_only, args.seed))
        return
    rng = RngStream(args.seed)
    s = 0.25 if args.quick else 1.0
    rows = [
        bench_rref(int(512 * s), int(1152 * s), rng.child("rref")),
        bench_syndromes(24 if args.quick else 32, 5, rng.child("syn")),
        bench_shuffle(1152, 3, int(20000 * s), rng.child("shuffle")),
        bench_decode(64, int(40 * s), args.seed),
    ]
    print(f"active backend: {backend()}")
    print(f"{'kernel':34s} {'numba s':>10s} {'fallback s':>11s} {'speed-up':>9s}")
    for name, t_nb, t_np in rows:
        print(f"{name:34s} {t_nb:10.4f} {t_np:11.4f} {t_np / max(t_nb, 1e-9):8.1f}x")


if __name__ == "__main__":
    main()
