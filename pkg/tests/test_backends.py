from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np

from robustgap import backend
from robustgap.algebra import gf2_rank
from robustgap.algebra.gf2 import gf2_rref

# one script, run under both backends; prints digests of kernel outputs
PROBE = r"""
import hashlib, json
import numpy as np
from robustgap import RngStream, backend, lpn
from robustgap.algebra.gf2 import gf2_rref
from robustgap.ecc import ecc_build, error_patterns

rng = RngStream(77)
code = ecc_build(16)
msgs = rng.child("msg").bits((30, 16))
Y = code.encode(msgs) ^ error_patterns(code, code.radius, rng.child("err"), 30)
out, ok = code.decode_many(Y)
R, piv = gf2_rref(rng.child("rref").bits((40, 90)))
task = lpn.make_task(lpn.LpnParams.trapdoor(4, 1, 1), rng.child("lpn"))
X = task.sample_many(rng.child("labels").bits(64), rng.child("sample"))

def h(a):
    return hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()

print(json.dumps({"backend": backend(), "decode": h(out), "ok": bool(ok.all()), "rref": h(R),
                  "pivots": [int(p) for p in piv], "lpn": h(X), "decoded": bool((out == msgs).all())}))
"""


def run_probe(flag: str) -> dict:
    env = dict(os.environ, ROBUSTGAP_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def test_backends_agree():
    jit, plain = run_probe("1"), run_probe("0")
    assert jit["backend"] == "numba" and plain["backend"] == "numpy"
    assert jit["ok"] and jit["decoded"]
    for key in ("decode", "ok", "rref", "pivots", "lpn", "decoded"):
        assert jit[key] == plain[key], key


def test_in_process_backend_is_numba():
    assert backend() == ("numpy" if os.environ.get("ROBUSTGAP_NUMBA") == "0" else "numba")


def test_rref_rank_consistent(rng):
    A = rng.bits((30, 50))
    R, piv = gf2_rref(A)
    assert len(piv) == gf2_rank(A) == gf2_rank(R)
    assert np.array_equal(R[: len(piv)][:, piv], np.eye(len(piv), dtype=np.uint8))
