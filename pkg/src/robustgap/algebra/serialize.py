"""Text format for matrices: header ``gf2|zq rows cols [q]`` then one hex line per row.

GF(2) rows are 64-bit little-endian packed words; Z_q rows are
little-endian 32-bit words (64-bit when q exceeds 2**32).
"""
from __future__ import annotations

import numpy as np

from .gf2 import as_bits, pack_rows, unpack_rows


class FormatError(ValueError):
    pass


def _zq_dtype(q: int) -> str:
    return "<u4" if q <= 1 << 32 else "<u8"


def dump_gf2(A) -> str:
    A = np.atleast_2d(as_bits(A))
    rows, cols = A.shape
    W = pack_rows(A).astype("<u8")
    lines = [f"gf2 {rows} {cols}"]
    lines += [W[i].tobytes().hex() for i in range(rows)]
    return "\n".join(lines) + "\n"


def dump_zq(A, q: int) -> str:
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    if A.size and (A.min() < 0 or A.max() >= q):
        raise ValueError("entries must be reduced mod q")
    rows, cols = A.shape
    dt = _zq_dtype(q)
    lines = [f"zq {rows} {cols} {q}"]
    lines += [A[i].astype(dt).tobytes().hex() for i in range(rows)]
    return "\n".join(lines) + "\n"


def load(text: str):
    """Parse either format; returns ``(matrix, q)`` with ``q = 2`` for GF(2)."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise FormatError("empty matrix text")
    head = lines[0].split()
    try:
        kind, rows, cols = head[0], int(head[1]), int(head[2])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"bad header {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(f"header announces {rows} rows, found {len(body)}")
    if kind == "gf2":
        if len(head) != 3:
            raise FormatError("gf2 header takes exactly rows and cols")
        words = max(1, (cols + 63) // 64)
        W = np.zeros((rows, words), dtype="<u8")
        for i, h in enumerate(body):
            raw = bytes.fromhex(h)
            if len(raw) != 8 * words:
                raise FormatError(f"row {i} has {len(raw)} bytes, expected {8 * words}")
            W[i] = np.frombuffer(raw, dtype="<u8")
        M = unpack_rows(W, cols) if rows else np.zeros((0, cols), dtype=np.uint8)
        if rows and cols % 64 and (W[:, -1] >> np.uint64(cols % 64)).any():
            raise FormatError("padding bits must be zero")
        return M, 2
    if kind == "zq":
        if len(head) != 4:
            raise FormatError("zq header takes rows, cols and q")
        q = int(head[3])
        dt = _zq_dtype(q)
        width = np.dtype(dt).itemsize * cols
        M = np.zeros((rows, cols), dtype=np.int64)
        for i, h in enumerate(body):
            raw = bytes.fromhex(h)
            if len(raw) != width:
                raise FormatError(f"row {i} has {len(raw)} bytes, expected {width}")
            M[i] = np.frombuffer(raw, dtype=dt).astype(np.int64)
        if M.size and M.max() >= q:
            raise FormatError("entry not reduced mod q")
        return M, q
    raise FormatError(f"unknown matrix kind {kind!r}")
