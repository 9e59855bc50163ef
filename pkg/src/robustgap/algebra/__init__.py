"""Finite-field and modular linear algebra plus samplers."""
from __future__ import annotations

from .gf2 import (
    DimensionMismatch,
    Elimination,
    Gf2Span,
    InconsistentSystem,
    gf2_eliminate,
    gf2_matmul,
    gf2_nullspace,
    gf2_rank,
    gf2_rowspan_contains,
    gf2_rref,
    gf2_sample_fixed_weight,
    pack_rows,
    unpack_rows,
)
from .samplers import RejectionCapExceeded, TruncGaussParams, trunc_gauss_centered, trunc_gauss_sample
from .zq import NonUnitPivot, Unsolvable, ZqSpan, centered, zq_matmul, zq_rref, zq_solve

__all__ = [
    "DimensionMismatch", "Elimination", "Gf2Span", "InconsistentSystem", "NonUnitPivot",
    "RejectionCapExceeded", "TruncGaussParams", "Unsolvable", "ZqSpan", "centered",
    "gf2_eliminate", "gf2_matmul", "gf2_nullspace", "gf2_rank", "gf2_rowspan_contains",
    "gf2_rref", "gf2_sample_fixed_weight", "pack_rows", "trunc_gauss_centered",
    "trunc_gauss_sample", "unpack_rows", "zq_matmul", "zq_rref", "zq_solve",
]
