"""Binary error-correcting code with a constant-fraction unique-decoding radius."""
from __future__ import annotations

from .code import CodeParams, ConcatenatedCode, DecodeFailure, choose_params, decode, ecc_build, encode
from .patterns import error_patterns

__all__ = [
    "CodeParams", "ConcatenatedCode", "DecodeFailure", "choose_params", "decode",
    "ecc_build", "encode", "error_patterns",
]
