from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robustgap import RngStream
from robustgap.ecc import DecodeFailure, choose_params, decode, ecc_build, encode, error_patterns


@pytest.fixture(scope="module")
def code8():
    return ecc_build(8)


@pytest.fixture(scope="module")
def code64():
    return ecc_build(64)


def all_messages(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)


def test_frozen_params_n64(code64):
    p = code64.params
    assert (p.symbol_bits, p.outer_dim, p.outer_len, p.code_len, p.radius) == (5, 13, 24, 744, 95)
    assert p.radius >= p.code_len // 8
    assert p.code_len <= 32 * 64


def test_frozen_params_n8(code8):
    p = code8.params
    assert (p.symbol_bits, p.outer_dim, p.outer_len, p.code_len, p.radius) == (3, 3, 4, 28, 3)


@pytest.mark.parametrize("n", [8, 9, 16, 33, 64, 100, 128])
def test_radius_profile(n):
    p = choose_params(n)
    assert p.code_len // 8 <= p.radius < p.code_len / 2
    assert p.code_len <= 32 * n
    # the guaranteed radius sits below half the designed distance
    assert 2 * p.radius + 1 < p.designed_distance


def test_message_too_short():
    with pytest.raises(ValueError):
        ecc_build(7)


def test_minimum_distance_exhaustive_n8(code8):
    C = code8.encode(all_messages(8))
    # linear code: the minimum distance is the least nonzero codeword weight
    w = C[1:].sum(axis=1)
    assert w.min() >= 2 * code8.radius + 1


def test_injective_n8(code8):
    C = code8.encode(all_messages(8))
    assert len({row.tobytes() for row in C}) == 256


def test_fast_and_reference_encoders_agree(code64, rng):
    X = rng.bits((20, 64))
    assert np.array_equal(code64.encode(X), np.stack([code64.encode_slow(x) for x in X]))


def test_encode_zero_is_stable(code64):
    assert not encode(code64, np.zeros(64, dtype=np.uint8)).any()
    assert np.array_equal(ecc_build(64).encode(np.ones(64, dtype=np.uint8)),
                          code64.encode(np.ones(64, dtype=np.uint8)))


def test_shapes_and_length_checks(code64, rng):
    X = rng.bits((100, 64))
    assert code64.encode(X).shape == (100, 744)
    with pytest.raises(ValueError):
        code64.encode(np.zeros(63, dtype=np.uint8))
    with pytest.raises(ValueError):
        code64.decode_many(np.zeros((1, 743), dtype=np.uint8))


def test_zero_noise_roundtrip(code64, rng):
    X = rng.bits((1000, 64))
    out, ok = code64.decode_many(code64.encode(X))
    assert ok.all() and np.array_equal(out, X)


@pytest.mark.parametrize("kind", ["random", "burst", "block", "mixed"])
def test_decodes_at_m_over_8(code64, rng, kind):
    X = rng.bits((1000, 64))
    w = code64.m // 8
    E = error_patterns(code64, w, rng.child("err"), 1000, kind)
    assert (E.sum(axis=1) == w).all()
    out, ok = code64.decode_many(code64.encode(X) ^ E)
    assert ok.all() and np.array_equal(out, X)


@pytest.mark.parametrize("kind", ["random", "burst", "block"])
def test_decodes_at_full_radius(code64, rng, kind):
    X = rng.bits((500, 64))
    E = error_patterns(code64, code64.radius, rng.child("err"), 500, kind)
    out, ok = code64.decode_many(code64.encode(X) ^ E)
    assert ok.all() and np.array_equal(out, X)


def test_every_pattern_within_radius_n8(code8):
    # all 3,683 error patterns of weight <= 3 against a few messages
    m = code8.m
    patterns = [np.zeros(m, dtype=np.uint8)]
    for w in range(1, code8.radius + 1):
        for pos in itertools.combinations(range(m), w):
            e = np.zeros(m, dtype=np.uint8)
            e[list(pos)] = 1
            patterns.append(e)
    E = np.stack(patterns)
    for x in all_messages(8)[::37]:
        out, ok = code8.decode_many(code8.encode(x)[None, :] ^ E)
        assert ok.all() and (out == x).all()


def test_beyond_radius_is_not_guaranteed(code8, rng):
    # randomized search for a pattern just beyond the radius that defeats the decoder
    x = np.zeros(8, dtype=np.uint8)
    found = None
    for delta in range(1, 6):
        E = rng.child(delta).fixed_weight(code8.m, code8.radius + delta, 4000)
        out, ok = code8.decode_many(E)
        bad = ~ok | (out != x).any(axis=1)
        if bad.any():
            found = delta
            break
    assert found is not None and found <= 5


def test_decode_failure_signal(code8):
    # halfway between two codewords at distance d is beyond every unique decoder
    C = code8.encode(all_messages(8))
    w = C.sum(axis=1)
    c = C[np.flatnonzero(w == w[1:].min())[0]]
    y = c.copy()
    y[np.flatnonzero(c)[: (int(c.sum()) + 1) // 2]] = 0
    try:
        got = decode(code8, y)
    except DecodeFailure:
        return
    # a best-effort answer must at least be one of the two nearest codewords
    assert got.tolist() in (all_messages(8)[0].tolist(),
                            all_messages(8)[np.flatnonzero(w == w[1:].min())[0]].tolist())


def test_decoder_is_deterministic(code64, rng):
    Y = code64.encode(rng.bits((50, 64))) ^ rng.child("e").fixed_weight(744, 120, 50)
    a = code64.decode_many(Y)
    b = code64.decode_many(Y.copy())
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@given(st.integers(0, 2**32), st.integers(0, 95))
def test_roundtrip_property(seed, w):
    code = ecc_build(64)
    rng = RngStream(seed)
    X = rng.bits((4, 64))
    E = error_patterns(code, w, rng.child("e"), 4, "random")
    out, ok = code.decode_many(code.encode(X) ^ E)
    assert ok.all() and np.array_equal(out, X)
