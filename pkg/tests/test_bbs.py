from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from scipy.stats import binom

from robustgap import RngStream, bbs
from robustgap.bbs import (
    BallSearchStats, BbsKey, BlprTask, StateFlips, backward_parities, ball_search,
    ball_search_classifier, bbs_keygen, bbs_prg, bbs_trapdoor_distinguish, distinguisher_classifier,
    is_square, nominal_acceptance_rate, parse_output, principal_root, random_acceptance_rate,
    squaring_chain,
)
from robustgap.framework import distance, evaluate, first_bit_classifier
from robustgap.numtheory import factorize, is_prime


THREE_SIGMA_TAIL = 0.00135


@pytest.fixture(scope="module")
def key32():
    return bbs_keygen(32, RngStream(32).child("bbs-key"))


@pytest.fixture(scope="module")
def key24():
    return bbs_keygen(24, RngStream(24).child("bbs-key"))


def genuine(key, m, rng, count):
    out = []
    for _ in range(count):
        x0 = rng.randbelow(key.N)
        out.append(bbs_prg(key.N, x0, m).to_bits(key.bitlen))
    return np.stack(out)


# keys


def test_keys_are_blum_integers(rng):
    for i in range(100):
        k = bbs_keygen(32, rng.child(i))
        assert k.p % 4 == 3 and k.q % 4 == 3 and k.p != k.q and k.p * k.q == k.N
        assert is_prime(k.p) and is_prime(k.q)


def test_two_prime_factors_at_24_bits(key24):
    f = factorize(key24.N)
    assert sorted(f) == sorted([key24.p, key24.q]) and set(f.values()) == {1}


def test_keygen_deterministic():
    assert bbs_keygen(32, RngStream(1)) == bbs_keygen(32, RngStream(1))
    with pytest.raises(ValueError):
        bbs_keygen(12, RngStream(1))


def test_key_validation_and_serialization(key32):
    with pytest.raises(ValueError):
        BbsKey(22, 3, 7)
    with pytest.raises(ValueError):
        BbsKey(35, 5, 7)
    assert BbsKey.from_dicts(key32.to_dict(), key32.secret_dict()) == key32
    assert not BbsKey.from_dicts(key32.to_dict()).has_factors


# generator


def test_fixed_points(key32):
    one = bbs_prg(key32.N, 1, 16)
    assert one.y.tolist() == [1] * 15 and one.x_m == 1
    zero = bbs_prg(key32.N, 0, 16)
    assert not zero.y.any() and zero.x_m == 0
    assert not zero.to_bits(key32.bitlen).any()


def test_chain_suffix_recomputation(key32, rng):
    x0 = rng.randbelow(key32.N)
    xs = squaring_chain(key32.N, x0, 20)
    for i in range(1, 20):
        assert squaring_chain(key32.N, xs[i - 1], 20 - i) == xs[i:]


def test_output_layout(key32, rng):
    out = bbs_prg(key32.N, rng.randbelow(key32.N), 16)
    z = out.to_bits(key32.bitlen)
    assert z.size == 15 + key32.bitlen
    back = parse_output(z, 16, key32.bitlen)
    assert back.x_m == out.x_m and np.array_equal(back.y, out.y)
    with pytest.raises(bbs.ParseError):
        parse_output(z[:-1], 16, key32.bitlen)


def test_principal_root_roundtrip(key32, rng):
    for _ in range(1000):
        x = pow(rng.randbelow(key32.N), 2, key32.N)
        r = principal_root(key32, x)
        assert is_square(key32, r) and r * r % key32.N == x
        # squaring is a permutation of the squares, so the root of x^2 is x
        assert principal_root(key32, x * x % key32.N) == x


def test_backward_parities_match_forward(key32, rng):
    xs = squaring_chain(key32.N, rng.randbelow(key32.N), 16)
    par = backward_parities(key32, xs[-1], 15)
    assert par.tolist() == [x & 1 for x in xs[:-1]]


# distinguisher


def test_distinguisher_complete(key32, rng):
    Z = genuine(key32, 16, rng, 100)
    assert all(bbs_trapdoor_distinguish(key32, z, 16) == 1 for z in Z)


def test_distinguisher_sound_within_3_sigma(key32, rng):
    trials = 10_000
    Z = rng.bits((trials, 15 + key32.bitlen))
    accepted = sum(bbs_trapdoor_distinguish(key32, z, 16) for z in Z)
    # the expected count is below 1, so "within 3 sigma" is read as an exact binomial tail
    for rate in (nominal_acceptance_rate(16), random_acceptance_rate(key32, 16)):
        assert binom.sf(accepted - 1, trials, rate) >= THREE_SIGMA_TAIL
    assert accepted <= 0.01 * trials


def test_acceptance_rates(key32):
    assert nominal_acceptance_rate(16) == 0.25 * 2.0**-15
    squares = (key32.p + 1) // 2 * ((key32.q + 1) // 2)
    assert random_acceptance_rate(key32, 16) == squares / 2**key32.bitlen * 2.0**-15


def test_exact_square_count_small():
    k = BbsKey(7 * 11, 7, 11)
    squares = {x * x % 77 for x in range(77)}
    assert len(squares) == 4 * 6
    assert sum(is_square(k, x) for x in range(77)) == 24


def test_distinguisher_requires_factors(key32):
    with pytest.raises(PermissionError):
        bbs_trapdoor_distinguish(key32.public(), np.zeros(15 + key32.bitlen, np.uint8), 16)


# task and classifiers


@pytest.fixture(scope="module")
def task24(key24):
    return BlprTask(key24, 12, radius=2)


@pytest.fixture(scope="module")
def task32(key32):
    return BlprTask(key32, 16, radius=2)


def test_task_layout(task32, rng):
    X = task32.sample_many(np.array([0, 1, 0, 1], dtype=np.uint8), rng)
    assert X.shape == (4, 1 + 15 + task32.key_public.bitlen)
    assert X[:, 0].tolist() == [0, 1, 0, 1]


def test_first_bit_and_distinguisher(task32, rng):
    assert evaluate(first_bit_classifier(), task32, None, 2000, rng).estimate == 1.0
    r = evaluate(distinguisher_classifier(task32), task32, None, 2000, rng.child("d"), threshold=0.99)
    assert r.passed


def test_ball_search_c0_is_distinguisher(task24, rng):
    key = task24.secret
    Z = np.vstack([genuine(key, 12, rng, 50), rng.child("u").bits((50, 11 + key.bitlen))])
    for z in Z:
        assert ball_search(key, z, 12, 0) == bbs_trapdoor_distinguish(key, z, 12)


def test_ball_search_corrects_two_flips(task24, rng):
    key = task24.secret
    L = 11 + key.bitlen
    Z = genuine(key, 12, rng, 1000)
    F = rng.child("flips").fixed_weight(L, 2, 1000)
    assert all(ball_search(key, z, 12, 2) == 1 for z in Z ^ F)


def test_ball_search_corrects_state_flips(task32, rng):
    adv = StateFlips(2, task32.m, task32.key_public.bitlen)
    labels = np.zeros(300, dtype=np.uint8)
    X = task32.sample_many(labels, rng)
    Xt = adv.perturb_many(X, labels, rng.child("adv"))
    assert (distance(X, Xt, "hamming") == 2).all()
    assert (ball_search_classifier(task32, 2).predict(Xt) == 0).all()


def test_every_single_flip_small(task24, rng):
    key = task24.secret
    z = genuine(key, 12, rng, 1)[0]
    L = z.size
    for i, j in combinations(range(L), 2):
        y = z.copy()
        y[[i, j]] ^= 1
        assert ball_search(key, y, 12, 2) == 1
    assert all(ball_search(key, z ^ np.eye(L, dtype=np.uint8)[i], 12, 1) for i in range(L))


def test_ball_search_cost_grows_with_radius(task24, rng):
    key = task24.secret
    L = 11 + key.bitlen
    # a word rejected at the largest radius visits every state candidate of each ball
    for i in range(100):
        z = rng.child(i).bits(L)
        if not ball_search(key, z, 12, 3):
            break
    else:
        pytest.fail("no rejected word found")
    chains = []
    for c in range(4):
        st = BallSearchStats()
        assert ball_search(key, z, 12, c, st) == 0
        chains.append(st.chains)
    assert chains[0] < chains[1] < chains[2] < chains[3]
    assert chains == [bbs.ball_volume(key.bitlen, c) for c in range(4)]


def test_ball_volume():
    assert bbs.ball_volume(10, 2) == 1 + 10 + 45


def test_ball_radius_guard(task24):
    with pytest.raises(ValueError):
        ball_search(task24.secret, np.zeros(11 + 24, np.uint8), 12, 4)
