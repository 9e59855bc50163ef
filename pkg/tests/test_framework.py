from __future__ import annotations

import csv
import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from robustgap import RngStream, hardfn, lpn
from robustgap.algebra import Gf2Span, gf2_matmul, gf2_rank
from robustgap.framework import (
    BASELINES, BudgetViolation, CSV_COLUMNS, Classifier, InsufficientData, RandomFlips,
    SecretUnavailable, TaskInstance, Unsaturated, baseline_battery, coin_classifier, distance,
    evaluate, evaluator_pdf, first_bit_classifier, generator_sample, hoeffding_radius,
    rank_trajectory, reports_to_csv, reports_to_json, span_learner, train_baseline,
)
from robustgap.framework.task import Adversary


@pytest.fixture(scope="module")
def prf_task():
    return hardfn.make_task("prf", 16, RngStream(11).child("prf"))


@pytest.fixture(scope="module")
def avg_task():
    return hardfn.make_task("avgcase", 16, RngStream(12).child("avg"))


def full_rank_matrix(rng, n: int, m: int) -> np.ndarray:
    for i in itertools.count():
        A = rng.child(i).bits((n, m))
        if gf2_rank(A) == n:
            return A


# reports


def test_hoeffding_radius_at_1e4():
    # sqrt(ln(200) / 20000), computed by hand
    assert hoeffding_radius(10_000) == pytest.approx(0.016276, abs=5e-7)
    assert hoeffding_radius(1) == pytest.approx(np.sqrt(np.log(200) / 2))
    with pytest.raises(ValueError):
        hoeffding_radius(0)


def test_report_csv_and_json(prf_task, rng):
    r = evaluate(first_bit_classifier(), prf_task, None, 100, rng, threshold=1.0, exact=True)
    rows = list(csv.DictReader(io.StringIO(reports_to_csv([r]))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["estimate"] == "1.000000" and rows[0]["passed"] == "true"
    doc = json.loads(reports_to_json([r], {"k": 1}))
    assert doc["reports"][0]["successes"] == 100 and doc["header"] == {"k": 1}
    assert "PASS" in r.summary()


# evaluation


def test_perfect_classifier(prf_task, rng):
    r = evaluate(first_bit_classifier(), prf_task, None, 2000, rng, threshold=1.0, exact=True)
    assert r.estimate == 1.0 and r.passed


def test_coin_classifier_is_half(prf_task, rng):
    r = evaluate(coin_classifier(rng.child("coin")), prf_task, None, 10_000, rng)
    assert abs(r.estimate - 0.5) <= r.ci_radius


def test_advantage_metric(prf_task, rng):
    r = evaluate(first_bit_classifier(), prf_task, None, 1000, rng, metric="advantage")
    assert r.estimate == 0.5 and not r.passed


def test_budget_violation_detected(prf_task, rng):
    class Cheater(Adversary):
        name = "cheater"
        budget = 1

        def perturb_many(self, X, labels, rng):
            return X ^ 1

    with pytest.raises(BudgetViolation):
        evaluate(first_bit_classifier(), prf_task, Cheater(), 10, rng)


def test_random_flips_respect_budget(rng):
    X = rng.bits((500, 40))
    Xt = RandomFlips(7).perturb_many(X, np.zeros(500), rng.child("adv"))
    assert (distance(X, Xt, "hamming") == 7).all()


@pytest.mark.parametrize("workers", ["1", "2", "5"])
def test_evaluate_independent_of_workers(prf_task, monkeypatch, workers):
    clf = Classifier("parity", lambda X: X[:, 1:].sum(axis=1) % 2)
    monkeypatch.setenv("ROBUSTGAP_WORKERS", "1")
    ref = evaluate(clf, prf_task, RandomFlips(3), 5000, RngStream(9))
    monkeypatch.setenv("ROBUSTGAP_WORKERS", workers)
    got = evaluate(clf, prf_task, RandomFlips(3), 5000, RngStream(9))
    assert got.successes == ref.successes and got.to_row() == ref.to_row()


def test_distance_norms():
    assert distance([[0, 1, 1]], [[1, 1, 0]], "hamming").tolist() == [2]
    assert distance([[0, 5, 1]], [[16, 7, 1]], "linf", 17).tolist() == [2]
    with pytest.raises(ValueError):
        distance([[0]], [[0]], "l2")


def test_task_instance_and_secret_views(prf_task, rng):
    with pytest.raises(ValueError):
        TaskInstance(2, np.zeros(3))
    inst = prf_task.sample_labeled(1, rng)
    assert inst.label == 1 and inst.payload.shape == (prf_task.payload_len,)
    pub = prf_task.public()
    assert not pub.has_secret() and prf_task.has_secret()
    with pytest.raises(SecretUnavailable):
        pub.require_secret()


# class supports of the LPN-uniform family


@pytest.fixture(scope="module")
def lpn4():
    return lpn.make_task(lpn.LpnParams.no_efficient(4), RngStream(4).child("lpn4"))


def test_label0_in_rowspan_and_label1_shifted(lpn4, rng):
    labels = rng.bits(200)
    X = lpn4.sample_many(labels, rng.child("s"))
    span = Gf2Span(lpn4.A)
    X0 = X ^ labels[:, None]
    assert span.contains_many(X0).all()
    assert not span.contains_many(X[labels == 1]).any()


def test_supports_disjoint_exhaustive_n4(lpn4):
    coeffs = np.array(list(itertools.product((0, 1), repeat=4)), dtype=np.uint8)
    S0 = {r.tobytes() for r in gf2_matmul(coeffs, lpn4.A)}
    S1 = {r.tobytes() for r in gf2_matmul(coeffs, lpn4.A) ^ 1}
    assert lpn4.lpn.m == 32 and not S0 & S1


# span learner


def test_span_learned_from_2n_samples(rng):
    n, m = 32, 256
    A = full_rank_matrix(rng, n, m)
    X = gf2_matmul(rng.child("s").bits((2 * n, n)), A)
    model = span_learner(X, expected_rank=n)
    assert model.saturated and model.rank == n
    learned, true = model.span(), Gf2Span(A)
    assert learned.issubspace(true) and true.issubspace(learned)
    fresh_labels = rng.child("l").bits(1000)
    fresh = gf2_matmul(rng.child("f").bits((1000, n)), A) ^ fresh_labels[:, None]
    assert (model.classifier().predict(fresh) == fresh_labels).all()


def test_all_zero_samples_flagged():
    model = span_learner(np.zeros((10, 16), dtype=np.uint8), expected_rank=4)
    assert model.rank == 0 and model.insufficient
    with pytest.raises(Unsaturated):
        generator_sample(model, RngStream(0))
    with pytest.raises(Unsaturated):
        evaluator_pdf(model, np.zeros(16))


def test_partial_rank_flagged(rng):
    A = full_rank_matrix(rng, 8, 40)
    model = span_learner(A[:3], expected_rank=8)
    assert model.rank == 3 and model.insufficient


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from([2, 4096, 257]))
def test_rank_monotone(seed, q):
    rng = RngStream(seed)
    A = rng.integers(q, (5, 12))
    X = np.vstack([(rng.child("s").integers(q, (k % 3 + 1, 5)) @ A) % q for k in range(6)])
    traj = rank_trajectory(X, q)
    assert all(a <= b for a, b in zip(traj, traj[1:]))
    assert traj[-1] == span_learner(X, modulus=q).rank


def test_generator_uniform_over_span_n4(rng):
    A = full_rank_matrix(rng, 4, 16)
    coeffs = np.array(list(itertools.product((0, 1), repeat=4)), dtype=np.uint8)
    span = [r.tobytes() for r in gf2_matmul(coeffs, A)]
    model = span_learner(gf2_matmul(coeffs, A), expected_rank=4)
    G = generator_sample(model, rng.child("gen"), count=32_000)
    index = {v: i for i, v in enumerate(span)}
    counts = np.bincount([index[r.tobytes()] for r in G], minlength=16)
    assert counts.size == 16 and counts.sum() == 32_000
    assert stats.chisquare(counts).pvalue > 0.01


def test_evaluator_sums_to_one_n4(rng):
    A = full_rank_matrix(rng, 4, 16)
    model = span_learner(gf2_matmul(rng.child("s").bits((12, 4)), A), expected_rank=4)
    cube = np.array(list(itertools.product((0, 1), repeat=16)), dtype=np.uint8)
    inside = model.contains_many(cube)
    assert inside.sum() == 16
    assert sum(evaluator_pdf(model, y) for y in cube[inside]) == pytest.approx(1.0)
    assert evaluator_pdf(model, cube[~inside][0]) == 0.0


def test_generator_label1_offset(rng):
    A = full_rank_matrix(rng, 6, 48)
    labels = np.array([0] * 12 + [1] * 3)
    X = gf2_matmul(rng.child("s").bits((15, 6)), A) ^ labels[:, None]
    model = span_learner(X, labels, expected_rank=6, use_label1=True)
    G1 = generator_sample(model, rng.child("g"), label=1, count=50)
    assert not model.contains_many(G1).any()
    assert model.contains_many(G1 ^ 1).all()
    assert evaluator_pdf(model, G1[0], label=1) == 2.0**-6


def test_zq_span_learner(rng):
    q = 4096
    A = rng.integers(q, (6, 30))
    X = (rng.child("s").integers(q, (12, 6)) @ A) % q
    model = span_learner(X, modulus=q, expected_rank=6)
    assert model.saturated
    Y = generator_sample(model, rng.child("g"), count=20)
    assert model.contains_many(Y).all()
    shifted = (Y + q // 2) % q
    assert not model.contains_many(shifted).any()


# baselines


def test_majority_bit_unperturbed_prf(prf_task, rng):
    labels = rng.bits(400)
    X = prf_task.sample_many(labels, rng.child("train"))
    clf = train_baseline("majority-bit", X, labels)
    r = evaluate(clf, prf_task, None, 2000, rng.child("eval"))
    assert r.estimate == 1.0


def test_nearest_centroid_point_masses():
    X = np.array([[0, 0, 0, 0]] * 3 + [[1, 1, 0, 1]] * 3)
    y = np.array([0, 0, 0, 1, 1, 1])
    clf = train_baseline("nearest-centroid", X, y)
    assert clf.predict(X).tolist() == y.tolist()


def test_baselines_need_two_per_label():
    with pytest.raises(InsufficientData):
        train_baseline("majority-bit", np.zeros((3, 4)), np.array([0, 0, 1]))
    with pytest.raises(ValueError):
        train_baseline("svm", np.zeros((4, 4)), np.array([0, 0, 1, 1]))


def test_baselines_chance_on_zeroed_table_task(avg_task, rng):
    reports = baseline_battery(avg_task, hardfn.ZeroFirstBit(), 10_000, rng)
    assert [r.classifier for r in reports] == list(BASELINES)
    for r in reports:
        assert abs(r.estimate) <= 0.03, r.summary()
