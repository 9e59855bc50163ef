"""Name-based construction of tasks, classifiers and adversaries, plus task files.

Task files come in pairs: a public document every command may read, and a
``*.secret.json`` document that only evaluator-side commands open.
"""
from __future__ import annotations

import numpy as np

from . import bbs, hardfn, lpn, lwe
from .algebra.serialize import dump_gf2, dump_zq, load
from .framework.task import (
    Adversary, Classifier, RandomFlips, TaskFamily, coin_classifier, constant_classifier,
    first_bit_classifier,
)
from .numtheory import is_prime

TASK_FORMAT = "robustgap-task/1"
SECRET_FORMAT = "robustgap-secret/1"
SAMPLES_FORMAT = "robustgap-samples/1"

FAMILIES = (
    "lpn-trapdoor", "lpn-uniform", "lwe-trapdoor", "lwe-uniform",
    "hardbit-prf", "hardbit-avgcase", "hardbit-owp", "bbs-blpr",
)
CLASSIFIERS = ("first-bit", "constant-0", "coin", "robust-E", "robust-T", "decode-check",
               "ball-search", "bbs-trapdoor", "brute-force")
ADVERSARIES = ("none", "hardness", "weight-eps", "fixed-weight", "random-flips", "column-concentrated",
               "chi", "sign-aligned", "zero-first-bit", "codeword-random", "codeword-burst",
               "codeword-block", "codeword-mixed", "state-flips")
# worst-case constructions that inspect the trapdoor; never reachable from learner-side commands
SECRET_ADVERSARIES = ("column-concentrated", "sign-aligned")


class FormatMismatch(ValueError):
    """A task, secret or samples document has the wrong format tag or family."""


class UnknownName(ValueError):
    pass


def _opt(opts: dict, key: str, default=None):
    v = opts.get(key)
    return default if v is None else v


def build_task(family: str, opts: dict, rng) -> TaskFamily:
    if family in ("lpn-trapdoor", "lpn-uniform"):
        n = int(_opt(opts, "n", 144 if family == "lpn-trapdoor" else 8))
        if family == "lpn-trapdoor":
            params = lpn.LpnParams.trapdoor(n, opts.get("t"), opts.get("eps"))
        else:
            params = lpn.LpnParams.no_efficient(n)
        return lpn.make_task(params, rng)
    if family in ("lwe-trapdoor", "lwe-uniform"):
        regime = "trapdoor" if family == "lwe-trapdoor" else "no-efficient"
        params = lwe.LweParams.make(int(_opt(opts, "n", 16)), regime, opts.get("q"), opts.get("m"))
        return lwe.make_task(params, rng)
    if family.startswith("hardbit-"):
        return hardfn.make_task(family.split("-", 1)[1], int(_opt(opts, "n", hardfn.DEFAULT_N)), rng)
    if family == "bbs-blpr":
        return bbs.make_task(int(_opt(opts, "bits", 32)), int(_opt(opts, "m", 16)), rng,
                             int(_opt(opts, "radius", 2)))
    raise UnknownName(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def family_class(family: str):
    if family == "lpn-trapdoor":
        return lpn.LpnDualTask
    if family == "lpn-uniform":
        return lpn.LpnUniformTask
    if family.startswith("lwe-"):
        return lwe.LweTask
    if family.startswith("hardbit-"):
        return hardfn.HardBitTask
    if family == "bbs-blpr":
        return bbs.BlprTask
    raise UnknownName(f"unknown family {family!r}")


def task_documents(task: TaskFamily) -> tuple[dict, dict | None]:
    pub = {"format": TASK_FORMAT, "family": task.family, "public": task.public_dict()}
    if not task.has_secret():
        return pub, None
    return pub, {"format": SECRET_FORMAT, "family": task.family, "secret": task.secret_dict()}


def load_task(pub: dict, sec: dict | None = None) -> TaskFamily:
    if pub.get("format") != TASK_FORMAT:
        raise FormatMismatch(f"task document format {pub.get('format')!r}, expected {TASK_FORMAT!r}")
    family = pub.get("family")
    if family not in FAMILIES:
        raise FormatMismatch(f"unknown family {family!r}")
    if sec is not None:
        if sec.get("format") != SECRET_FORMAT:
            raise FormatMismatch(f"secret document format {sec.get('format')!r}, expected {SECRET_FORMAT!r}")
        if sec.get("family") != family:
            raise FormatMismatch(f"secret belongs to {sec.get('family')!r}, task is {family!r}")
    return family_class(family).from_dicts(pub["public"], sec["secret"] if sec else None)


def samples_document(task: TaskFamily, labels, X) -> dict:
    q = task.modulus
    text = dump_gf2(X) if q == 2 else dump_zq(X, q)
    return {"format": SAMPLES_FORMAT, "family": task.family, "labels": [int(b) for b in labels],
            "payloads": text}


def load_samples(doc: dict, task: TaskFamily) -> tuple[np.ndarray, np.ndarray]:
    if doc.get("format") != SAMPLES_FORMAT:
        raise FormatMismatch(f"samples document format {doc.get('format')!r}, expected {SAMPLES_FORMAT!r}")
    if doc.get("family") != task.family:
        raise FormatMismatch(f"samples belong to {doc.get('family')!r}, task is {task.family!r}")
    X, _ = load(doc["payloads"])
    labels = np.asarray(doc["labels"], dtype=np.uint8)
    if X.shape != (labels.size, task.payload_len):
        raise FormatMismatch(f"payload matrix {X.shape} does not match {labels.size} x {task.payload_len}")
    return labels, X


def make_classifier(name: str, task: TaskFamily, rng=None) -> Classifier:
    if name == "first-bit":
        return first_bit_classifier()
    if name == "constant-0":
        return constant_classifier(0)
    if name == "coin":
        return coin_classifier(rng)
    if name == "robust-E" and isinstance(task, lpn.LpnDualTask):
        return lpn.trapdoor_classifier(task)
    if name == "robust-T" and isinstance(task, lwe.LweTask):
        return lwe.trapdoor_classifier(task)
    if name == "decode-check" and isinstance(task, hardfn.HardBitTask):
        return hardfn.decode_check_classifier(task)
    if name == "ball-search" and isinstance(task, bbs.BlprTask):
        return bbs.ball_search_classifier(task)
    if name == "bbs-trapdoor" and isinstance(task, bbs.BlprTask):
        return bbs.distinguisher_classifier(task)
    if name == "brute-force" and isinstance(task, (lpn.LpnDualTask, lpn.LpnUniformTask)):
        return lpn.BruteForceOracle(task, task.lpn.t).classifier()
    raise UnknownName(f"classifier {name!r} is not available for {task.family}")


def make_adversary(name: str, task: TaskFamily, rng, budget: int | None = None) -> Adversary | None:
    if name == "none":
        return None
    if name == "random-flips":
        return RandomFlips(task.budget if budget is None else budget)
    if isinstance(task, (lpn.LpnDualTask, lpn.LpnUniformTask)):
        p = task.lpn
        if name == "hardness":
            return lpn.hardness_adversary(p)
        if name == "weight-eps":
            return lpn.FixedWeightAdversary(p.eps, p.eps)
        if name == "fixed-weight":
            return lpn.FixedWeightAdversary(p.eps if budget is None else budget, p.eps)
        if name == "column-concentrated":
            return lpn.ColumnConcentratedAdversary(task.require_secret().E, p.eps if budget is None else budget,
                                                   rng.child("column-concentrated"))
    if isinstance(task, lwe.LweTask):
        if name in ("hardness", "chi"):
            return lwe.ChiAdversary(task.lwe.chi)
        if name == "sign-aligned":
            eps = task.robust_radius() if budget is None else budget
            return lwe.SignAlignedAdversary(task.require_secret(), eps, task.lwe.q)
    if isinstance(task, hardfn.HardBitTask):
        if name in ("hardness", "zero-first-bit"):
            return hardfn.ZeroFirstBit()
        if name.startswith("codeword-"):
            return hardfn.CodewordNoise(task.code, budget, name.split("-", 1)[1])
    if isinstance(task, bbs.BlprTask):
        if name == "hardness":
            return RandomFlips(task.radius)
        if name == "state-flips":
            return bbs.StateFlips(task.radius if budget is None else budget, task.m, task.key_public.bitlen)
    raise UnknownName(f"adversary {name!r} is not available for {task.family}")


def verify_task(task: TaskFamily, rng) -> list[str]:
    """Well-formedness and trapdoor identities; returns named violations."""
    problems: list[str] = []
    if isinstance(task, (lpn.LpnDualTask, lpn.LpnUniformTask)):
        if not task.well_formed():
            problems.append("well-formed: shift vector lies in the class-0 support")
        if isinstance(task, lpn.LpnDualTask) and task.has_secret():
            problems += task.secret.verify(task.H)
    elif isinstance(task, lwe.LweTask):
        if not task.well_formed():
            problems.append("well-formed: shift vector not certified outside the row space")
        if task.has_secret():
            problems += lwe.verify_trapdoor(task.A, task.secret, task.lwe.q).problems
    elif isinstance(task, hardfn.HardBitTask):
        if task.has_secret():
            labels = rng.child("labels").bits(64)
            X = task.sample_many(labels, rng.child("sample"))
            pred = hardfn.robust_decode_check(task, X)
            if (pred != labels).any():
                problems.append("construction identity: decoded hard bit disagrees with the label")
    elif isinstance(task, bbs.BlprTask):
        if task.has_secret():
            key = task.secret
            if not (is_prime(key.p) and is_prime(key.q)):
                problems.append("key: a factor is not prime")
    return problems
