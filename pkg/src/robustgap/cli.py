"""Command-line driver.

Exit codes: 0 when every reported check passes, 2 when one fails, 1 on
usage, format or configuration errors. Learner- and adversary-side verbs
(``perturb``, ``learn``) refuse to open secret documents.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from . import experiments as ex
from .converse import (
    FARNESS, advantage_battery, battery_passed, premise_report, train_learner, tv_lower_bound, tv_report,
)
from .framework.evaluate import evaluate
from .framework.learners import BASELINES
from .framework.report import reports_to_csv, reports_to_json
from .rng import RngStream

DEFAULT_CLASSIFIER = {
    "lpn-trapdoor": "robust-E", "lwe-trapdoor": "robust-T", "hardbit-prf": "decode-check",
    "hardbit-avgcase": "decode-check", "hardbit-owp": "decode-check", "bbs-blpr": "ball-search",
    "lpn-uniform": "brute-force", "lwe-uniform": "constant-0",
}
LEARNERS = BASELINES + ("span-learner",)


class CliError(Exception):
    pass


class SecretPolicyError(CliError):
    pass


# --------------------------------------------------------------------------
# io helpers


def parse_seed(text) -> RngStream:
    if isinstance(text, int):
        return RngStream(text)
    s = str(text).strip().lower()
    if s.startswith("0x"):
        return RngStream(int(s, 16))
    try:
        return RngStream(int(s))
    except ValueError:
        raise CliError(f"seed {text!r} is neither a decimal integer nor 0x-prefixed hex") from None


def read_json(path, *, allow_secret: bool = True) -> dict:
    path = Path(path)
    if not allow_secret and path.name.endswith(".secret.json"):
        raise SecretPolicyError(f"refusing to read secret file {path}")
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise CliError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not allow_secret and isinstance(doc, dict) and doc.get("format") == ex.SECRET_FORMAT:
        raise SecretPolicyError(f"refusing to read secret document {path}")
    return doc


def write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_task_files(task_path, secret_path=None, *, allow_secret: bool = True):
    pub = read_json(task_path, allow_secret=allow_secret)
    sec = read_json(secret_path) if secret_path else None
    return ex.load_task(pub, sec)


# --------------------------------------------------------------------------
# verbs


def cmd_gen_task(args) -> int:
    rng = parse_seed(args.seed)
    opts = {k: getattr(args, k) for k in ("n", "t", "eps", "q", "m", "bits", "radius")}
    task = ex.build_task(args.family, opts, rng.child("task"))
    pub, sec = ex.task_documents(task)
    out = Path(args.out)
    write_text(out / "task.json", dump_json(pub))
    written = [out / "task.json"]
    if sec is not None:
        write_text(out / "task.secret.json", dump_json(sec))
        written.append(out / "task.secret.json")
    if args.samples:
        labels = rng.child("samples", "labels").bits(args.samples)
        X = task.sample_many(labels, rng.child("samples", "payloads"))
        write_text(out / "samples.json", dump_json(ex.samples_document(task, labels, X)))
        written.append(out / "samples.json")
    for p in written:
        print(p)
    return 0


def cmd_perturb(args) -> int:
    task = load_task_files(args.task, allow_secret=False)
    if args.adversary in ex.SECRET_ADVERSARIES:
        raise SecretPolicyError(f"adversary {args.adversary!r} needs the trapdoor; use eval instead")
    labels, X = ex.load_samples(read_json(args.samples, allow_secret=False), task)
    rng = parse_seed(args.seed)
    adv = ex.make_adversary(args.adversary, task, rng, args.budget)
    Xt = X if adv is None else adv.perturb_many(X, labels, rng.child("perturb"))
    write_text(args.out, dump_json(ex.samples_document(task, labels, Xt)))
    print(args.out)
    return 0


def cmd_classify(args) -> int:
    task = load_task_files(args.task, args.secret)
    labels, X = ex.load_samples(read_json(args.samples, allow_secret=False), task)
    clf = ex.make_classifier(args.classifier, task, parse_seed(args.seed))
    pred = clf.predict(X)
    acc = float((pred == labels).mean()) if labels.size else 0.0
    doc = {"classifier": clf.name, "family": task.family, "accuracy": round(acc, 12),
           "predictions": [int(v) for v in pred]}
    if args.out:
        write_text(args.out, dump_json(doc))
    print(f"{clf.name}: accuracy {acc:.6f} over {labels.size} samples")
    return 0


def cmd_learn(args) -> int:
    task = load_task_files(args.task, allow_secret=False)
    labels, X = ex.load_samples(read_json(args.samples, allow_secret=False), task)
    cut = int(round(args.train_frac * labels.size))
    if not 0 < cut < labels.size:
        raise CliError("train fraction leaves no training or no held-out samples")
    clf = train_learner(args.learner, X[:cut], labels[:cut], task.modulus)
    acc = float((clf.predict(X[cut:]) == labels[cut:]).mean())
    doc = {"learner": args.learner, "family": task.family, "train": cut,
           "held_out": int(labels.size - cut), "accuracy": round(acc, 12)}
    if args.out:
        write_text(args.out, dump_json(doc))
    print(f"{args.learner}: held-out accuracy {acc:.6f} ({labels.size - cut} samples)")
    return 0


def _eval_reports(task, entry: dict, rng, index: int):
    """Reports for one experiment entry, plus its pass flag."""
    kind = entry["kind"]
    trials = int(entry["trials"])
    stream = rng.child("experiment", index, kind)
    adv = ex.make_adversary(entry.get("adversary", "hardness"), task, stream, entry.get("budget"))
    if kind == "eval":
        clf = ex.make_classifier(entry.get("classifier", DEFAULT_CLASSIFIER[task.family]), task,
                                 stream.child("classifier"))
        r = evaluate(clf, task, adv, trials, stream.child("trials"), threshold=entry.get("threshold"),
                     exact=bool(entry.get("exact", False)))
        return [r], r.passed is not False
    if kind == "battery":
        reps = advantage_battery(task, adv, trials, stream, learners=LEARNERS)
        return reps, battery_passed(reps)
    clf = ex.make_classifier(entry.get("classifier", DEFAULT_CLASSIFIER[task.family]), task,
                             stream.child("classifier"))
    bound = tv_lower_bound(clf, task, adv, trials, stream.child("tv"), entry.get("threshold", FARNESS))
    reps = [tv_report(bound, clf, task, adv, stream.child("tv"))]
    battery = advantage_battery(task, adv, trials, stream.child("battery"), learners=LEARNERS)
    return reps + battery, bound.passed and battery_passed(battery)


def cmd_eval(args) -> int:
    task = load_task_files(args.task, args.secret)
    rng = parse_seed(args.seed)
    entry = {"kind": "eval", "classifier": args.classifier, "adversary": args.adversary,
            "budget": args.budget, "trials": args.trials, "threshold": args.threshold, "exact": args.exact}
    reports, ok = _eval_reports(task, entry, rng, 0)
    _write_reports(reports, args.csv, args.json, {"command": "eval", "seed": rng.seed_hex})
    for r in reports:
        print(r.summary())
    return 0 if ok else 2


def cmd_converse(args) -> int:
    task = load_task_files(args.task, args.secret)
    rng = parse_seed(args.seed)
    clf = ex.make_classifier(args.classifier or DEFAULT_CLASSIFIER[task.family], task, rng.child("classifier"))
    adv = ex.make_adversary(args.adversary, task, rng.child("adversary"), args.budget)
    doc = premise_report(task, clf, adv, args.trials, rng.child("converse"), threshold=args.threshold)
    text = dump_json(doc)
    if args.out:
        write_text(args.out, text)
    tv = doc["tv_lower_bound"]
    print(f"tv lower bound {tv['estimate']:.4f} - {tv['ci_radius']:.4f} vs {tv['threshold']}: "
          f"{'PASS' if tv['passed'] else 'FAIL'}")
    print(f"battery: {'PASS' if doc['battery_passed'] else 'FAIL'}")
    return 0 if doc["premises_hold"] else 2


def cmd_verify(args) -> int:
    pub = read_json(args.task)
    sec = read_json(args.secret) if args.secret else None
    try:
        task = ex.load_task(pub, sec)
    except ex.FormatMismatch:
        raise
    except (ValueError, KeyError) as exc:
        print(f"FAIL secret: {exc}")
        return 2
    problems = ex.verify_task(task, parse_seed(args.seed))
    for p in problems:
        print(f"FAIL {p}")
    if not problems:
        print(f"PASS {task.family}" + ("" if task.has_secret() else " (public part only)"))
    return 2 if problems else 0


def load_config(path) -> dict:
    doc = read_json(path)
    schema = json.loads(resources.files("robustgap").joinpath("schemas/config.json").read_text())
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        lines = [f"{path}: at /{'/'.join(str(p) for p in e.path)}: {e.message}" for e in errors]
        raise CliError("invalid configuration\n" + "\n".join(lines))
    return doc


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    base = Path(args.config).resolve().parent
    rng = parse_seed(cfg["seed"])
    fam = dict(cfg["family"])
    task = ex.build_task(fam.pop("id"), fam, rng.child("task"))
    reports, ok = [], True
    for i, entry in enumerate(cfg["experiments"]):
        reps, passed = _eval_reports(task, entry, rng, i)
        reports += reps
        ok &= passed
    out = cfg["output"]
    _write_reports(reports, base / out["csv"], base / out["json"], {"config": cfg})
    for r in reports:
        print(r.summary())
    return 0 if ok else 2


def _write_reports(reports, csv_path, json_path, header: dict):
    if csv_path:
        write_text(csv_path, reports_to_csv(reports))
    if json_path:
        write_text(json_path, reports_to_json(reports, header))


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robustgap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-task", help="build a task; writes task.json and task.secret.json")
    g.add_argument("--family", required=True, choices=ex.FAMILIES)
    for name in ("n", "t", "eps", "q", "m", "bits", "radius"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--seed", required=True)
    g.add_argument("--out", default=".")
    g.add_argument("--samples", type=int, default=0, help="also write this many labeled samples")
    g.set_defaults(fn=cmd_gen_task)

    p = sub.add_parser("perturb", help="apply a public adversary to a samples file")
    p.add_argument("--task", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--adversary", required=True, choices=ex.ADVERSARIES)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_perturb)

    c = sub.add_parser("classify", help="label a samples file")
    c.add_argument("--task", required=True)
    c.add_argument("--secret")
    c.add_argument("--classifier", required=True, choices=ex.CLASSIFIERS)
    c.add_argument("--samples", required=True)
    c.add_argument("--seed", default="0")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_classify)

    lr = sub.add_parser("learn", help="train a learner on part of a samples file, score the rest")
    lr.add_argument("--task", required=True)
    lr.add_argument("--samples", required=True)
    lr.add_argument("--learner", required=True, choices=LEARNERS)
    lr.add_argument("--train-frac", type=float, default=0.5)
    lr.add_argument("--out")
    lr.set_defaults(fn=cmd_learn)

    e = sub.add_parser("eval", help="Monte-Carlo accuracy of a classifier under an adversary")
    e.add_argument("--task", required=True)
    e.add_argument("--secret")
    e.add_argument("--classifier", required=True, choices=ex.CLASSIFIERS)
    e.add_argument("--adversary", default="none", choices=ex.ADVERSARIES)
    e.add_argument("--budget", type=int)
    e.add_argument("--trials", type=int, default=10000)
    e.add_argument("--threshold", type=float)
    e.add_argument("--exact", action="store_true", help="compare the estimate to the threshold without slack")
    e.add_argument("--seed", required=True)
    e.add_argument("--csv")
    e.add_argument("--json")
    e.set_defaults(fn=cmd_eval)

    v = sub.add_parser("converse", help="farness and indistinguishability premise report")
    v.add_argument("--task", required=True)
    v.add_argument("--secret", required=True)
    v.add_argument("--classifier", choices=ex.CLASSIFIERS)
    v.add_argument("--adversary", default="hardness", choices=ex.ADVERSARIES)
    v.add_argument("--budget", type=int)
    v.add_argument("--trials", type=int, default=10000)
    v.add_argument("--threshold", type=float, default=FARNESS)
    v.add_argument("--seed", required=True)
    v.add_argument("--out")
    v.set_defaults(fn=cmd_converse)

    f = sub.add_parser("verify", help="check well-formedness and trapdoor identities")
    f.add_argument("--task", required=True)
    f.add_argument("--secret")
    f.add_argument("--seed", default="0")
    f.set_defaults(fn=cmd_verify)

    r = sub.add_parser("run", help="run every experiment of a JSON configuration")
    r.add_argument("--config", required=True)
    r.set_defaults(fn=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, ValueError, KeyError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
