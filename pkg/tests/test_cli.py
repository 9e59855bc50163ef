from __future__ import annotations

import csv as csv_mod
import io
import json
import subprocess
import sys

import pytest

from robustgap.algebra.serialize import dump_gf2, load
from robustgap.cli import main
from robustgap.framework.report import CSV_COLUMNS


def gen(tmp_path, family, *extra, seed="7", samples=0):
    out = tmp_path / family
    args = ["gen-task", "--family", family, "--seed", seed, "--out", str(out), *extra]
    if samples:
        args += ["--samples", str(samples)]
    assert main(args) == 0
    return out


@pytest.fixture(scope="module")
def lpn_dir(tmp_path_factory):
    return gen(tmp_path_factory.mktemp("cli"), "lpn-trapdoor", "--n", "144", samples=200)


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def config(tmp_path, **over):
    doc = {
        "version": "robustgap-config/1", "seed": 11,
        "family": {"id": "lpn-trapdoor", "n": 144},
        "experiments": [{"kind": "eval", "classifier": "robust-E", "adversary": "weight-eps", "trials": 2000},
                        {"kind": "battery", "trials": 500}],
        "output": {"csv": "out/report.csv", "json": "out/report.json"},
    }
    doc.update(over)
    return write(tmp_path / "config.json", doc)


# gen-task and verify


def test_gen_task_writes_public_and_secret(lpn_dir):
    pub = json.loads((lpn_dir / "task.json").read_text())
    sec = json.loads((lpn_dir / "task.secret.json").read_text())
    assert pub["format"] == "robustgap-task/1" and pub["family"] == "lpn-trapdoor"
    assert sec["format"] == "robustgap-secret/1"
    assert set(pub["public"]) == {"H", "params"} and "E" in sec["secret"]
    assert (lpn_dir / "samples.json").exists()


def test_gen_task_deterministic(tmp_path):
    a = gen(tmp_path / "a", "bbs-blpr", "--bits", "24", "--m", "12")
    b = gen(tmp_path / "b", "bbs-blpr", "--bits", "24", "--m", "12")
    for name in ("task.json", "task.secret.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_uniform_family_has_no_secret(tmp_path):
    out = gen(tmp_path, "lwe-uniform", "--n", "4")
    assert (out / "task.json").exists() and not (out / "task.secret.json").exists()


@pytest.mark.parametrize("family,extra", [
    ("lpn-trapdoor", ["--n", "144"]), ("lpn-uniform", ["--n", "8"]), ("lwe-trapdoor", ["--n", "16"]),
    ("hardbit-prf", []), ("hardbit-owp", []), ("bbs-blpr", ["--bits", "24", "--m", "12"]),
])
def test_verify_fresh_task(tmp_path, capsys, family, extra):
    out = gen(tmp_path, family, *extra)
    secret = ["--secret", str(out / "task.secret.json")] if (out / "task.secret.json").exists() else []
    assert main(["verify", "--task", str(out / "task.json"), *secret]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_corrupted_secret(tmp_path, capsys):
    out = gen(tmp_path, "lwe-trapdoor", "--n", "16")
    sec = json.loads((out / "task.secret.json").read_text())
    blob = sec["secret"]["T"]
    sec["secret"]["T"] = blob.replace("1", "2", 1) if "1" in blob else blob.replace("0", "1", 1)
    write(out / "task.secret.json", sec)
    code = main(["verify", "--task", str(out / "task.json"), "--secret", str(out / "task.secret.json")])
    text = capsys.readouterr().out
    assert code == 2 and "FAIL" in text


def test_verify_corrupted_lpn_secret_names_identity(tmp_path, capsys, lpn_dir):
    sec = json.loads((lpn_dir / "task.secret.json").read_text())
    E, _ = load(sec["secret"]["E"])
    E[0, :] ^= 1
    sec["secret"]["E"] = dump_gf2(E)
    bad = write(tmp_path / "bad.secret.json", sec)
    code = main(["verify", "--task", str(lpn_dir / "task.json"), "--secret", str(bad)])
    text = capsys.readouterr().out
    assert code == 2 and "FAIL" in text and "rowspan" in text.lower()


def test_version_mismatch_is_schema_error(tmp_path, capsys, lpn_dir):
    pub = json.loads((lpn_dir / "task.json").read_text())
    pub["format"] = "robustgap-task/0"
    bad = write(tmp_path / "task.json", pub)
    assert main(["verify", "--task", str(bad)]) == 1
    assert "format" in capsys.readouterr().err


def test_malformed_json_has_line_diagnostic(tmp_path, capsys):
    bad = tmp_path / "task.json"
    bad.write_text('{\n  "format": \n}')
    assert main(["verify", "--task", str(bad)]) == 1
    assert f"{bad}:3:" in capsys.readouterr().err


# learner-side verbs and the secret policy


def test_perturb_and_classify(tmp_path, capsys, lpn_dir):
    out = tmp_path / "pert.json"
    assert main(["perturb", "--task", str(lpn_dir / "task.json"), "--samples", str(lpn_dir / "samples.json"),
                 "--adversary", "weight-eps", "--seed", "3", "--out", str(out)]) == 0
    assert main(["classify", "--task", str(lpn_dir / "task.json"), "--secret", str(lpn_dir / "task.secret.json"),
                 "--classifier", "robust-E", "--samples", str(out), "--out", str(tmp_path / "c.json")]) == 0
    assert json.loads((tmp_path / "c.json").read_text())["accuracy"] == 1.0


def test_perturb_refuses_secret(tmp_path, capsys, lpn_dir):
    code = main(["perturb", "--task", str(lpn_dir / "task.secret.json"), "--samples",
                 str(lpn_dir / "samples.json"), "--adversary", "weight-eps", "--seed", "3",
                 "--out", str(tmp_path / "x.json")])
    assert code == 1 and "secret" in capsys.readouterr().err
    renamed = tmp_path / "innocent.json"
    renamed.write_bytes((lpn_dir / "task.secret.json").read_bytes())
    code = main(["perturb", "--task", str(renamed), "--samples", str(lpn_dir / "samples.json"),
                 "--adversary", "weight-eps", "--seed", "3", "--out", str(tmp_path / "x.json")])
    assert code == 1 and "secret" in capsys.readouterr().err


def test_perturb_refuses_trapdoor_adversary(tmp_path, capsys, lpn_dir):
    code = main(["perturb", "--task", str(lpn_dir / "task.json"), "--samples", str(lpn_dir / "samples.json"),
                 "--adversary", "column-concentrated", "--seed", "3", "--out", str(tmp_path / "x.json")])
    assert code == 1 and "trapdoor" in capsys.readouterr().err


def test_learn_refuses_secret(capsys, lpn_dir):
    code = main(["learn", "--task", str(lpn_dir / "task.secret.json"), "--samples",
                 str(lpn_dir / "samples.json"), "--learner", "span-learner"])
    assert code == 1 and "secret" in capsys.readouterr().err
    code = main(["learn", "--task", str(lpn_dir / "task.json"), "--samples",
                 str(lpn_dir / "task.secret.json"), "--learner", "span-learner"])
    assert code == 1


def test_learn_runs(tmp_path, lpn_dir):
    out = tmp_path / "learn.json"
    assert main(["learn", "--task", str(lpn_dir / "task.json"), "--samples", str(lpn_dir / "samples.json"),
                 "--learner", "span-learner", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["train"] == 100 and doc["held_out"] == 100


# eval and converse


def test_eval_robust_E(tmp_path, capsys, lpn_dir):
    csv = tmp_path / "r.csv"
    code = main(["eval", "--task", str(lpn_dir / "task.json"), "--secret", str(lpn_dir / "task.secret.json"),
                 "--classifier", "robust-E", "--adversary", "weight-eps", "--trials", "10000",
                 "--threshold", "0.99", "--seed", "5", "--csv", str(csv)])
    assert code == 0
    reader = csv_mod.DictReader(io.StringIO(csv.read_text()))
    rec = next(reader)
    assert reader.fieldnames == list(CSV_COLUMNS)
    assert float(rec["estimate"]) == 1.0 and rec["passed"].lower() == "true"


def test_eval_fail_band_exit_2(lpn_dir):
    code = main(["eval", "--task", str(lpn_dir / "task.json"), "--classifier", "constant-0",
                 "--trials", "1000", "--threshold", "0.99", "--seed", "5"])
    assert code == 2


def test_eval_without_secret_errors(capsys, lpn_dir):
    code = main(["eval", "--task", str(lpn_dir / "task.json"), "--classifier", "robust-E",
                 "--trials", "100", "--seed", "5"])
    assert code == 1


def test_converse_report(tmp_path, lpn_dir):
    out = tmp_path / "conv.json"
    code = main(["converse", "--task", str(lpn_dir / "task.json"), "--secret", str(lpn_dir / "task.secret.json"),
                 "--trials", "1000", "--seed", "2", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert code == 0 and doc["premises_hold"]
    assert {"family", "classifier", "tv_lower_bound", "battery"} <= doc.keys()


def test_unknown_classifier_for_family(capsys, lpn_dir):
    code = main(["eval", "--task", str(lpn_dir / "task.json"), "--secret", str(lpn_dir / "task.secret.json"),
                 "--classifier", "ball-search", "--trials", "10", "--seed", "5"])
    assert code == 1 and "not available" in capsys.readouterr().err


# run and the configuration schema


def test_run_deterministic(tmp_path):
    cfg = config(tmp_path)
    assert main(["run", "--config", str(cfg)]) == 0
    first = [(tmp_path / "out" / f).read_bytes() for f in ("report.csv", "report.json")]
    assert main(["run", "--config", str(cfg)]) == 0
    assert first == [(tmp_path / "out" / f).read_bytes() for f in ("report.csv", "report.json")]


def test_run_rejects_unknown_field(tmp_path, capsys):
    assert main(["run", "--config", str(config(tmp_path, colour="blue"))]) == 1
    assert "colour" in capsys.readouterr().err


def test_run_requires_seed(tmp_path, capsys):
    cfg = config(tmp_path)
    doc = json.loads(cfg.read_text())
    del doc["seed"]
    write(cfg, doc)
    assert main(["run", "--config", str(cfg)]) == 1
    assert "seed" in capsys.readouterr().err


def test_run_rejects_version_mismatch(tmp_path, capsys):
    assert main(["run", "--config", str(config(tmp_path, version="robustgap-config/2"))]) == 1
    assert "/version" in capsys.readouterr().err


def test_run_nested_field_diagnostic(tmp_path, capsys):
    cfg = config(tmp_path, experiments=[{"kind": "eval", "trials": 0}])
    assert main(["run", "--config", str(cfg)]) == 1
    assert "/experiments/0/trials" in capsys.readouterr().err


def test_bad_seed(tmp_path, capsys):
    assert main(["gen-task", "--family", "hardbit-prf", "--seed", "xyz", "--out", str(tmp_path)]) == 1


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "robustgap.cli", "verify", "--task", str(tmp_path / "none.json")],
                         capture_output=True, text=True)
    assert res.returncode == 1 and "no such file" in res.stderr
