import json

import pytest

from cutwords.cli import DEFAULT_SEED, main

BASE_CFG = {
    "letter_law": {"alphabet": "ab", "probs": [0.5, 0.5]},
    "renewal_law": {"alpha": 2.0, "cap": 4},
    "word_law": {"variant": "iid", "words": ["a", "bb"], "probs": [0.5, 0.5]},
    "neighbourhood": {
        "constraints": [{"pattern": ["a"], "low": 0.5, "high": 1.0}]
    },
    "target_law": {"alphabet": "ab", "probs": [0.3, 0.7]},
    "X": "abbaabbaabbaabba",
}


@pytest.fixture()
def cfg_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(BASE_CFG))
    return str(path)


def run(argv):
    return main(argv)


def test_success_exit_code(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "rate.csv")
    code = run(["rate", "--config", cfg_path, "--alpha", "2.0",
                "--depth", "6", "--out", out])
    assert code == 0
    assert capsys.readouterr().out.strip()


def test_missing_param_exit_code(cfg_path, capsys):
    code = run(["rate", "--config", cfg_path, "--depth", "6"])
    assert code == 1
    assert "alpha" in capsys.readouterr().err


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"letter_law": {"alphabet": "ab", "probs": [0.9, 0.5]}}))
    code = run(["psi", "--config", str(bad), "--depth", "2"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_missing_config_file(capsys):
    code = run(["psi", "--config", "/nonexistent/cfg.json", "--depth", "2"])
    assert code == 1


def test_budget_exit_code(cfg_path, capsys):
    # depth large enough that the pattern table exceeds the size budget
    code = run(["psi", "--config", cfg_path, "--depth", "50"])
    assert code == 2
    assert "budget" in capsys.readouterr().err


def test_artifact_reruns_byte_identical(cfg_path, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["core-lemma", "--config", cfg_path, "--alpha", "2.0", "--p", "0.2",
            "--n", "1,2", "--horizon", "500", "--seed", "7"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta_a = json.loads((tmp_path / "a.csv.meta.json").read_text())
    meta_b = json.loads((tmp_path / "b.csv.meta.json").read_text())
    assert meta_a == meta_b
    assert meta_a["config"]["seed"] == 7


def test_artifact_thread_count_invariant(cfg_path, tmp_path):
    a = tmp_path / "t1.csv"
    b = tmp_path / "t4.csv"
    argv = ["core-lemma", "--config", cfg_path, "--alpha", "2.0", "--p", "0.2",
            "--n", "1,2", "--horizon", "500"]
    assert run(argv + ["--threads", "1", "--out", str(a)]) == 0
    assert run(argv + ["--threads", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta_a = json.loads((tmp_path / "t1.csv.meta.json").read_text())
    meta_b = json.loads((tmp_path / "t4.csv.meta.json").read_text())
    assert meta_a == meta_b  # worker count stays out of artifacts


def test_flag_overrides_config(tmp_path, capsys):
    cfg = dict(BASE_CFG)
    cfg["seed"] = 1
    cfg["depth"] = 2
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "psi.json"
    code = run(["psi", "--config", str(path), "--depth", "3",
                "--format", "json", "--seed", "99", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["params"]["depth"] == 3
    assert doc["config"]["seed"] == 99


def test_default_seed_recorded(cfg_path, tmp_path):
    out = tmp_path / "e.json"
    code = run(["ergodic", "--config", cfg_path, "--n-words", "200",
                "--k", "1", "--format", "json", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["seed"] == DEFAULT_SEED


def test_both_formats(cfg_path, tmp_path):
    c = tmp_path / "x.csv"
    j = tmp_path / "x.json"
    base = ["psi", "--config", cfg_path, "--depth", "3"]
    assert run(base + ["--format", "csv", "--out", str(c)]) == 0
    assert run(base + ["--format", "json", "--out", str(j)]) == 0
    assert c.read_text().splitlines()[0].count(",") >= 1  # header row
    doc = json.loads(j.read_text())
    assert "config" in doc
    # CSV artifacts carry the resolved config in a sidecar
    meta = json.loads((tmp_path / "x.csv.meta.json").read_text())
    assert meta["config"]["command"] == "psi"


def test_invalid_threads(cfg_path, capsys):
    code = run(["psi", "--config", cfg_path, "--depth", "2", "--threads", "0"])
    assert code == 1


def test_quench_enum_roundtrip(cfg_path, capsys):
    code = run(["quench-enum", "--config", cfg_path, "--n-words", "3",
                "--jmax", "3"])
    assert code == 0
    assert "prob" in capsys.readouterr().out


def test_iproj_summary(cfg_path, capsys):
    code = run(["iproj", "--config", cfg_path])
    assert code == 0
    assert capsys.readouterr().out.strip()
