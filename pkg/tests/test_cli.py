import json
from importlib import resources

import numpy as np
import pytest

from hints import io
from hints.cli import main
from hints.generate import nested_squares

FIXTURES = resources.files("hints") / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def nested(tmp_path, capsys):
    path = tmp_path / "ns.json"
    assert run(capsys, "gen", "--preset", "nested-squares", "--width", 12, "--height", 12, "--out", path)[0] == 0
    return path


def test_solve_matches_oracle(tmp_path, capsys, nested):
    code, out, _ = run(capsys, "solve", "--instance", nested, "--algo", "pathmoves", "--out", tmp_path / "pm.pgm",
                       "--report", tmp_path / "pm.json", "--palette", tmp_path / "pm.ppm")
    assert code == 0
    pm = json.loads((tmp_path / "pm.json").read_text())
    assert run(capsys, "oracle", "--instance", nested, "--report", tmp_path / "or.json")[0] == 0
    oracle = json.loads((tmp_path / "or.json").read_text())
    assert oracle["method"] == "milp"
    assert pm["final"]["total_finite"] == pytest.approx(oracle["final"]["total_finite"], abs=1e-9)
    assert pm["final"]["feasible"]
    assert (tmp_path / "pm.ppm").exists()

    run(capsys, "solve", "--instance", nested, "--algo", "aexp", "--report", tmp_path / "ab.json")
    ab = json.loads((tmp_path / "ab.json").read_text())
    assert ab["final"]["total_finite"] > pm["final"]["total_finite"]
    assert ab["final"]["total_finite"] == ab["initial"]["total_finite"]


def test_report_reverifies_with_energy(tmp_path, capsys, nested):
    run(capsys, "solve", "--instance", nested, "--report", tmp_path / "r.json")
    report = json.loads((tmp_path / "r.json").read_text())
    inst = io.read_instance(nested)
    accepted = [t for t in report["trace"] if t["accepted"]]
    assert accepted
    for i, t in enumerate(accepted):
        path = tmp_path / f"m{i}.pgm"
        io.write_label_map(path, t["labeling"], inst.width, inst.height, inst.tree.names)
        code, out, _ = run(capsys, "energy", "--instance", nested, "--labels", path)
        assert code == 0
        assert f"total_finite: {t['energy']}" in out
        assert "feasible: true" in out


def test_invalid_config_and_usage(capsys, nested):
    assert run(capsys, "solve", "--instance", nested, "--max-sweeps", 0)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 1


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "solve", "--instance", bad)
    assert code == 2 and "invalid JSON" in err


def test_energy_reports_violations(tmp_path, capsys):
    inst = nested_squares(4, 4)
    io.write_instance(inst, tmp_path / "i.json")
    f = np.zeros(16, dtype=int)
    f[5] = 2
    io.write_label_map(tmp_path / "f.pgm", f, 4, 4, inst.tree.names)
    code, out, _ = run(capsys, "energy", "--instance", tmp_path / "i.json", "--labels", tmp_path / "f.pgm")
    assert code == 0
    assert "feasible: false" in out
    assert "margin_violations: 8" in out


def test_infeasible_and_budget_exit_codes(tmp_path, capsys):
    doc = {
        "width": 2, "height": 1, "labels": ["R", "A", "B"],
        "tree": {"R": {"parent": None}, "A": {"parent": "R", "weight": 1}, "B": {"parent": "R", "weight": 1}},
        "data": {"R": ["forbid", "forbid"], "A": [0, "forbid"], "B": ["forbid", 0]},
        "margins": {"A": 2, "B": 2},
    }
    (tmp_path / "x.json").write_text(json.dumps(doc))
    assert run(capsys, "oracle", "--instance", tmp_path / "x.json", "--method", "exhaustive")[0] == 3
    assert run(capsys, "solve", "--instance", tmp_path / "x.json")[0] == 3
    run(capsys, "gen", "--preset", "random", "--width", 4, "--height", 4, "--labels", 4, "--out", tmp_path / "r.json")
    assert run(capsys, "oracle", "--instance", tmp_path / "r.json", "--method", "exhaustive", "--budget", 10)[0] == 4


def test_check_fixtures(capsys):
    code, out, _ = run(capsys, "check", "--tree", FIXTURES / "box_tree1.json", "--constraints", FIXTURES / "box_strict.json")
    assert code == 0
    assert out.strip().splitlines()[-1] == "NOT representable"
    assert "up: NOT representable; alpha=L gamma=G beta=T: [L,G] prohibited while [L,T] permissible" in out
    _, out, _ = run(capsys, "check", "--tree", FIXTURES / "box_tree2.json", "--constraints", FIXTURES / "box_strict.json")
    assert out.strip().splitlines()[-1] == "representable"
    _, out, _ = run(capsys, "check", "--tree", FIXTURES / "box_tree1.json", "--constraints", FIXTURES / "box_relaxed.json")
    assert out.strip().splitlines()[-1] == "representable"


def test_score_self(tmp_path, capsys, nested):
    run(capsys, "solve", "--instance", nested, "--out", tmp_path / "f.pgm")
    code, out, _ = run(capsys, "score", "--pred", tmp_path / "f.pgm", "--truth", tmp_path / "f.pgm")
    assert code == 0
    numbers = [float(tok) for tok in out.replace(";", " ").split() if tok.replace(".", "").isdigit()]
    assert numbers and all(v == 1.0 for v in numbers[:-1]) and numbers[-1] == 0.0


def test_score_mismatch(tmp_path, capsys):
    io.write_label_map(tmp_path / "a.pgm", np.zeros(4, dtype=int), 2, 2)
    io.write_label_map(tmp_path / "b.pgm", np.zeros(6, dtype=int), 3, 2)
    assert run(capsys, "score", "--pred", tmp_path / "a.pgm", "--truth", tmp_path / "b.pgm")[0] == 2


def test_gen_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        run(capsys, "gen", "--preset", "random", "--labels", 5, "--seed", 9, "--out", tmp_path / f"{name}.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert run(capsys, "gen", "--preset", "random", "--width", 0, "--out", tmp_path / "c.json")[0] == 2


def test_solve_deterministic_trace(tmp_path, capsys):
    run(capsys, "gen", "--preset", "random", "--width", 5, "--height", 4, "--labels", 5, "--out", tmp_path / "r.json")
    traces = []
    for name in ("a", "b"):
        run(capsys, "solve", "--instance", tmp_path / "r.json", "--order", "shuffle", "--seed", 2,
            "--report", tmp_path / f"{name}.rep")
        rep = json.loads((tmp_path / f"{name}.rep").read_text())
        traces.append([(t["label"], t["accepted"], t["energy"]) for t in rep["trace"]])
    assert traces[0] == traces[1]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "hints", "fixtures"], capture_output=True, text=True)
    assert proc.returncode == 0 and "box_strict.json" in proc.stdout
