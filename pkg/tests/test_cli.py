import csv
import io
import json

import numpy as np
import pytest

from bilinear import expansion as E
from bilinear.cli import run
from conftest import make_space


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_lemmas_all_pass(capsys):
    code, out, _ = call(capsys, "verify-lemmas", "--q", "2", "--dimv", "2", "--dimw", "2")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert rows and all(r["pass"] for r in rows)
    assert {"lemma_id", "instances_checked", "max_err", "pass"} <= set(rows[0])


def test_expansion_csv_row(capsys):
    code, out, _ = call(capsys, "expansion", "--q", "2", "--dimv", "2", "--dimw", "2", "--set", "builtin:rank-threshold:1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    row = rows[0]
    assert list(row)[:8] == ["q", "n", "m", "set_id", "globalness_order", "globalness_level", "stay_prob", "bound"]
    sp = make_space(2, 2, 2)
    assert float(row["stay_prob"]) == pytest.approx(E.expansion_probability(sp, E.rank_threshold_set(sp, 1)))


def test_spectrum_of_sharpness(capsys):
    code, out, _ = call(capsys, "spectrum", "--function", "builtin:sharpness:d=1")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    masses = {r["degree"]: r["mass"] for r in rows}
    assert masses[1] > 0 and abs(masses[0]) < 1e-12 and abs(masses[2]) < 1e-12


def test_reports_are_reproducible(capsys, tmp_path):
    argv = ["check-hyp", "--d", "1", "--function", "builtin:random-boolean:0.5,3", "--out", str(tmp_path)]
    code1, out1, _ = call(capsys, *argv)
    code2, out2, _ = call(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert (tmp_path / "check-hyp.json").read_text() == out1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["spectrum", "--function", "builtin:sharpness:1", "--nope"])
    assert exc.value.code == 2
    assert call(capsys, "spectrum", "--function", "builtin:random-boolean:0.5")[0] == 2
    assert call(capsys, "spectrum", "--q", "5", "--profile", "desk", "--function", "builtin:sharpness:1")[0] == 2
    assert call(capsys, "spectrum", "--function", "builtin:unknown")[0] == 2
    assert call(capsys, "expansion", "--set", "builtin:sharpness:1")[0] == 2


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("BF_THREADS", "zero")
    assert call(capsys, "spectrum", "--function", "builtin:sharpness:1")[0] == 2


def test_failed_check_exits_one(capsys, tmp_path, monkeypatch):
    from bilinear import globalness

    # a report whose inequality is violated: lhs 2 against rhs 1
    monkeypatch.setattr(globalness, "check_level_d", lambda *a, **k: globalness.HypReport("level_d", 2.0, 0.0, {"d": 1}))
    code, out, err = call(capsys, "check-hyp", "--d", "1", "--function", "builtin:rank-threshold:1", "--out", str(tmp_path))
    assert code == 1
    failed = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
    assert failed == [r for r in map(json.loads, out.splitlines()) if not r["pass"]]
    assert failed[0]["check"] == "level_d" and failed[0]["function"] == "rank-threshold:1"
    assert (tmp_path / "failures.json").exists()


def test_function_file(capsys, tmp_path):
    vals = np.zeros(16)
    vals[[0, 5]] = 1.0
    path = tmp_path / "f.txt"
    path.write_text("\n".join(str(v) for v in vals))
    code, out, _ = call(capsys, "spectrum", "--function", str(path))
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and sum(r["mass"] for r in rows) == pytest.approx(2 / 16)
    path.write_text("1 2 3")
    assert call(capsys, "spectrum", "--function", str(path))[0] == 2


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[common]\nq = 3\n[spectrum]\ndimv = 1\nfunction = builtin:sharpness:1\n")
    code, out, _ = call(capsys, "spectrum", "--config", str(cfg))
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and rows[0]["q"] == 3 and rows[0]["n"] == 1


def test_check_cube(capsys):
    code, out, _ = call(capsys, "check-cube", "--p", "3", "--n", "2", "--d", "2", "--function", "builtin:random-low-degree:2,5")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and all(r["pass"] for r in rows)


def test_sharpness_command(capsys):
    code, out, _ = call(capsys, "sharpness", "--dimv", "3", "--dimw", "3")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert max(r["observed_exponent"] for r in rows) >= 1
