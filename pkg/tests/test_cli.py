import argparse
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from rauzy import cli
from rauzy.cli import main, parse_m_range, resolve
from rauzy.solver import BoundReport, solve_delta
from rauzy.transition import build_B, import_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def floats_annotated(obj, inside=False):
    """True when every float sits in a {"value", "rounding"} pair."""
    if isinstance(obj, dict):
        ann = set(obj) == {"value", "rounding"}
        if ann:
            assert obj["rounding"] in ("up", "down", "nearest")
        return all(floats_annotated(v, ann) for v in obj.values())
    if isinstance(obj, list):
        return all(floats_annotated(v, inside) for v in obj)
    if isinstance(obj, float):
        return inside
    return True


def test_bound_solves(capsys):
    code, out, err = run(capsys, "bound", "--m", "2")
    assert code == 0
    assert out.strip().endswith("dim_H ≤ 1.8285")
    assert "m=2" in err  # progress goes to stderr
    assert "lhs=" not in out


def test_bound_probe(capsys):
    code, out, _ = run(capsys, "bound", "--m", "2", "--delta", "0.9", "-q")
    assert code == 0 and "verdict: holds" in out
    code, out, _ = run(capsys, "bound", "--m", "2", "--delta", "0.82", "-q")
    assert code == 1 and "verdict: fails" in out


def test_usage_errors(capsys):
    assert run(capsys, "bound", "--m", "1")[0] == 2
    assert run(capsys, "bound")[0] == 2
    assert run(capsys, "verify", "--suite", "bogus")[0] == 2
    assert run(capsys, "table", "--m", "x..y")[0] == 2
    assert run(capsys, "bound", "--m", "2", "--delta", "0.01")[0] == 2
    assert run(capsys, "render", "--n", "13")[0] == 2
    assert run(capsys, "bound", "--m", "2", "--places", "-3")[0] == 2


def test_bracket_failure_exit(capsys):
    code, _, err = run(capsys, "bound", "--m", "2", "--lo", "0.9", "--hi", "0.95", "-q")
    assert code == 1 and "BracketError" in err


def test_internal_error_exit(capsys, monkeypatch):
    def broken(args, cfg):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "render", broken)
    code, _, err = run(capsys, "render", "--n", "1")
    assert code == 3 and "internal error" in err


def test_table_text_and_empty(capsys):
    code, out, _ = run(capsys, "table", "--m", "2..3", "-q")
    assert code == 0
    assert out.splitlines() == [" m | delta_m + 1", "---+------------", " 2 | 1.8285", " 3 | 1.7982"]
    code, out, _ = run(capsys, "table", "--m", "5..4", "-q")
    assert code == 0
    assert out.splitlines() == [" m | delta_m + 1", "---+------------"]


def test_table_json_round_trip(capsys):
    code, out, _ = run(capsys, "table", "--m", "2,3", "--format", "json", "-q", "--threads", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["failures"] == []
    assert floats_annotated(doc)
    reps = [BoundReport.from_dict(r) for r in doc["rows"]]
    assert reps == [solve_delta(2), solve_delta(3)]
    assert [r.to_dict() | {"wall_time": 0} for r in reps] == [r | {"wall_time": 0} for r in doc["rows"]]


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--m", "2", "--format", "csv", "-q")
    assert out.splitlines() == ["m,dimension_bound", "2,1.8285"]


def test_bound_json(capsys):
    code, out, _ = run(capsys, "bound", "--m", "3", "--format", "json", "-q")
    doc = json.loads(out)
    assert doc["dimension_bound"] == "1.7982"
    assert floats_annotated(doc)
    assert BoundReport.from_dict(doc) == solve_delta(3)


def test_text_deterministic(capsys):
    a = run(capsys, "bound", "--m", "3", "-q")[1]
    b = run(capsys, "bound", "--m", "3", "-q")[1]
    assert a == b


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lemmas", "--n", "6", "--m", "2", "--delta", "0.8285", "-q")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())
    code, out, _ = run(capsys, "verify", "--suite", "appendix", "--samples", "1000", "--points", "100",
                       "--format", "json", "-q")
    assert code == 0
    reports = json.loads(out)
    assert [r["lemma"] for r in reports] == ["appendix-g", "appendix-taylor", "appendix-h"]
    assert all(r["passed"] for r in reports)
    assert floats_annotated(reports)


def test_verify_other_suites(capsys, tmp_path):
    for suite in ("number", "word", "cover", "renewal"):
        code, out, _ = run(capsys, "verify", "--suite", suite, "--n", "5", "--m", "2", "--delta", "0.9", "-q")
        assert code == 0, (suite, out)
    csv_path = tmp_path / "xn.csv"
    code, out, _ = run(capsys, "verify", "--suite", "decay", "--n", "5", "--delta", "0.9", "--xn-csv",
                       str(csv_path), "--format", "csv", "-q")
    assert code == 0
    assert csv_path.read_text().splitlines()[0] == "n,X_n_lower,X_n_upper"
    assert out.splitlines()[0].startswith("lemma,n,m,delta")


def test_verify_violation_exit(capsys, monkeypatch):
    from rauzy.oracle import LemmaReport

    bad = LemmaReport("toy", 1, None, None, 1, -1.0, [{"case": "x", "lhs": 2.0, "rhs": 1.0}])
    monkeypatch.setattr(cli, "_verify_reports", lambda args, cfg: [bad])
    code, out, _ = run(capsys, "verify", "--suite", "cover", "-q")
    assert code == 1
    assert out.startswith("FAIL") and '"case": "x"' in out


def test_render(capsys, tmp_path):
    path = tmp_path / "g.svg"
    code, out, _ = run(capsys, "render", "--n", "1", "-o", str(path))
    assert code == 0 and out == ""
    root = ET.parse(path).getroot()
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polygon")) == 3
    code, _, err = run(capsys, "render", "--n", "1", "-o", str(tmp_path / "missing" / "g.svg"))
    assert code == 2 and "cannot write" in err


def test_export_matrix(capsys, tmp_path):
    path = tmp_path / "b.mtx"
    code, _, _ = run(capsys, "export-matrix", "--m", "3", "--delta", "0.8", "-o", str(path))
    assert code == 0
    B = import_matrix(path)
    assert list(B.entries()) == list(build_B(3, 0.8).entries())
    assert (B.m, B.delta, B.rounding) == (3, 0.8, "up")


def _ns(command="bound", **kw):
    base = {k: None for k in cli.DEFAULTS}
    base.update(command=command, config=None)
    base.update(kw)
    return argparse.Namespace(**base)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "rauzy.toml"
    cfg.write_text('places = 3\nthreads = 2\nseries_tol = 1e-9\n[bound]\nplaces = 5\n')
    assert resolve(_ns(), {})["places"] == 4
    assert resolve(_ns(config=str(cfg)), {})["places"] == 5
    assert resolve(_ns(command="table", config=str(cfg)), {})["places"] == 3
    assert resolve(_ns(config=str(cfg)), {"RAUZY_PLACES": "6"})["places"] == 6
    assert resolve(_ns(config=str(cfg), places=2), {"RAUZY_PLACES": "6"})["places"] == 2
    assert resolve(_ns(), {"RAUZY_CONFIG": str(cfg)})["threads"] == 2
    assert resolve(_ns(config=str(cfg)), {})["series_tol"] == 1e-9
    with pytest.raises(cli.UsageError):
        resolve(_ns(), {"RAUZY_THREADS": "many"})
    with pytest.raises(cli.UsageError):
        resolve(_ns(config=str(tmp_path / "none.toml")), {})
    bad = tmp_path / "bad.toml"
    bad.write_text("places = = 3")
    with pytest.raises(cli.UsageError):
        resolve(_ns(config=str(bad)), {})


def test_env_applies_to_run(capsys, monkeypatch):
    monkeypatch.setenv("RAUZY_PLACES", "2")
    code, out, _ = run(capsys, "bound", "--m", "2", "-q")
    assert out.strip().endswith("dim_H ≤ 1.83")
    code, out, _ = run(capsys, "bound", "--m", "2", "-q", "--places", "3")
    assert out.strip().endswith("dim_H ≤ 1.829")


def test_parse_m_range():
    assert parse_m_range("2..5") == [2, 3, 4, 5]
    assert parse_m_range("5..4") == []
    assert parse_m_range("3, 7") == [3, 7]
    assert parse_m_range("9") == [9]
    with pytest.raises(cli.UsageError):
        parse_m_range("1..3")


def test_large_m_warning(capsys):
    cli._warn_m([13], quiet=False)
    assert "warning" in capsys.readouterr().err
    cli._warn_m([13], quiet=True)
    assert capsys.readouterr().err == ""


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "rauzy", "table", "--m", "2", "-q", "--format", "csv"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout == "m,dimension_bound\n2,1.8285\n"
