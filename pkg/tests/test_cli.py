import csv
import json
import subprocess
import sys

import pytest

from cliquespec import cli
from cliquespec.config import RunConfig, dumps, load_report, save_report
from cliquespec.enumeration import ExtremalReport, build_extremal
from cliquespec.graph import canonical_key, load_graph, save_graph

from .conftest import FIXTURES

EX13 = str(FIXTURES / "example13.edges")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fpoly(capsys):
    code, out, _ = run(capsys, "spec", "fpoly", "7", "4")
    assert code == 0
    assert json.loads(out) == {"coeffs": [1, -2, -5, 6]}


def test_gpoly(capsys):
    code, out, _ = run(capsys, "spec", "gpoly", "8", "5")
    d = json.loads(out)
    assert code == 0 and d["ones"] == 1 and d["minus_ones"] == 4
    assert len(d["coeffs"]) == 9


def test_gpoly_boundary_is_usage_error(capsys):
    code, _, err = run(capsys, "spec", "gpoly", "8", "7")
    assert code == 2 and "k = n-1" in err


def test_bounds(capsys):
    code, out, _ = run(capsys, "spec", "bounds", "12", "7")
    d = json.loads(out)
    assert code == 0 and d["case"] == 1 and d["lower"] < d["rho"] < d["upper"]
    code, out, _ = run(capsys, "spec", "bounds", "12", "11")
    assert code == 0 and json.loads(out)["applicable"] is False


def test_zf_formula_example13(capsys):
    code, out, _ = run(capsys, "zf", "formula", EX13)
    assert code == 0
    assert out.strip() == '{"Z": 8, "b": 5, "n": 13}'


def test_zf_exact_and_closure(capsys):
    code, out, _ = run(capsys, "zf", "exact", EX13)
    d = json.loads(out)
    assert code == 0 and d["Z"] == 8
    seed = ",".join(map(str, d["witness"]))
    code, out, _ = run(capsys, "zf", "closure", EX13, "--seed", seed)
    d = json.loads(out)
    assert code == 0 and d["complete"] and d["blue"] == list(range(13))


def test_zf_formula_rejects_non_clique_tree(tmp_path, capsys):
    p = tmp_path / "p.edges"
    p.write_text("3 2\n0 1\n1 2\n")
    code, _, err = run(capsys, "zf", "formula", str(p))
    assert code == 2 and "clique tree" in err


def test_zf_exact_cap(capsys):
    code, _, err = run(capsys, "zf", "exact", EX13, "--cap", "10")
    assert code == 2 and "formula" in err


def test_bad_input_file(tmp_path, capsys):
    p = tmp_path / "bad.edges"
    p.write_text("3 1\n0 9\n")
    code, _, err = run(capsys, "spec", "rho", str(p))
    assert code == 2 and "line 2" in err
    code, _, err = run(capsys, "spec", "rho", str(tmp_path / "missing.edges"))
    assert code == 2


def test_rho_and_quotient(tmp_path, capsys):
    p = tmp_path / "g.edges"
    save_graph(build_extremal(9, 6), p)
    code, out, _ = run(capsys, "spec", "rho", str(p))
    rho = json.loads(out)["rho"]
    assert code == 0
    code, out, _ = run(capsys, "spec", "quotient", str(p), "--partition", "1,2,3,4|0|5,6,7,8")
    d = json.loads(out)
    assert d["equitable"] and d["rho_q"] == pytest.approx(rho, abs=1e-9)


def test_transform_merge1(tmp_path, capsys):
    out_path = tmp_path / "after.edges"
    code, out, _ = run(capsys, "transform", "apply", "--rule", "merge1", "--input", EX13, "--output", str(out_path))
    d = json.loads(out)
    assert code == 0 and d["rho_increased"] and d["z_preserved"]
    assert d["after"]["Z"] == d["before"]["Z"] == 8
    assert sorted(d["after"]["blocks"]) == [3, 3, 3, 3, 5]
    assert load_graph(out_path).n == 13


def test_transform_relocate_and_move(tmp_path, capsys):
    recipe = tmp_path / "k4.json"
    recipe.write_text('{"blocks": [4, 3, 3], "attach": [[0, 1], [0, 2]]}')
    code, out, _ = run(capsys, "transform", "apply", "--rule", "relocate", "--input", str(recipe))
    d = json.loads(out)
    assert code == 0 and d["rho_increased"]
    assert d["after"]["canonical"] == canonical_key(build_extremal(8, 5))
    code, _, err = run(capsys, "transform", "apply", "--rule", "relocate", "--input", EX13)
    assert code == 2 and "pendant triangles" in err
    p = tmp_path / "chain.edges"
    p.write_text("7 9\n0 1\n0 2\n1 2\n1 3\n1 4\n3 4\n4 5\n4 6\n5 6\n")
    code, out, _ = run(capsys, "transform", "apply", "--rule", "move", "--input", str(p))
    d = json.loads(out)
    assert code == 0 and d["after"]["canonical"] == canonical_key(build_extremal(7, 4))
    assert d["after"]["rho"] > d["before"]["rho"]


def test_transform_precondition_failure(tmp_path, capsys):
    p = tmp_path / "k44.edges"
    p.write_text("7 12\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n0 4\n0 5\n0 6\n4 5\n4 6\n5 6\n")
    code, _, err = run(capsys, "transform", "apply", "--rule", "merge2", "--input", str(p))
    assert code == 2 and "merge2" in err
    code, _, err = run(capsys, "transform", "apply", "--rule", "relocate", "--input", str(p))
    assert code == 2


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "8")
    assert code == 0 and json.loads(out)["count"] == 6
    code, out, _ = run(capsys, "enumerate", "9", "--k", "6")
    d = json.loads(out)
    assert all(c["Z"] == 6 for c in d["classes"])
    code, out, _ = run(capsys, "enumerate", "7", "--format", "csv")
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["canonical", "blocks", "Z", "rho"] and len(rows) == 6
    code, _, err = run(capsys, "enumerate", "15")
    assert code == 2 and "cap" in err


def test_verify_main_theorem_writes_report(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "main-theorem", "--n", "9", "--k", "6", "--out", str(tmp_path))
    assert code == 0
    saved = load_report(tmp_path / "9_6.json")
    assert saved == json.loads(out)
    assert saved["matches_extremal"] and saved["unique"]
    assert saved["argmax_canonical"] == canonical_key(build_extremal(9, 6))


def test_verify_failure_exit_code(tmp_path, capsys, monkeypatch):
    bad = ExtremalReport(9, 6, 3, 4.0, "x", False, False, 4.0)
    monkeypatch.setattr(cli, "verify_main_theorem", lambda n, k, cap: bad)
    code, _, _ = run(capsys, "verify", "main-theorem", "--n", "9", "--k", "6", "--out", str(tmp_path))
    assert code == 1


def test_verify_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "sweep", "--nmin", "6", "--nmax", "9", "--out", str(tmp_path))
    d = json.loads(out)
    assert code == 0 and d["ok"]
    with (tmp_path / "summary.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == d["pairs"] == len(list(tmp_path.glob("*_*.json")))
    assert all(r["unique"] == "true" and r["matches"] == "true" for r in rows)


def test_verify_sweep_parallel_matches_serial(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "verify", "sweep", "--nmin", "7", "--nmax", "9", "--out", str(a))
    run(capsys, "verify", "sweep", "--nmin", "7", "--nmax", "9", "--out", str(b), "--jobs", "2")
    assert (a / "summary.csv").read_text() == (b / "summary.csv").read_text()


def test_verify_sweep_cap(capsys):
    code, _, err = run(capsys, "verify", "sweep", "--nmax", "15")
    assert code == 2 and "cap" in err


def test_verify_remark(capsys):
    code, out, _ = run(capsys, "verify", "remark", "--n", "8")
    d = json.loads(out)
    assert code == 0 and d["ok"] and d["z_min"] == 5


def test_verify_lemmas_small(capsys):
    code, out, _ = run(capsys, "verify", "lemmas", "--trials", "10")
    d = json.loads(out)
    assert code == 0 and d["ok"]
    assert set(d["suites"]) == {"edge_monotonicity", "perron_pendant", "relocate", "merge1", "merge2", "move"}


def test_env_override(monkeypatch, capsys):
    monkeypatch.setenv("CLIQUESPEC_CAP", "10")
    code, _, err = run(capsys, "zf", "exact", EX13)
    assert code == 2 and "formula" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["spec", "fpoly", "7"])
    assert exc.value.code == 2
    code, _, _ = run(capsys, "spec", "fpoly", "7", "4", "--tol", "-1")
    assert code == 2


def test_reports_are_deterministic(tmp_path):
    rep = ExtremalReport(9, 6, 3, 4.5, "key", True, True, 4.1)
    save_report(rep, tmp_path / "a.json")
    save_report(rep, tmp_path / "b.json")
    text = (tmp_path / "a.json").read_text()
    assert text == (tmp_path / "b.json").read_text()
    assert list(json.loads(text)) == sorted(json.loads(text))
    assert dumps({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(format="xml")
    with pytest.raises(ValueError):
        RunConfig(jobs=0)


def test_console_script_module():
    res = subprocess.run(
        [sys.executable, "-m", "cliquespec.cli", "spec", "fpoly", "9", "6"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(res.stdout)["coeffs"][0] == 1
