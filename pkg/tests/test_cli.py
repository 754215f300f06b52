import json

import pytest

from thetarep.cli import main


def run(capsys, *args):
    code = main(list(args))
    return code, capsys.readouterr().out


def test_decompose(capsys):
    code, out = run(capsys, "decompose", "--p", "5", "--f", "2", "--m", "2,1", "--n", "1,1")
    assert code == 0 and "(1,0)⊗D^6 ⊕ (1,2)⊗D^1 ⊕ (3,0)⊗D^5 ⊕ (3,2)" in out
    code, out = run(capsys, "decompose", "--p", "5", "--m", "1", "--n", "0")
    assert code == 0 and out.strip().endswith("= (1)")


def test_decompose_partial(capsys):
    code, out = run(capsys, "decompose", "--p", "3", "--m", "1", "--n", "5")
    assert code == 2 and "unresolved" in out


def test_config_errors(capsys):
    assert run(capsys, "decompose", "--p", "4", "--m", "1", "--n", "1")[0] == 1
    assert run(capsys, "decompose", "--p", "3", "--f", "2", "--m", "1", "--n", "1,1")[0] == 1
    code, out = run(capsys, "filtration", "--p", "3", "--f", "2", "--r", "5,5", "--m", "1")
    assert code == 1 and "19" in out


def test_filtration(capsys, tmp_path):
    code, out = run(capsys, "filtration", "--p", "3", "--r", "9", "--m", "1",
                    "--json", str(tmp_path / "f.json"), "--dot", str(tmp_path / "dots"))
    assert code == 0 and "dim = (m+1)^f(q+1) = 8, computed 8: PASS" in out
    doc = json.loads((tmp_path / "f.json").read_text())
    assert doc["schema"] == "thetarep-report-v1" and [c["dim"] for c in doc["cells"]] == [4, 4]
    assert doc["field"]["p"] == 3
    assert (tmp_path / "dots" / "filtration.dot").exists()
    assert (tmp_path / "dots" / "hypercube.dot").exists()


def test_jh(capsys, tmp_path):
    code, out = run(capsys, "jh", "--p", "7", "--f", "2", "--r", "23", "--conjectural", "--dot", str(tmp_path))
    assert code == 0 and "total dim 50" in out and "CONJECTURAL" in out
    assert (tmp_path / "conjectural.dot").read_text().count("CONJECTURAL") == 1
    code, out = run(capsys, "jh", "--p", "5", "--r", "3")
    assert code == 0 and out.count("[closed-form]") == 2
    code, out = run(capsys, "jh", "--p", "7", "--f", "2", "--r", "0")
    assert code == 0 and "non-generic" in out


def test_verify_targets(capsys, tmp_path):
    out_json = tmp_path / "v.json"
    code, out = run(capsys, "verify", "--target", "projective", "--p", "3", "--f", "2", "--m", "1,2", "--k", "1",
                    "--json", str(out_json))
    assert code == 0 and "[PASS] projective" in out
    assert json.loads(out_json.read_text())["reports"][0]["computed"]["rank"] == 54
    code, out = run(capsys, "verify", "--target", "ses", "--p", "3", "--m", "2", "--n", "2", "--out", str(tmp_path))
    assert code == 0 and "NOT-SPLIT" in out and (tmp_path / "verify_report.json").exists()
    code, out = run(capsys, "verify", "--target", "intersection", "--p", "3", "--f", "2", "--r", "19,19", "--m", "1",
                    "--out", str(tmp_path))
    assert code == 0 and "[PASS] intersection" in out
    code, out = run(capsys, "verify", "--target", "cg", "--p", "5", "--f", "2", "--m", "2,1", "--n", "1,1",
                    "--out", str(tmp_path))
    assert code == 0
    code, _ = run(capsys, "verify", "--target", "iso1", "--p", "3", "--m", "1", "--out", str(tmp_path))
    assert code == 1  # missing --r


def test_verify_failure_exit_code(capsys, tmp_path, monkeypatch):
    from thetarep import cli_reports
    from thetarep.report import Report

    monkeypatch.setitem(cli_reports._TARGETS, "cg",
                        (("m", "n"), lambda c: [Report("cg", "", {}, 1, 2, False)]))
    code, out = run(capsys, "verify", "--target", "cg", "--p", "3", "--m", "1", "--n", "1", "--out", str(tmp_path))
    assert code == 3 and "[FAIL]" in out
    assert json.loads((tmp_path / "verify_report.json").read_text())["pass"] is False


def test_json_is_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        run(capsys, "verify", "--target", "projective", "--p", "3", "--m", "1", "--k", "1", "--json", str(path))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_json_stdout(capsys):
    code, out = run(capsys, "decompose", "--p", "3", "--m", "1", "--n", "1", "--json", "-")
    doc = json.loads(out[out.index("{"):])
    assert doc["schema"] == "thetarep-report-v1" and doc["exit_code"] == 0
