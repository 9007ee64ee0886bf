import json
import shutil
from importlib import resources

import pytest

from carev import serialize
from carev.cli import main


def _write_rule(tmp_path, p=5, dims=(2, 2, 2), coeff=1):
    rule = {
        "p": p,
        "dims": list(dims),
        "c": 0,
        "eta": 1,
        "axes": [{"ell": [coeff], "r": [coeff]} for _ in dims],
    }
    path = tmp_path / "rule.json"
    path.write_text(json.dumps(rule))
    return str(path)


def _write_pattern(tmp_path, text):
    path = tmp_path / "pattern.txt"
    path.write_text(text)
    return str(path)


def test_check_reversible(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=7)
    assert main(["check", rule]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["reversible"] is True
    assert report["witness"] is None


def test_check_irreversible_with_witness(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=3)
    assert main(["check", rule]) == 10
    report = json.loads(capsys.readouterr().out)
    assert report["reversible"] is False
    assert len(report["witness"]) == 3


def test_check_input_errors(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=4)
    assert main(["check", rule]) == 2
    assert "prime" in capsys.readouterr().err
    missing = str(tmp_path / "missing.json")
    assert main(["check", missing]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["check", str(bad)]) == 2


def test_invert_writes_verified_matrix(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=5)
    out = tmp_path / "tinv.txt"
    assert main(["invert", str(tmp_path / "rule.json"), "--out", str(out)]) == 0
    m = serialize.read_matrix(str(out))
    assert m.rows == m.cols == 8
    assert rule  # rule path reused above


def test_invert_irreversible_writes_nothing(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=3)
    out = tmp_path / "tinv.txt"
    assert main(["invert", rule, "--out", str(out)]) == 10
    assert not out.exists()


def test_evolve_zero_steps_is_canonical_identity(tmp_path):
    rule = _write_rule(tmp_path, p=5, dims=(2, 2))
    pattern = _write_pattern(tmp_path, "2 2 2 5\n1 2\n3 4\n")
    out = tmp_path / "out.txt"
    assert main(["evolve", rule, pattern, "--steps", "0", "--out", str(out)]) == 0
    assert out.read_text() == "2 2 2 5\n1 2\n3 4\n"


def test_evolve_then_reverse_round_trip(tmp_path):
    rule = _write_rule(tmp_path, p=5, dims=(2, 2, 2))
    pattern = _write_pattern(tmp_path, "3 2 2 2 5\n1 2\n3 4\n0 1\n2 3\n")
    fwd = tmp_path / "fwd.txt"
    back = tmp_path / "back.txt"
    assert main(["evolve", rule, pattern, "--steps", "6", "--out", str(fwd)]) == 0
    assert main(["reverse", rule, str(fwd), "--steps", "6", "--out", str(back)]) == 0
    assert back.read_text() == (tmp_path / "pattern.txt").read_text()


def test_evolve_dimension_mismatch(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=5, dims=(2, 2))
    pattern = _write_pattern(tmp_path, "1 4 5\n1 2 3 4\n")
    out = tmp_path / "out.txt"
    assert main(["evolve", rule, pattern, "--steps", "1", "--out", str(out)]) == 2


def test_evolve_writes_pgm(tmp_path):
    rule = _write_rule(tmp_path, p=5, dims=(2, 2, 2))
    pattern = _write_pattern(tmp_path, "3 2 2 2 5\n1 2\n3 4\n0 1\n2 3\n")
    out = tmp_path / "out.txt"
    prefix = tmp_path / "img"
    assert (
        main(
            ["evolve", rule, pattern, "--steps", "1", "--out", str(out), "--pgm", str(prefix)]
        )
        == 0
    )
    assert (tmp_path / "img_slice0.pgm").exists()
    assert (tmp_path / "img_slice1.pgm").exists()


def test_roots_and_jordan_reports(tmp_path, capsys):
    rule = _write_rule(tmp_path, p=3, dims=(4, 4, 4))
    assert main(["roots", rule]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["field"] == {"p": 3, "degree": 2, "modulus": [1, 0, 1]}
    assert main(["jordan", rule]) == 0
    report = json.loads(capsys.readouterr().out)
    assert len(report["diagonal"]) == 64


def test_paper_examples_all_pass(capsys):
    assert main(["paper-examples"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 11


def test_paper_examples_list(capsys):
    assert main(["paper-examples", "--list"]) == 0
    out = capsys.readouterr().out
    assert "cube222-inverse-p7" in out


def test_paper_examples_perturbed_golden_fails(tmp_path, capsys):
    golden_dir = tmp_path / "goldens"
    golden_dir.mkdir()
    src = resources.files("carev") / "goldens"
    for entry in src.iterdir():
        shutil.copy(str(entry), golden_dir / entry.name)
    target = golden_dir / "triple_table_p5.txt"
    target.write_text(target.read_text().replace("1 1 4", "1 2 4"))
    code = main(
        ["paper-examples", "--only", "triple-table-p5", "--golden-dir", str(golden_dir)]
    )
    assert code == 1
    assert "FAIL triple-table-p5" in capsys.readouterr().out


def test_paper_examples_unknown_id(capsys):
    assert main(["paper-examples", "--only", "nope"]) == 2


def test_bench_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(
        ["bench", "--dims", "2,2,2", "--p", "5", "--repeats", "1", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "N,t_structured,t_dense,ratio"
    assert lines[1].startswith("8,")


def test_bench_bad_dims(capsys):
    assert main(["bench", "--dims", "banana"]) == 2
