import numpy as np
import pytest

from carev import serialize
from carev.ca import Pattern, RuleSpec
from carev.errors import InputError
from carev.field import PrimeField
from carev.structmat import FMatrix


def _pattern():
    cells = np.arange(12, dtype=np.int64).reshape(3, 4) % 5
    return Pattern(5, cells)


def test_pattern_round_trip(tmp_path):
    pattern = _pattern()
    path = tmp_path / "pattern.txt"
    serialize.write_pattern(pattern, str(path))
    assert serialize.read_pattern(str(path)) == pattern
    header = path.read_text().splitlines()[0]
    assert header == "2 3 4 5"


def test_pattern_parse_errors():
    with pytest.raises(InputError):
        serialize.parse_pattern("")
    with pytest.raises(InputError):
        serialize.parse_pattern("1 3 5 0 1")  # too few values
    with pytest.raises(InputError):
        serialize.parse_pattern("1 2 5 0 9")  # out of range


def test_matrix_round_trip(tmp_path):
    m = FMatrix.from_rows(PrimeField(7), [[1, 2, 3], [4, 5, 6]])
    path = tmp_path / "m.txt"
    serialize.write_matrix(m, str(path))
    assert serialize.read_matrix(str(path)) == m
    assert path.read_text().splitlines()[0] == "2 3 7"


def test_matrix_parse_errors():
    with pytest.raises(InputError):
        serialize.parse_matrix("2 2 7\n1 2\n")  # missing row
    with pytest.raises(InputError):
        serialize.parse_matrix("2 2 7\n1 2\n3\n")  # short row


def test_rule_round_trip(tmp_path):
    rule = RuleSpec(
        p=5, dims=(2, 3), c=1, axes=(((1,), (2,)), ((3,), (4,))), eta=1
    )
    path = tmp_path / "rule.json"
    serialize.write_rule(rule, str(path))
    assert serialize.read_rule(str(path)) == rule


def test_rule_bad_json(tmp_path):
    path = tmp_path / "rule.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        serialize.read_rule(str(path))


def test_pgm_format():
    cells = np.zeros((2, 2, 2), dtype=np.int64)
    cells[0, 0, 0] = 4
    cells[1, 1, 1] = 2
    texts = serialize.pattern_to_pgms(Pattern(5, cells))
    assert len(texts) == 2
    lines = texts[0].splitlines()
    assert lines[0] == "P2" and lines[1] == "2 2" and lines[2] == "255"
    # scale = 255 // 4 = 63; state 4 -> 252
    assert lines[3].split() == ["252", "0"]
    assert texts[1].splitlines()[4].split() == ["0", "126"]


def test_pgm_rejects_high_dimensions():
    cells = np.zeros((2, 2, 2, 2), dtype=np.int64)
    with pytest.raises(InputError):
        serialize.pattern_to_pgms(Pattern(5, cells))


def test_atomic_write_no_partial_on_failure(tmp_path):
    target = tmp_path / "out.txt"
    serialize.atomic_write_text(str(target), "first\n")
    assert target.read_text() == "first\n"
    leftovers = [f for f in tmp_path.iterdir() if f.name.startswith(".tmp-")]
    assert leftovers == []
