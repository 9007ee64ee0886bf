import random

import pytest

from carev import oracle
from carev.errors import ShapeMismatch, Singular, SizeCapExceeded
from carev.field import ExtField, Poly, PrimeField, canonical_modulus
from carev.structmat import FMatrix


def _rand_matrix(field, n, rng):
    return FMatrix.from_rows(
        field, [[field.rand_elem(rng) for _ in range(n)] for _ in range(n)]
    )


def test_det_two_by_two():
    F = PrimeField(7)
    m = FMatrix.from_rows(F, [[1, 2], [3, 4]])
    assert oracle.det(m) == (1 * 4 - 2 * 3) % 7


def test_det_multiplicative_random():
    rng = random.Random(41)
    for p in (2, 5, 13):
        F = PrimeField(p)
        for _ in range(15):
            a = _rand_matrix(F, 4, rng)
            b = _rand_matrix(F, 4, rng)
            assert oracle.det(a @ b) == F.mul(oracle.det(a), oracle.det(b))


def test_det_ext_field_matches_block_structure():
    rng = random.Random(43)
    E = ExtField(PrimeField(3), 2, canonical_modulus(3, 2))
    for _ in range(15):
        a = _rand_matrix(E, 3, rng)
        b = _rand_matrix(E, 3, rng)
        assert oracle.det(a @ b) == E.mul(oracle.det(a), oracle.det(b))


def test_inverse_round_trip():
    rng = random.Random(45)
    for p in (2, 7):
        F = PrimeField(p)
        eye = FMatrix.identity(F, 5)
        for _ in range(20):
            m = _rand_matrix(F, 5, rng)
            if oracle.det(m) == F.zero:
                with pytest.raises(Singular):
                    oracle.inverse(m)
                continue
            assert m @ oracle.inverse(m) == eye


def test_inverse_ext_field():
    rng = random.Random(47)
    E = ExtField(PrimeField(5), 2, canonical_modulus(5, 2))
    eye = FMatrix.identity(E, 4)
    for _ in range(10):
        m = _rand_matrix(E, 4, rng)
        if oracle.det(m) == E.zero:
            continue
        assert m @ oracle.inverse(m) == eye


def test_nullspace_property():
    rng = random.Random(49)
    F = PrimeField(5)
    for _ in range(20):
        m = _rand_matrix(F, 4, rng)
        basis = oracle.nullspace(m)
        assert len(basis) == 4 - len(oracle.rref(m.tolists(), F)[1])
        for v in basis:
            col = FMatrix.from_rows(F, [[x] for x in v])
            assert m @ col == FMatrix.zeros(F, 4, 1)


def test_char_poly_companion():
    # Companion matrix of x^3 + 2x + 4 over GF(7).
    F = PrimeField(7)
    m = FMatrix.from_rows(F, [[0, 0, -4 % 7], [1, 0, -2 % 7], [0, 1, 0]])
    assert oracle.char_poly(m) == Poly.from_ints(F, [4, 2, 0, 1])


def test_char_poly_eval_is_det_shift():
    rng = random.Random(51)
    for p in (3, 11):
        F = PrimeField(p)
        for _ in range(10):
            m = _rand_matrix(F, 5, rng)
            f = oracle.char_poly(m)
            assert f.degree == 5
            # f(s) = det(sI - m) for every scalar s.
            for s in range(p):
                shifted = FMatrix.identity(F, 5).scale(s) + m.scale(p - 1)
                assert f.eval(s) == oracle.det(shifted)


def test_char_poly_size_cap():
    F = PrimeField(5)
    with pytest.raises(SizeCapExceeded):
        oracle.char_poly(FMatrix.identity(F, 65))


def test_non_square_rejected():
    F = PrimeField(5)
    m = FMatrix.zeros(F, 2, 3)
    with pytest.raises(ShapeMismatch):
        oracle.det(m)
    with pytest.raises(ShapeMismatch):
        oracle.inverse(m)


def test_span_tracker():
    F = PrimeField(5)
    tr = oracle.SpanTracker(F, 3)
    assert tr.add([1, 2, 3])
    assert not tr.add([2, 4, 6])
    assert tr.contains([3, 6, 9 % 5])
    assert tr.add([0, 1, 0])
    assert tr.dim == 2
