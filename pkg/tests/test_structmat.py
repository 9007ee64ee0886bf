import random

import numpy as np
import pytest

from carev.errors import BandTooWide, FieldMismatch, ShapeMismatch
from carev.field import ExtField, PrimeField, canonical_modulus
from carev.structmat import (
    FMatrix,
    dot_kron,
    k_matrix,
    kron_dot,
    kron_many,
    kron_product,
    kron_sum,
    toeplitz,
)


def _rand_matrix(field, rows, cols, rng):
    return FMatrix.from_rows(
        field, [[field.rand_elem(rng) for _ in range(cols)] for _ in range(rows)]
    )


def test_toeplitz_tridiagonal():
    F = PrimeField(5)
    s = toeplitz(F, 4, (2,), (3,))
    rows = s.tolists()
    assert rows == [
        [0, 3, 0, 0],
        [2, 0, 3, 0],
        [0, 2, 0, 3],
        [0, 0, 2, 0],
    ]


def test_toeplitz_wide_band():
    F = PrimeField(7)
    s = toeplitz(F, 5, (1, 2), (3, 4))
    assert s.at(2, 0) == 2 and s.at(0, 2) == 4
    assert s.at(4, 2) == 2 and s.at(2, 4) == 4
    with pytest.raises(BandTooWide):
        toeplitz(F, 3, (1, 1, 1), (1, 1, 1))


def test_k_matrix_is_unit_band():
    F = PrimeField(3)
    assert k_matrix(F, 3) == toeplitz(F, 3, (1,), (1,))


def test_matmul_matches_oracle_definition():
    rng = random.Random(2)
    for p in (2, 7, 13):
        F = PrimeField(p)
        a = _rand_matrix(F, 5, 4, rng)
        b = _rand_matrix(F, 4, 6, rng)
        prod = a @ b
        for i in range(5):
            for j in range(6):
                want = F.zero
                for t in range(4):
                    want = F.add(want, F.mul(a.at(i, t), b.at(t, j)))
                assert prod.at(i, j) == want


def test_ext_matmul_matches_scalar_loop():
    rng = random.Random(4)
    E = ExtField(PrimeField(3), 2, canonical_modulus(3, 2))
    a = _rand_matrix(E, 3, 3, rng)
    b = _rand_matrix(E, 3, 3, rng)
    prod = a @ b
    for i in range(3):
        for j in range(3):
            want = E.zero
            for t in range(3):
                want = E.add(want, E.mul(a.at(i, t), b.at(t, j)))
            assert prod.at(i, j) == want


def test_kron_product_matches_numpy():
    rng = random.Random(6)
    F = PrimeField(11)
    a = _rand_matrix(F, 2, 3, rng)
    b = _rand_matrix(F, 3, 2, rng)
    got = kron_product(a, b).int_matrix()
    want = np.kron(a.int_matrix(), b.int_matrix()) % 11
    assert np.array_equal(got, want)


def test_kron_sum_definition():
    rng = random.Random(8)
    F = PrimeField(7)
    a = _rand_matrix(F, 3, 3, rng)
    b = _rand_matrix(F, 2, 2, rng)
    ia = FMatrix.identity(F, 3)
    ib = FMatrix.identity(F, 2)
    assert kron_sum(a, b) == kron_product(ib, a) + kron_product(b, ia)


def test_kron_dot_avoids_materialization():
    rng = random.Random(10)
    F = PrimeField(5)
    factors = [_rand_matrix(F, m, m, rng) for m in (2, 3, 2)]
    m = _rand_matrix(F, 12, 12, rng)
    u = kron_many(factors)
    assert kron_dot(factors, m) == u @ m
    assert dot_kron(m, factors) == m @ u


def test_field_mismatch_rejected():
    a = FMatrix.identity(PrimeField(5), 2)
    b = FMatrix.identity(PrimeField(7), 2)
    with pytest.raises(FieldMismatch):
        a @ b
    with pytest.raises(ShapeMismatch):
        a @ FMatrix.identity(PrimeField(5), 3)


def test_project_base_round_trip():
    E = ExtField(PrimeField(5), 2, canonical_modulus(5, 2))
    m = FMatrix.from_rows(PrimeField(5), [[1, 2], [3, 4]])
    lifted = m.lift(E)
    assert lifted.project_base() == m
