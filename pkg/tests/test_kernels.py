import random

import numpy as np
import pytest

from carev import kernels


def _random_matrix(rng, n, p):
    return np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)


def test_backend_selection_values():
    assert kernels.backend() in ("numba", "numpy")


def test_matmul_backends_agree():
    rng = random.Random(11)
    for p in (2, 7, 13, 2_147_483_629):
        a = _random_matrix(rng, 8, p)
        b = _random_matrix(rng, 8, p)
        want = kernels.matmul_mod(a, b, p, force="numpy")
        got = kernels.matmul_mod(a, b, p, force="numba")
        assert np.array_equal(got, want)


def test_det_backends_agree():
    rng = random.Random(13)
    for p in (2, 5, 13):
        for _ in range(20):
            a = _random_matrix(rng, 6, p)
            assert kernels.det_mod(a, p, force="numpy") == kernels.det_mod(
                a, p, force="numba"
            )


def test_det_singular():
    p = 7
    a = np.array([[1, 2], [2, 4]], dtype=np.int64)
    assert kernels.det_mod(a, p) == 0


def test_inv_round_trip():
    rng = random.Random(17)
    for p in (3, 11):
        for _ in range(20):
            a = _random_matrix(rng, 5, p)
            inv_np = kernels.inv_mod(a, p, force="numpy")
            inv_nb = kernels.inv_mod(a, p, force="numba")
            if inv_np is None:
                assert inv_nb is None
                assert kernels.det_mod(a, p) == 0
                continue
            assert np.array_equal(inv_np, inv_nb)
            prod = kernels.matmul_mod(a, inv_np, p)
            assert np.array_equal(prod, np.eye(5, dtype=np.int64))


def test_evolve_step_backends_agree():
    rng = random.Random(19)
    for _ in range(30):
        p = rng.choice([2, 3, 5, 7])
        d = rng.randint(1, 3)
        dims = tuple(rng.randint(2, 5) for _ in range(d))
        eta = rng.choice([1, 2])
        x = np.array(
            [rng.randrange(p) for _ in range(int(np.prod(dims)))], dtype=np.int64
        ).reshape(dims)
        c = rng.randrange(p)
        lo = np.array(
            [[rng.randrange(p) for _ in range(eta)] for _ in range(d)], dtype=np.int64
        )
        hi = np.array(
            [[rng.randrange(p) for _ in range(eta)] for _ in range(d)], dtype=np.int64
        )
        a = kernels.evolve_step(x, c, lo, hi, p, force="numpy")
        b = kernels.evolve_step(x, c, lo, hi, p, force="numba")
        assert np.array_equal(a, b)


def test_evolve_step_null_boundary():
    # A pure right-shift along the only axis: value moves toward index 0,
    # and the last cell receives nothing (null boundary).
    p = 5
    x = np.array([0, 0, 0, 2], dtype=np.int64)
    lo = np.array([[0]], dtype=np.int64)
    hi = np.array([[1]], dtype=np.int64)
    out = kernels.evolve_step(x, 0, lo, hi, p)
    assert list(out) == [0, 0, 2, 0]


def test_force_invalid_backend():
    a = np.eye(2, dtype=np.int64)
    with pytest.raises(RuntimeError):
        kernels.matmul_mod(a, a, 5, force="cuda")
