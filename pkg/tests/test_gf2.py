import numpy as np
import pytest

from uncle_forge.gf2 import (
    Gf2Echelon,
    eliminate,
    enumerate_solutions,
    get_bit,
    n_words,
    pack_rows,
)


def _unpack(words, n_vars):
    return np.array([int(get_bit(words, j)) for j in range(n_vars)], dtype=np.uint8)


def test_pack_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        nv = int(rng.integers(1, 140))
        rows = rng.integers(0, 2, size=(5, nv))
        packed = pack_rows(rows)
        assert packed.shape == (5, n_words(nv))
        for i in range(5):
            assert np.array_equal(_unpack(packed[i], nv), rows[i])


def test_eliminate_matches_numpy_rank():
    rng = np.random.default_rng(7)
    for _ in range(40):
        r = int(rng.integers(1, 10))
        nv = int(rng.integers(1, 12))
        a = rng.integers(0, 2, size=(r, nv))
        ech = eliminate(pack_rows(a), np.zeros(r, dtype=np.uint8), nv)
        # rank over GF(2) by brute force: count distinct nonzero row spans
        span = {0}
        for row in a:
            key = int("".join(map(str, row)), 2) if nv else 0
            span |= {s ^ key for s in span}
        assert 1 << ech.rank == len(span)


def test_solutions_satisfy_system():
    rng = np.random.default_rng(11)
    for _ in range(30):
        r = int(rng.integers(1, 9))
        nv = int(rng.integers(1, 11))
        a = rng.integers(0, 2, size=(r, nv))
        x0 = rng.integers(0, 2, size=nv)
        b = (a @ x0) % 2
        ech = eliminate(pack_rows(a), b, nv)
        assert ech.feasible  # b was constructed in the image
        sols = enumerate_solutions(ech)
        assert len(sols) == 1 << ech.log2_solutions
        for s in sols[:: max(1, len(sols) // 8)]:
            x = _unpack(s, nv)
            assert np.array_equal((a @ x) % 2, b)
        # solutions are distinct
        keys = {tuple(int(w) for w in s) for s in sols}
        assert len(keys) == len(sols)


def test_infeasible_detection():
    # x1 = 0 and x1 = 1 cannot both hold
    a = pack_rows(np.array([[1, 0], [1, 0]]))
    ech = eliminate(a, np.array([0, 1], dtype=np.uint8), 2)
    assert not ech.feasible
    assert ech.log2_solutions is None
    assert len(enumerate_solutions(ech)) == 0
    with pytest.raises(ValueError):
        ech.particular_solution()


def test_null_basis_spans_kernel():
    rng = np.random.default_rng(19)
    a = rng.integers(0, 2, size=(6, 9))
    ech = eliminate(pack_rows(a), np.zeros(6, dtype=np.uint8), 9)
    basis = ech.null_basis()
    assert len(basis) == 9 - ech.rank
    for row in basis:
        x = _unpack(row, 9)
        assert not ((a @ x) % 2).any()


def test_enumeration_budget():
    ech = Gf2Echelon(n_vars=30, rank=0, pivot_cols=[],
                     rows=np.zeros((0, 1), dtype=np.uint64),
                     rhs=np.zeros(0, dtype=np.uint8), feasible=True)
    with pytest.raises(MemoryError):
        enumerate_solutions(ech, budget=1 << 10)


def test_wide_systems_cross_word_boundary():
    rng = np.random.default_rng(23)
    nv = 130
    a = rng.integers(0, 2, size=(40, nv))
    x0 = rng.integers(0, 2, size=nv)
    b = (a @ x0) % 2
    ech = eliminate(pack_rows(a), b, nv)
    x = _unpack(ech.particular_solution(), nv)
    assert np.array_equal((a @ x) % 2, b)
