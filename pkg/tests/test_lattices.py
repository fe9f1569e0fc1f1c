import numpy as np
import pytest

from uncle_forge.lattices import LEG_E, LEG_N, LEG_S, LEG_W, Chain, Patch, Torus


def test_chain_shift_round_trip():
    ch = Chain(9)
    perm = ch.shift_permutation(1)
    back = ch.shift_permutation(-1)
    assert np.array_equal(perm[back], np.arange(9))
    assert np.array_equal(ch.shift_permutation(9), np.arange(9))


def test_chain_open_has_no_translation():
    with pytest.raises(ValueError):
        Chain(5, periodic=False).shift_permutation()


def test_qubit_decode_round_trip():
    for n, m in [(2, 2), (2, 5), (3, 3), (4, 6), (6, 6)]:
        lat = Torus(n, m)
        for q in range(lat.n_qubits):
            r, c, leg = lat.decode_qubit(q)
            assert lat.qubit(r, c, leg) == q
        assert lat.n_qubits == 4 * n * m


def test_site_qubits_are_contiguous_nesw():
    lat = Torus(3, 4)
    for s in range(lat.n_sites):
        r, c = divmod(s, 4)
        assert lat.site_qubits(s) == tuple(lat.qubit(r, c, leg) for leg in range(4))


def test_torus_edge_count_and_pairing():
    for n, m in [(2, 2), (2, 3), (3, 3), (4, 5)]:
        lat = Torus(n, m)
        edges = lat.edges
        assert len(edges) == 2 * n * m == lat.n_edges
        # every leg qubit appears in exactly one edge
        seen = [q for e in edges for q in (e.qubit_a, e.qubit_b)]
        assert sorted(seen) == list(range(lat.n_qubits))
        for e in edges:
            ra, ca, la = lat.decode_qubit(e.qubit_a)
            rb, cb, lb = lat.decode_qubit(e.qubit_b)
            if e.kind == "h":
                assert (la, lb) == (LEG_E, LEG_W)
                assert ra == rb and (ca + 1) % m == cb
            else:
                assert (la, lb) == (LEG_S, LEG_N)
                assert ca == cb and (ra + 1) % n == rb


def test_height_two_torus_keeps_parallel_edges():
    lat = Torus(2, 3)
    v_edges = [e for e in lat.edges if e.kind == "v"]
    # v(0,c) and v(1,c) join the same site pair through different legs
    assert len(v_edges) == 6
    pairs = {(min(e.qubit_a // 4, e.qubit_b // 4), max(e.qubit_a // 4, e.qubit_b // 4))
             for e in v_edges}
    assert len(pairs) == 3


def test_torus_shift_permutation_wraps():
    lat = Torus(3, 4)
    perm = lat.shift_permutation(0, 1)
    for s in range(lat.n_sites):
        r, c = divmod(s, 4)
        for leg in range(4):
            assert perm[lat.qubit(r, c, leg)] == lat.qubit(r, (c + 1) % 4, leg)
    full = np.arange(lat.n_qubits)
    for _ in range(4):
        full = lat.shift_permutation(0, 1)[full]
    assert np.array_equal(full, np.arange(lat.n_qubits))


def test_patch_edges_are_internal_only():
    lat = Patch(2, 3)
    assert len(lat.edges) == 2 * (3 - 1) + 1 * 3  # h rows + v cols
    boundary = set(lat.boundary_qubits)
    for e in lat.edges:
        assert e.qubit_a not in boundary
        assert e.qubit_b not in boundary
    # every leg is either internal (edge) or boundary
    internal = {q for e in lat.edges for q in (e.qubit_a, e.qubit_b)}
    assert internal | boundary == set(range(lat.n_qubits))
    assert internal & boundary == set()


def test_patch_boundary_order():
    lat = Patch(2, 2)
    expect = [
        lat.qubit(0, 0, LEG_N), lat.qubit(0, 0, LEG_W),
        lat.qubit(0, 1, LEG_N), lat.qubit(0, 1, LEG_E),
        lat.qubit(1, 0, LEG_S), lat.qubit(1, 0, LEG_W),
        lat.qubit(1, 1, LEG_E), lat.qubit(1, 1, LEG_S),
    ]
    assert list(lat.boundary_qubits) == expect


def test_degenerate_lattices_rejected():
    with pytest.raises(ValueError):
        Torus(1, 4)
    with pytest.raises(ValueError):
        Chain(0)
