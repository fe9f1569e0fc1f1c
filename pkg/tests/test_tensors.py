"""Tensor constructors checked against brute-force contraction oracles."""

import numpy as np
import pytest

from oracles import mps_amplitudes, toric_amplitudes_by_enumeration, toric_signature_census
from uncle_forge.lattices import Chain, Patch, Torus
from uncle_forge.tensors import (
    MpsTensor,
    PatternSpec,
    PerturbationSpec,
    ghz_mps,
    mps_state,
    pattern_state,
    perturb_mps,
    perturbed_toric_tensor,
    toric_tensor,
)


def test_ghz_state_is_two_cats():
    for n in (3, 5, 8):
        st = mps_state(ghz_mps(), Chain(n))
        assert len(st) == 2
        assert st.amplitude(0) == 1.0
        assert st.amplitude((1 << n) - 1) == 1.0


def test_mps_state_matches_trace_oracle():
    for seed in range(5):
        spec = PerturbationSpec.seeded(seed)
        A = perturb_mps(ghz_mps(), spec, 0.3)
        for n in (3, 4, 6, 8):
            st = mps_state(A, Chain(n))
            expect = mps_amplitudes(A.data, n)
            assert np.allclose(st.to_dense(), expect, atol=1e-12)


def test_mps_state_open_boundary():
    A = perturb_mps(ghz_mps(), PerturbationSpec.seeded(2), 0.5)
    left = np.array([1.0, 0.5])
    right = np.array([0.25, 1.0])
    st = mps_state(A, Chain(4, periodic=False), boundary=(left, right))
    # amplitude of key b = left^T A_{b0} A_{b1} A_{b2} A_{b3} right
    for key in (0, 5, 9, 15):
        m = np.eye(2)
        for site in range(4):
            m = m @ A.data[(key >> site) & 1]
        assert st.amplitude(key) == pytest.approx(left @ m @ right, rel=1e-12)
    with pytest.raises(ValueError):
        mps_state(A, Chain(4, periodic=False))
    with pytest.raises(ValueError):
        mps_state(A, Chain(4), boundary=(left, right))


def test_offdiag_sums():
    spec = PerturbationSpec.from_ghz_entries(
        a=(1.0, 2.0), b=(0.5, -0.2), c=(0.0, 0.7), d=(3.0, 4.0))
    assert spec.offdiag_sums == pytest.approx((0.3, 0.7))
    assert spec.data[0, 0, 1] == 0.5
    assert spec.data[1, 1, 0] == 0.7


def test_toric_tensors_are_parity_projectors():
    e = toric_tensor("even")
    o = toric_tensor("odd")
    assert np.array_equal(e.weights + o.weights, np.ones(16))
    assert np.array_equal(e.matrix @ o.matrix, np.zeros((16, 16)))
    for v in range(16):
        assert e.weights[v] == (1.0 if bin(v).count("1") % 2 == 0 else 0.0)
    mixed = perturbed_toric_tensor(0.25)
    assert np.array_equal(mixed.weights, e.weights + 0.25 * o.weights)
    with pytest.raises(ValueError):
        toric_tensor("sideways")


def test_pattern_state_matches_enumeration_2x2():
    lat = Torus(2, 2)
    st = pattern_state(PatternSpec.make(lat, ()))
    expect = toric_amplitudes_by_enumeration(2, 2)
    assert len(st) == len(expect) == 32
    for key, amp in st.items():
        assert expect.get(key) == amp == 1.0


def test_pattern_state_matches_enumeration_with_defects():
    lat = Torus(2, 2)
    st = pattern_state(PatternSpec.make(lat, (0, 3)))
    expect = toric_amplitudes_by_enumeration(2, 2, (0, 3))
    assert len(st) == len(expect)
    for key, amp in st.items():
        assert expect.get(key) == amp


def test_single_defect_is_infeasible():
    census = toric_signature_census(2, 2)
    for lone in range(4):
        sig = tuple(1 if s == lone else 0 for s in range(4))
        assert sig not in census
        st = pattern_state(PatternSpec.make(Torus(2, 2), (lone,)))
        assert st.norm == 0.0


def test_census_counts_match_pattern_states():
    census = toric_signature_census(2, 2)
    # every feasible signature has the same count, 2^(E - rank) = 32
    assert set(census.values()) == {32}
    assert len(census) == 8  # even-weight signatures only
    for sig in census:
        assert sum(sig) % 2 == 0
        st = pattern_state(PatternSpec.make(
            Torus(2, 2), tuple(s for s, b in enumerate(sig) if b)))
        assert st.norm2 == 32.0


def test_patch_boundary_pinning():
    lat = Patch(1, 2)
    zeros = {q: 0 for q in lat.boundary_qubits}
    # all-zero perimeter forces the single edge bit to 0: one configuration
    st = pattern_state(PatternSpec.make(lat, (), boundary=zeros))
    assert st.norm2 == 1.0
    assert st.amplitude(0) == 1.0
    # one pinned 1 flips one site parity and strands the edge: infeasible
    odd_pin = {**zeros, lat.qubit(0, 0, 0): 1}
    assert pattern_state(PatternSpec.make(lat, (), boundary=odd_pin)).norm == 0.0
    # two pinned 1s are compatible and route through the shared edge
    both = {**zeros, lat.qubit(0, 0, 0): 1, lat.qubit(0, 1, 0): 1}
    st2 = pattern_state(PatternSpec.make(lat, (), boundary=both))
    assert st2.norm2 == 1.0
    key = 1 + (1 << 1) + (1 << 4) + (1 << 7)  # both N legs and the h edge
    assert st2.amplitude(key) == 1.0
    with pytest.raises(ValueError):
        PatternSpec.make(Torus(2, 2), (), boundary={0: 1})


def test_mps_tensor_validation():
    with pytest.raises(ValueError):
        MpsTensor(np.zeros((2, 2, 3)))
    with pytest.raises(ValueError):
        PerturbationSpec(np.zeros((2, 2)))
