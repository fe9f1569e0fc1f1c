"""Eigensolvers: dense against Krylov, certification, and intersections."""

import numpy as np
import pytest

from uncle_forge.hamiltonian import LocalProjector, assemble_chain
from uncle_forge.kernels import KernelSpace, NoConvergence, mps_kernel, uncle_kernel_ghz
from uncle_forge.lattices import Chain
from uncle_forge.spectra import (
    CertificationError,
    dense_spectrum,
    fixed_point_vector,
    ground_space,
    intersect_alternating,
    lowest_eigs,
    spacing_stats,
)
from uncle_forge.sparse_state import SparseState
from uncle_forge.tensors import PerturbationSpec, ghz_mps, mps_state, perturb_mps


def _uncle_chain(n):
    return assemble_chain(LocalProjector(uncle_kernel_ghz()), n)


def _parent_chain(n):
    return assemble_chain(LocalProjector(mps_kernel(ghz_mps(), 3)), n)


def _sector_states(n):
    ch = Chain(n)
    return [SparseState.from_items(ch, [(0, 1.0)]),
            SparseState.from_items(ch, [((1 << n) - 1, 1.0)])]


def test_dense_spectrum_known_small_values():
    spec = dense_spectrum(_uncle_chain(6))
    assert spec.null_dim == 2
    assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
    # first excited level of the 6-site ring: 2 - sqrt(3)
    assert spec.eigenvalues[2] == pytest.approx(2.0 - np.sqrt(3.0), abs=1e-10)
    assert float(np.max(spec.residuals)) < 1e-12

    pspec = dense_spectrum(_parent_chain(6))
    assert pspec.null_dim == 2
    assert pspec.eigenvalues[2] == pytest.approx(3.0, abs=1e-12)


def test_krylov_matches_dense_lambda_1_to_5():
    # degenerate multiplicities included; this is the agreement contract
    for build, n in ((_uncle_chain, 8), (_uncle_chain, 10),
                     (_parent_chain, 8)):
        h = build(n)
        dense = dense_spectrum(h, vectors=False).eigenvalues[:5]
        res = lowest_eigs(h, k=5, seed=3)
        assert np.allclose(res.eigenvalues, dense, atol=1e-8)
        assert float(np.max(res.residuals)) < 1e-7


def test_krylov_handles_perturbed_chain():
    A = perturb_mps(ghz_mps(), PerturbationSpec.seeded(21), 0.05)
    h = assemble_chain(LocalProjector(mps_kernel(A, 3)), 9)
    dense = dense_spectrum(h, vectors=False).eigenvalues[:5]
    res = lowest_eigs(h, k=5, seed=1)
    assert np.allclose(res.eigenvalues, dense, atol=1e-8)


def test_extracted_vectors_are_orthonormal():
    res = lowest_eigs(_uncle_chain(10), k=5, seed=0)
    v = res.eigenvectors
    assert np.allclose(v.T @ v, np.eye(5), atol=1e-10)


def test_deflation_finds_the_gap():
    n = 9
    h = _uncle_chain(n)
    gs = np.stack([s.to_dense() for s in _sector_states(n)], axis=1)
    res = lowest_eigs(h, k=1, seed=5, deflate=gs)
    dense = dense_spectrum(h, vectors=False)
    assert res.eigenvalues[0] == pytest.approx(dense.eigenvalues[2], abs=1e-8)
    assert res.meta["deflated"] == 2


def test_lowest_eigs_rejects_overdrawn_k():
    h = _uncle_chain(4)
    with pytest.raises(ValueError):
        lowest_eigs(h, k=17)


def test_lowest_eigs_no_convergence_is_loud():
    with pytest.raises(NoConvergence):
        lowest_eigs(_uncle_chain(10), k=1, seed=0, max_iter=3)


def test_ground_space_certified_path():
    n = 10
    h = _uncle_chain(n)
    gs = ground_space(h, candidates=_sector_states(n), seed=2)
    assert gs.rank == 2
    assert gs.meta["gap"] == pytest.approx(0.09788696741, abs=1e-6)
    assert max(gs.meta["candidate_residuals"]) < 1e-12


def test_ground_space_rejects_bad_candidates():
    n = 8
    h = _uncle_chain(n)
    ch = Chain(n)
    wrong = SparseState.from_items(ch, [(5, 1.0)])  # not annihilated
    with pytest.raises(CertificationError):
        ground_space(h, candidates=[wrong])
    # an incomplete span leaves a zero eigenvalue in the complement
    with pytest.raises(CertificationError):
        ground_space(h, candidates=_sector_states(n)[:1])


def test_ground_space_dense_path_matches_certified():
    n = 8
    h = _uncle_chain(n)
    dense = ground_space(h)
    cert = ground_space(h, candidates=_sector_states(n))
    from uncle_forge.kernels import subspace_distance

    assert dense.rank == cert.rank == 2
    assert subspace_distance(dense, cert) < 1e-8


def test_spacing_stats():
    assert spacing_stats(np.array([0.5, 1.0]), (0.0, 2.0)) == 1.0
    assert spacing_stats(np.array([]), (0.0, 2.0)) == 2.0
    assert spacing_stats(np.array([3.0, -1.0]), (0.0, 2.0)) == 2.0
    with pytest.raises(ValueError):
        spacing_stats(np.array([1.0]), (2.0, 2.0))


def test_intersect_alternating_planes(rng):
    # two planes in R^3 sharing the z axis
    a = np.zeros((3, 2))
    a[0, 0] = a[2, 1] = 1.0
    b = np.zeros((3, 2))
    b[1, 0] = b[2, 1] = 1.0
    inter = intersect_alternating(
        [KernelSpace(a, 3, 1e-10, "xz"), KernelSpace(b, 3, 1e-10, "yz")],
        seed=0, n_starts=4)
    assert inter.rank == 1
    v = fixed_point_vector(inter, 0)
    assert abs(v[2]) == pytest.approx(np.linalg.norm(v), rel=1e-9)
    # orthogonal lines meet only at zero
    x = KernelSpace(np.eye(3)[:, :1], 3, 1e-10, "x")
    y = KernelSpace(np.eye(3)[:, 1:2], 3, 1e-10, "y")
    assert intersect_alternating([x, y], seed=1, n_starts=3).rank == 0
