"""Kernel subspaces of local interaction terms, and subspace geometry.

A KernelSpace is an orthonormal basis of a subspace of a 2^q-dimensional
ambient space.  Bases may be dense arrays, scipy sparse matrices, or a
factored product (outer basis times a small coefficient matrix); all
operations dispatch on the storage kind so a 2^24-dimensional subspace
never has to be materialized densely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, svd, svdvals

from .lattices import Patch
from .sparse_state import key_words
from .tensors import MpsTensor, PatternSpec, PerturbationSpec, pattern_state, perturb_mps

RANK_TOL = 1e-10


class NoConvergence(RuntimeError):
    """An iterative scheme failed to settle within its grid or cap."""


@dataclass(frozen=True)
class _FactoredBasis:
    """Basis stored as outer @ coeff with coeff small and dense."""

    outer: object
    coeff: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.outer.shape[0], self.coeff.shape[1])


def _b_x(basis, x: np.ndarray) -> np.ndarray:
    """basis @ x for dense, sparse, or factored bases."""
    if isinstance(basis, _FactoredBasis):
        return _b_x(basis.outer, basis.coeff @ x)
    out = basis @ x
    return np.asarray(out)


def _bt_x(basis, x: np.ndarray) -> np.ndarray:
    """basis^dagger @ x for a dense vector or matrix x."""
    if isinstance(basis, _FactoredBasis):
        return basis.coeff.conj().T @ _bt_x(basis.outer, x)
    if sp.issparse(basis):
        return np.asarray(basis.conj().T @ x)
    return basis.conj().T @ x


def _bt_b_any(a, b):
    """a^dagger @ b, possibly still sparse (factored products stay cheap)."""
    if isinstance(a, _FactoredBasis):
        return a.coeff.conj().T @ _bt_b_any(a.outer, b)
    if isinstance(b, _FactoredBasis):
        return _bt_b_any(a, b.outer) @ b.coeff
    if sp.issparse(a):
        return a.conj().T @ b
    if sp.issparse(b):
        inner = _bt_b_any(b, a)
        return inner.conj().T
    return a.conj().T @ b


def _bt_b(a, b) -> np.ndarray:
    """a^dagger @ b across all storage-kind pairs, returned dense."""
    out = _bt_b_any(a, b)
    return out.toarray() if sp.issparse(out) else np.asarray(out)


@dataclass
class KernelSpace:
    """Orthonormal basis of a subspace, with how it was obtained."""

    basis: object
    ambient_dim: int
    rank_tol: float
    provenance: str
    singular_values: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.basis.shape[0] != self.ambient_dim:
            raise ValueError("basis rows must match the ambient dimension")

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of dense x onto the subspace."""
        return _b_x(self.basis, _bt_x(self.basis, x))

    def overlap(self, other: "KernelSpace") -> np.ndarray:
        """The rank x rank matrix of inner products between the bases."""
        return _bt_b(self.basis, other.basis)

    def residual_in(self, other: "KernelSpace") -> float:
        """Largest distance of a basis column from the other subspace.

        Zero (up to roundoff) certifies containment of self in other.
        """
        return containment_residual(self, other)

    def dense_basis(self, max_ambient: int = 1 << 20) -> np.ndarray:
        if self.ambient_dim > max_ambient:
            raise MemoryError("refusing to densify a large basis")
        if isinstance(self.basis, _FactoredBasis):
            return _b_x(self.basis, np.eye(self.rank))
        if sp.issparse(self.basis):
            return self.basis.toarray()
        return np.asarray(self.basis)


def orthonormal_columns(generators: np.ndarray,
                        rank_tol: float = RANK_TOL
                        ) -> tuple[np.ndarray, np.ndarray]:
    """SVD-orthonormalized column span; singular values below
    rank_tol times the largest are treated as zero."""
    g = np.asarray(generators, dtype=float)
    if g.size == 0:
        return g.reshape(g.shape[0], 0), np.zeros(0)
    u, s, _ = svd(g, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return g[:, :0], s
    keep = s > rank_tol * s[0]
    return u[:, keep], s


def orthonormal_sparse_columns(generators: sp.spmatrix,
                               rank_tol: float = RANK_TOL):
    """Orthonormalize sparse columns without densifying the ambient space.

    Columns with pairwise disjoint supports (the usual case for parity
    sectors) just get normalized; otherwise the Gram matrix is
    diagonalized and a factored basis is returned.

    Returns (basis, singular_values).
    """
    g = generators.tocsc()
    gram = np.asarray((g.conj().T @ g).toarray())
    if gram.size == 0:
        return g, np.zeros(0)
    d = np.real(np.diag(gram)).copy()
    scale = float(d.max(initial=0.0))
    if scale == 0.0:
        return g[:, :0], np.zeros(0)
    off = gram - np.diag(d)
    if np.abs(off).max() <= 1e-12 * scale:
        keep = d > (rank_tol ** 2) * scale
        basis = g[:, keep] @ sp.diags(1.0 / np.sqrt(d[keep]))
        return basis.tocsc(), np.sqrt(np.sort(d[keep])[::-1])
    w, v = eigh(gram)
    w = w[::-1]
    v = v[:, ::-1]
    keep = w > (rank_tol ** 2) * w[0]
    coeff = v[:, keep] / np.sqrt(w[keep])
    return _FactoredBasis(g, coeff), np.sqrt(np.maximum(w, 0.0))


# -- matrix product state kernels -------------------------------------------


def mps_kernel(A: MpsTensor, k: int, rank_tol: float = RANK_TOL) -> KernelSpace:
    """Span of the states generated by k consecutive copies of A.

    The generators are the d^k-vectors T[l, (a, b)] obtained by contracting
    k copies over their shared bonds, one column per pair of open bond
    indices.  Site j of the block is bit j - 1 of the local index l.
    """
    if k < 2:
        raise ValueError("a block of at least two sites is required")
    d, D = A.phys_dim, A.bond_dim
    T = A.data
    for _ in range(k - 1):
        T = np.einsum("...ab,jbc->...jac", T, A.data)
    T = T.reshape((d,) * k + (D * D,))
    generators = np.reshape(T, (d ** k, D * D), order="F")
    basis, svals = orthonormal_columns(generators, rank_tol)
    return KernelSpace(basis, d ** k, rank_tol,
                       provenance=f"mps-block-span(k={k})",
                       singular_values=svals)


def uncle_kernel_ghz(rank_tol: float = RANK_TOL) -> KernelSpace:
    """Closed-form kernel of the 3-site uncle term for the GHZ tensor.

    Orthonormal basis: |000>, (|001>+|011>)/sqrt2, (|100>+|110>)/sqrt2,
    |111>, with site j of the block at bit j - 1.
    """
    s = 1.0 / np.sqrt(2.0)
    basis = np.zeros((8, 4))
    basis[0, 0] = 1.0
    basis[4, 1] = s
    basis[6, 1] = s
    basis[1, 2] = s
    basis[3, 2] = s
    basis[7, 3] = 1.0
    return KernelSpace(basis, 8, rank_tol, provenance="uncle-kernel-ghz")


def epsilon_kernel(A: MpsTensor, P: PerturbationSpec, eps: float, k: int = 3,
                   rank_tol: float = RANK_TOL,
                   degenerate_tol: float = 1e-12) -> KernelSpace:
    """Kernel of the parent term of the perturbed tensor A + eps * P.

    The meta flag ``degenerate_direction`` is set when either off-diagonal
    entry sum of P vanishes, the case where the small-eps limit leaves the
    generic path.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive; use mps_kernel for eps = 0")
    ker = mps_kernel(perturb_mps(A, P, eps), k, rank_tol)
    b_sum, c_sum = P.offdiag_sums
    scale = max(1.0, float(np.abs(P.data).max()))
    degenerate = (abs(b_sum) < degenerate_tol * scale
                  or abs(c_sum) < degenerate_tol * scale)
    ker.provenance = f"epsilon-kernel(eps={eps:g}, k={k})"
    ker.meta.update(epsilon=eps, degenerate_direction=degenerate)
    return ker


def uncle_limit(A: MpsTensor, P: PerturbationSpec, k: int = 3,
                eps_grid: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
                stab_tol: float = 1e-6,
                rank_tol: float = RANK_TOL) -> KernelSpace:
    """Follow ker(A + eps P) down a decreasing eps grid.

    Returns the kernel at the smallest eps.  meta carries the sequence of
    consecutive subspace distances, and ``stabilized`` is set when the last
    two fall below stab_tol.  Raises NoConvergence when the distances fail
    to decrease monotonically (a drifting, not converging, family).
    """
    grid = [float(e) for e in eps_grid]
    if len(grid) < 4:
        raise ValueError("need at least four grid points")
    if any(e <= 0 for e in grid) or any(a <= b for a, b in zip(grid, grid[1:])):
        raise ValueError("eps grid must be positive and strictly decreasing")
    kernels = [epsilon_kernel(A, P, e, k, rank_tol) for e in grid]
    dists = [subspace_distance(ka, kb)
             for ka, kb in zip(kernels, kernels[1:])]
    for prev, cur in zip(dists, dists[1:]):
        if cur > 1.05 * prev + 1e-12:
            raise NoConvergence(
                "no_convergence: kernel distances do not decrease "
                f"monotonically along the eps grid: {dists}")
    out = kernels[-1]
    stabilized = len(dists) >= 2 and dists[-1] < stab_tol and dists[-2] < stab_tol
    out.provenance = f"uncle-limit(k={k}, eps={grid[-1]:g})"
    out.meta.update(
        eps_grid=tuple(grid), distances=tuple(dists), stabilized=stabilized,
        degenerate_direction=any(kk.meta.get("degenerate_direction", False)
                                 for kk in kernels))
    return out


# -- toric-code window spans -------------------------------------------------


def region_span(n_rows: int, n_cols: int, kind: str,
                rank_tol: float = RANK_TOL) -> KernelSpace:
    """Span of patch states with pinned perimeter legs, one generator family
    per perimeter configuration.

    kind 'even' uses the all-even pattern, 'odd' the sum over single-odd-site
    patterns, 'sum' stacks both.  The basis is sparse over the 2^(4nm)
    configurations of the patch qubits.  Perimeter bit t of a generator label
    is the leg boundary_qubits[t].
    """
    if n_rows < 2 or n_cols < 2:
        raise ValueError("region spans need at least a 2 x 2 patch")
    if kind not in ("even", "odd", "sum"):
        raise ValueError("kind must be 'even', 'odd', or 'sum'")
    patch = Patch(n_rows, n_cols)
    legs = patch.boundary_qubits
    if len(legs) > 16:
        raise MemoryError("too many perimeter legs to enumerate")
    if key_words(patch.n_qubits) > 1:
        raise MemoryError("patch configurations must fit one key word")

    kinds = ("even", "odd") if kind == "sum" else (kind,)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    j = 0
    for beta in range(1 << len(legs)):
        bmap = {legs[t]: (beta >> t) & 1 for t in range(len(legs))}
        for family in kinds:
            if family == "even":
                st = pattern_state(PatternSpec.make(patch, (), bmap))
            else:
                st = pattern_state(PatternSpec.make(patch, (0,), bmap))
                for s in range(1, patch.n_sites):
                    st = st.add(pattern_state(PatternSpec.make(patch, (s,), bmap)))
            if len(st) == 0:
                continue
            rows.append(st.keys[:, 0].astype(np.int64))
            cols.append(np.full(len(st), j, dtype=np.int64))
            vals.append(st.amps)
            j += 1
    dim = 1 << patch.n_qubits
    if j == 0:
        gen = sp.csc_matrix((dim, 0))
    else:
        gen = sp.csc_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, j))
    basis, svals = orthonormal_sparse_columns(gen, rank_tol)
    return KernelSpace(basis, dim, rank_tol,
                       provenance=f"region-span({n_rows}x{n_cols}, {kind})",
                       singular_values=svals)


def toric_window_span(kind: str, rank_tol: float = RANK_TOL) -> KernelSpace:
    """Ground-space span of one 2 x 2 window of the toric-code lattice.

    'parent-even' spans the even-tensor patch states, 'uncle-sum' the sums
    that also admit one odd site anywhere in the window.
    """
    names = {"parent-even": "even", "even": "even",
             "uncle-sum": "sum", "sum": "sum"}
    if kind not in names:
        raise ValueError("kind must be 'parent-even' or 'uncle-sum'")
    ker = region_span(2, 2, names[kind], rank_tol)
    ker.provenance = f"toric-window({kind})"
    return ker


# -- subspace geometry --------------------------------------------------------


def _dense_block(basis, j0: int, j1: int) -> np.ndarray:
    """Columns [j0, j1) of a basis, materialized dense."""
    if isinstance(basis, _FactoredBasis):
        return _b_x(basis.outer, basis.coeff[:, j0:j1])
    block = basis[:, j0:j1]
    return block.toarray() if sp.issparse(block) else np.asarray(block)


def containment_residual(inner: KernelSpace, outer: KernelSpace,
                         budget_bytes: float = 6e8) -> float:
    """max_j || (I - P_outer) b_j || over the unit basis columns of inner.

    A value at roundoff level certifies that inner is a subspace of outer.
    Residual vectors are materialized (in column blocks sized to
    budget_bytes), so results resolve far below the sqrt(machine-eps)
    floor of the Gram norm identity ||x||^2 - ||B^H x||^2.
    """
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if inner.rank == 0:
        return 0.0
    per_col = inner.ambient_dim * 32
    block = max(1, min(inner.rank, int(budget_bytes // per_col)))
    worst = 0.0
    for j0 in range(0, inner.rank, block):
        xb = _dense_block(inner.basis, j0, min(j0 + block, inner.rank))
        r = xb - _b_x(outer.basis, _bt_x(outer.basis, xb))
        col_norms = np.sqrt(np.sum(np.abs(r) ** 2, axis=0))
        worst = max(worst, float(np.max(col_norms)))
    return worst


def subspace_distance(a: KernelSpace, b: KernelSpace,
                      budget_bytes: float = 6e8) -> float:
    """Distance between subspaces: the sine of the largest principal angle.

    Unequal ranks give distance 1 (one space has a direction orthogonal to
    the whole other space).  Raises ValueError on ambient mismatch.  When
    one basis fits densely in budget_bytes the angle comes from the norm
    of actual residual vectors, accurate down to roundoff; otherwise from
    the overlap spectrum, whose resolution bottoms out near 1e-8.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.rank != b.rank:
        return 1.0
    if a.rank == 0:
        return 0.0
    if a.ambient_dim * a.rank * 16 <= budget_bytes:
        av = _dense_block(a.basis, 0, a.rank)
        r = av - _b_x(b.basis, _bt_x(b.basis, av))
        s = svdvals(r)
        return float(np.clip(s[0] if s.size else 0.0, 0.0, 1.0))
    s = svdvals(a.overlap(b))
    s_min = float(np.clip(s.min(), 0.0, 1.0))
    return float(np.sqrt(max(0.0, 1.0 - s_min * s_min)))


def spread_bits(indices: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Scatter bit j of each index to global bit positions[j]."""
    indices = np.asarray(indices, dtype=np.uint64)
    out = np.zeros_like(indices)
    for j, q in enumerate(positions):
        out |= ((indices >> np.uint64(j)) & np.uint64(1)) << np.uint64(q)
    return out


def embed_kernel(kernel: KernelSpace, qubits: Sequence[int],
                 n_total: int) -> KernelSpace:
    """Tensor a local kernel on the given qubits with the identity elsewhere.

    Local bit j of the kernel's ambient space sits on global qubit
    qubits[j].  The result has rank kernel.rank * 2^(n_total - len(qubits))
    and a sparse orthonormal basis.
    """
    qubits = [int(q) for q in qubits]
    k = len(qubits)
    if kernel.ambient_dim != 1 << k:
        raise ValueError("kernel ambient dimension does not match the qubits")
    if n_total > 40 or len(set(qubits)) != k or max(qubits) >= n_total:
        raise ValueError("invalid qubit embedding")
    rest = [q for q in range(n_total) if q not in set(qubits)]
    n_rest = len(rest)
    if kernel.rank << n_rest > 1 << 22:
        raise MemoryError("embedded rank too large")

    local = kernel.basis
    if isinstance(local, _FactoredBasis):
        local = _b_x(local, np.eye(kernel.rank))
    loc = sp.coo_matrix(local)
    spread_local = spread_bits(loc.row.astype(np.uint64), qubits)
    spread_rest = spread_bits(np.arange(1 << n_rest, dtype=np.uint64), rest)

    rows = (spread_local[:, None] | spread_rest[None, :]).ravel()
    cols = ((loc.col.astype(np.int64) << n_rest)[:, None]
            + np.arange(1 << n_rest, dtype=np.int64)[None, :]).ravel()
    vals = np.repeat(loc.data, 1 << n_rest)
    basis = sp.csc_matrix((vals, (rows.astype(np.int64), cols)),
                          shape=(1 << n_total, kernel.rank << n_rest))
    return KernelSpace(basis, 1 << n_total, kernel.rank_tol,
                       provenance=f"embed({kernel.provenance} @ {tuple(qubits)})")
