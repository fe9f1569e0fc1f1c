"""Frustration-free Hamiltonians as sums of local kernel-complement projectors.

Each term is I - P onto a local kernel, placed on a footprint of lattice
sites.  Local bit j of a term is the footprint qubit qubits[j], matching
the kernel's own index convention.  Application is either dense (full
2^n vector, moveaxis over the footprint) or sparse (group configurations
by their value outside the footprint and project each group).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .kernels import KernelSpace, _FactoredBasis, _b_x, _bt_x
from .lattices import Chain, Torus
from .sparse_state import SparseState, _byte_view, key_words

DENSE_QUBIT_CAP = 24
AUTO_DENSE_QUBITS = 20


@dataclass(frozen=True)
class LocalProjector:
    """The local interaction h = I - (projector onto the kernel)."""

    kernel: KernelSpace

    @property
    def ambient_dim(self) -> int:
        return self.kernel.ambient_dim

    @property
    def n_local_qubits(self) -> int:
        k = int(self.kernel.ambient_dim).bit_length() - 1
        if 1 << k != self.kernel.ambient_dim:
            raise ValueError("kernel ambient dimension is not a power of 2")
        return k

    def apply_block(self, block: np.ndarray) -> np.ndarray:
        """h @ block for a (ambient_dim, ...) array."""
        return block - _b_x(self.kernel.basis, _bt_x(self.kernel.basis, block))

    def matrix(self, max_dim: int = 1 << 12) -> np.ndarray:
        if self.ambient_dim > max_dim:
            raise MemoryError("local projector too large to densify")
        return self.apply_block(np.eye(self.ambient_dim))

    @cached_property
    def sparse_basis(self) -> sp.csc_matrix:
        b = self.kernel.basis
        if isinstance(b, _FactoredBasis):
            b = _b_x(b, np.eye(self.kernel.rank))
        return sp.csc_matrix(b)


@dataclass(frozen=True)
class PlacedTerm:
    projector: LocalProjector
    sites: tuple[int, ...]
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class GlobalHamiltonian:
    """Sum of placed local projectors on a chain or torus."""

    lattice: Chain | Torus
    terms: tuple[PlacedTerm, ...]

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_qubits

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def n_terms(self) -> int:
        return len(self.terms)


def assemble_chain(h: LocalProjector, n_sites: int,
                   boundary: str = "periodic") -> GlobalHamiltonian:
    """Place a k-site chain term at every offset.

    Periodic chains get n terms (footprints wrap), open chains n - k + 1.
    """
    k = h.n_local_qubits
    if n_sites < k:
        raise ValueError(f"chain of {n_sites} sites cannot host a {k}-site term")
    if boundary not in ("periodic", "open"):
        raise ValueError("boundary must be 'periodic' or 'open'")
    periodic = boundary == "periodic"
    chain = Chain(n_sites, periodic=periodic)
    n_terms = n_sites if periodic else n_sites - k + 1
    terms = []
    for i in range(n_terms):
        sites = tuple((i + j) % n_sites for j in range(k))
        terms.append(PlacedTerm(h, sites, sites))
    return GlobalHamiltonian(chain, tuple(terms))


def assemble_torus(h: LocalProjector, n_rows: int,
                   n_cols: int) -> GlobalHamiltonian:
    """Place a 2 x 2 window term at every position of the torus.

    The window's sites enter row-major, so local bits 0..3 are the four
    legs of the window's north-west site, and so on.
    """
    if h.n_local_qubits != 16:
        raise ValueError("torus terms act on 2 x 2 windows of 4-leg sites")
    lat = Torus(n_rows, n_cols)
    terms = []
    for r in range(n_rows):
        for c in range(n_cols):
            sites = (lat.site_index(r, c), lat.site_index(r, c + 1),
                     lat.site_index(r + 1, c), lat.site_index(r + 1, c + 1))
            qubits = tuple(q for s in sites for q in lat.site_qubits(s))
            terms.append(PlacedTerm(h, sites, qubits))
    return GlobalHamiltonian(lat, tuple(terms))


# -- dense application --------------------------------------------------------


def _dense_term_apply(projector: LocalProjector, qubits, vec: np.ndarray,
                      n_qubits: int) -> np.ndarray:
    """h_t @ vec for a full 2^n vector; returns a new vector."""
    k = len(qubits)
    t = vec.reshape((2,) * n_qubits)
    src = [n_qubits - 1 - q for q in qubits]
    dst = [k - 1 - j for j in range(k)]
    t = np.moveaxis(t, src, dst)
    shape = t.shape
    block = np.ascontiguousarray(t).reshape(1 << k, -1)
    out = projector.apply_block(block).reshape(shape)
    return np.moveaxis(out, dst, src).reshape(-1)


def apply_dense(H: GlobalHamiltonian, vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec).reshape(-1)
    if vec.shape[0] != H.dim:
        raise ValueError("vector dimension does not match the Hamiltonian")
    out = np.zeros_like(vec)
    for t in H.terms:
        out += _dense_term_apply(t.projector, t.qubits, vec, H.n_qubits)
    return out


# -- sparse application -------------------------------------------------------


def _footprint_masks(qubits, n_words: int) -> np.ndarray:
    mask = np.zeros(n_words, dtype=np.uint64)
    for q in qubits:
        mask[q >> 6] |= np.uint64(1) << np.uint64(q & 63)
    return mask


def _local_indices(keys: np.ndarray, qubits) -> np.ndarray:
    loc = np.zeros(keys.shape[0], dtype=np.int64)
    for j, q in enumerate(qubits):
        bit = (keys[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)
        loc |= bit.astype(np.int64) << j
    return loc


def _scatter_local(loc: np.ndarray, qubits, n_words: int) -> np.ndarray:
    out = np.zeros((loc.shape[0], n_words), dtype=np.uint64)
    lu = loc.astype(np.uint64)
    for j, q in enumerate(qubits):
        bit = (lu >> np.uint64(j)) & np.uint64(1)
        out[:, q >> 6] |= bit << np.uint64(q & 63)
    return out


def _term_groups(state: SparseState, qubits):
    """Sort entries by their configuration outside the footprint.

    Returns (loc, amps, rest_keys, group_starts) with entries reordered so
    equal rest configurations are contiguous.
    """
    nw = state.keys.shape[1]
    mask = _footprint_masks(qubits, nw)
    rest = state.keys & ~mask
    order = np.argsort(_byte_view(rest), kind="stable")
    rest = rest[order]
    loc = _local_indices(state.keys, qubits)[order]
    amps = state.amps[order]
    view = _byte_view(rest)
    boundary = np.empty(len(view), dtype=bool)
    if len(view):
        boundary[0] = True
        boundary[1:] = view[1:] != view[:-1]
    starts = np.nonzero(boundary)[0]
    return loc, amps, rest, starts


def projected_group_weights(state: SparseState, qubits,
                            projector: LocalProjector):
    """Kernel coefficients of each rest-group's local slice.

    Returns (W, rest_rows) where column g of the sparse matrix W holds
    B^T applied to the local slice of group g, and rest_rows[g] is the
    packed rest configuration of that group.
    """
    loc, amps, rest, starts = _term_groups(state, qubits)
    n_groups = len(starts)
    if n_groups == 0:
        b = projector.sparse_basis
        return sp.csc_matrix((b.shape[1], 0)), rest[:0]
    gid = np.zeros(len(loc), dtype=np.int64)
    gid[starts] = 1
    gid = np.cumsum(gid) - 1
    x = sp.csc_matrix((amps, (loc, gid)),
                      shape=(projector.ambient_dim, n_groups))
    w = (projector.sparse_basis.conj().T @ x).tocsc()
    return w, rest[starts]


def _sparse_term_apply(state: SparseState, qubits,
                       projector: LocalProjector) -> SparseState:
    """h_t applied to a sparse state: the state minus its projected part."""
    loc, amps, rest, starts = _term_groups(state, qubits)
    nw = state.keys.shape[1]
    n_groups = len(starts)
    if n_groups == 0:
        return SparseState.zero(state.lattice)
    gid = np.zeros(len(loc), dtype=np.int64)
    gid[starts] = 1
    gid = np.cumsum(gid) - 1
    x = sp.csc_matrix((amps, (loc, gid)),
                      shape=(projector.ambient_dim, n_groups))
    b = projector.sparse_basis
    proj = (b @ (b.conj().T @ x)).tocoo()
    proj_keys = rest[starts][proj.col] | _scatter_local(proj.row, qubits, nw)
    keys = np.concatenate([state.keys, proj_keys], axis=0)
    vals = np.concatenate([state.amps, -proj.data])
    return SparseState(state.lattice, keys, vals)


def apply(H: GlobalHamiltonian, psi, backend: str = "auto"):
    """H @ psi for a SparseState or a dense vector, preserving the type."""
    if backend not in ("auto", "dense", "sparse"):
        raise ValueError("backend must be 'auto', 'dense', or 'sparse'")
    if isinstance(psi, np.ndarray):
        if backend == "sparse":
            raise ValueError("dense vectors use the dense backend")
        return apply_dense(H, psi)
    if not isinstance(psi, SparseState):
        raise TypeError("psi must be a SparseState or a dense vector")
    if backend == "dense" and H.n_qubits > DENSE_QUBIT_CAP:
        raise MemoryError(f"dense backend capped at {DENSE_QUBIT_CAP} qubits")
    use_dense = backend == "dense" or (
        backend == "auto" and H.n_qubits <= AUTO_DENSE_QUBITS)
    if use_dense:
        out = apply_dense(H, psi.to_dense())
        return SparseState.from_dense(psi.lattice, out)
    acc = SparseState.zero(psi.lattice)
    for t in H.terms:
        acc = acc.add(_sparse_term_apply(psi, t.qubits, t.projector))
    return acc


def term_energies(H: GlobalHamiltonian, psi: SparseState) -> np.ndarray:
    """<psi| h_t |psi> for every placed term, without forming H psi.

    Uses <psi| h |psi> = ||psi||^2 - ||W||^2 where W collects the kernel
    coefficients of the rest-group slices.
    """
    n2 = psi.norm2
    out = np.empty(H.n_terms)
    for i, t in enumerate(H.terms):
        w, _ = projected_group_weights(psi, t.qubits, t.projector)
        out[i] = n2 - float(np.sum(np.abs(w.data) ** 2))
    return out


def rayleigh(H: GlobalHamiltonian, psi, backend: str = "auto") -> float:
    """Exact Rayleigh quotient <psi|H|psi> / <psi|psi>."""
    if isinstance(psi, np.ndarray):
        n2 = float(np.vdot(psi, psi).real)
        if n2 == 0.0:
            raise ValueError("Rayleigh quotient of the zero vector")
        val = float(np.vdot(psi, apply_dense(H, psi)).real)
        return val / n2
    n2 = psi.norm2
    if n2 == 0.0:
        raise ValueError("Rayleigh quotient of the zero state")
    if backend == "dense" or (backend == "auto"
                              and H.n_qubits <= AUTO_DENSE_QUBITS):
        vec = psi.to_dense()
        return float(np.vdot(vec, apply_dense(H, vec)).real) / n2
    return float(np.sum(term_energies(H, psi))) / n2


# -- explicit matrices --------------------------------------------------------


def sparse_matrix(H: GlobalHamiltonian, max_qubits: int = 20) -> sp.csr_matrix:
    """The full Hamiltonian as a sparse matrix (small systems only)."""
    if H.n_qubits > max_qubits:
        raise MemoryError(f"sparse matrix capped at {max_qubits} qubits")
    dim = H.dim
    total = sp.csr_matrix((dim, dim))
    for t in H.terms:
        rest = tuple(q for q in range(H.n_qubits) if q not in set(t.qubits))
        emb = _embed_columns(t.projector.sparse_basis, t.qubits, rest, dim)
        total = total + sp.identity(dim, format="csr") - (emb @ emb.conj().T).tocsr()
    return total.tocsr()


def _embed_columns(b: sp.csc_matrix, qubits, rest, dim: int) -> sp.csc_matrix:
    from .kernels import spread_bits

    coo = b.tocoo()
    n_rest = len(rest)
    sl = spread_bits(coo.row.astype(np.uint64), list(qubits))
    sr = spread_bits(np.arange(1 << n_rest, dtype=np.uint64), list(rest))
    rows = (sl[:, None] | sr[None, :]).ravel().astype(np.int64)
    cols = ((coo.col.astype(np.int64) << n_rest)[:, None]
            + np.arange(1 << n_rest, dtype=np.int64)[None, :]).ravel()
    vals = np.repeat(coo.data, 1 << n_rest)
    return sp.csc_matrix((vals, (rows, cols)),
                         shape=(dim, b.shape[1] << n_rest))


def dense_matrix(H: GlobalHamiltonian, max_qubits: int = 13) -> np.ndarray:
    """The full Hamiltonian as a dense array (chains up to 2^13)."""
    if H.n_qubits > max_qubits:
        raise MemoryError(f"dense matrix capped at {max_qubits} qubits")
    return sparse_matrix(H, max_qubits=max_qubits).toarray()
