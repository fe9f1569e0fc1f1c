"""Site tensors and the states they generate.

Covers the diagonal GHZ matrix product tensor with its perturbations, the
even/odd toric-code tensors with physical space equal to the four virtual
legs, and parity-pattern states: equal-weight sums over edge assignments
of a 2D lattice with a prescribed set of odd sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import gf2
from .lattices import Chain, Patch, Torus
from .sparse_state import DROP_TOL, SparseState, key_words


@dataclass(frozen=True)
class MpsTensor:
    """Translation-invariant MPS tensor, indexed [physical, left, right]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3 or data.shape[1] != data.shape[2]:
            raise ValueError("expected shape (d, D, D)")
        object.__setattr__(self, "data", data)

    @property
    def phys_dim(self) -> int:
        return self.data.shape[0]

    @property
    def bond_dim(self) -> int:
        return self.data.shape[1]


def ghz_mps() -> MpsTensor:
    """The GHZ tensor: A_0 = diag(1, 0), A_1 = diag(0, 1)."""
    data = np.zeros((2, 2, 2))
    data[0, 0, 0] = 1.0
    data[1, 1, 1] = 1.0
    return MpsTensor(data)


@dataclass(frozen=True)
class PerturbationSpec:
    """Direction P of a tensor perturbation A + eps * P, same shape as A."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3 or data.shape[1] != data.shape[2]:
            raise ValueError("expected shape (d, D, D)")
        object.__setattr__(self, "data", data)

    @classmethod
    def seeded(cls, seed: int, phys_dim: int = 2,
               bond_dim: int = 2) -> "PerturbationSpec":
        rng = np.random.default_rng(seed)
        return cls(rng.standard_normal((phys_dim, bond_dim, bond_dim)))

    @classmethod
    def from_ghz_entries(cls, a, b, c, d) -> "PerturbationSpec":
        """Build P_i = [[a_i, b_i], [c_i, d_i]] for i = 0, 1."""
        data = np.array([[[a[0], b[0]], [c[0], d[0]]],
                         [[a[1], b[1]], [c[1], d[1]]]], dtype=float)
        return cls(data)

    @property
    def offdiag_sums(self) -> tuple[float, float]:
        """(sum_i P_i[0,1], sum_i P_i[1,0]); both must be nonzero for the
        perturbed kernel of the GHZ tensor to take its generic form."""
        return (float(self.data[:, 0, 1].sum()), float(self.data[:, 1, 0].sum()))


def perturb_mps(A: MpsTensor, P: PerturbationSpec, eps: float) -> MpsTensor:
    if A.data.shape != P.data.shape:
        raise ValueError("tensor and perturbation shapes differ")
    return MpsTensor(A.data + eps * P.data)


def mps_state(A: MpsTensor, chain: Chain,
              boundary: tuple[np.ndarray, np.ndarray] | None = None,
              budget: int = 1 << 26) -> SparseState:
    """Contract the chain of copies of A into a sparse state.

    Periodic chains close with a trace; open chains need a (left, right)
    boundary vector pair.  Site i of the chain is bit i of each
    configuration.  Amplitudes below the drop tolerance are discarded.
    """
    d, D = A.phys_dim, A.bond_dim
    n = chain.n_sites
    if d != 2:
        raise ValueError("chain configurations are bit strings; need d = 2")
    if d ** n * D * D > budget:
        raise MemoryError(f"contraction of {n} sites exceeds the budget")
    if chain.periodic:
        if boundary is not None:
            raise ValueError("periodic chains close with a trace")
    elif boundary is None:
        raise ValueError("open chains need a boundary vector pair")

    T = A.data
    for _ in range(n - 1):
        # axes: (i_1, ..., i_m, left, right)
        T = np.einsum("...ab,jbc->...jac", T, A.data)
    if chain.periodic:
        amps = np.trace(T, axis1=-2, axis2=-1)
    else:
        left, right = (np.asarray(v, dtype=float) for v in boundary)
        amps = np.einsum("...ab,a,b->...", T, left, right)
    # F-order flatten sends axis j (site j+1) to bit j of the configuration
    vec = amps.reshape(-1, order="F")
    return SparseState.from_dense(chain, vec, DROP_TOL)


# -- toric-code site tensors ------------------------------------------------


@dataclass(frozen=True)
class PepsTensor:
    """Diagonal 4-leg tensor with physical space = the four virtual legs.

    ``weights[v]`` multiplies the basis state of the local configuration v,
    where bit 0..3 of v are the N, E, S, W legs.
    """

    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (16,):
            raise ValueError("expected 16 leg-configuration weights")
        object.__setattr__(self, "weights", w)

    @property
    def matrix(self) -> np.ndarray:
        """The tensor as the diagonal map it defines on (C^2)^{x4}."""
        return np.diag(self.weights)


_PARITY = np.array([bin(v).count("1") & 1 for v in range(16)])


def toric_tensor(kind: str) -> PepsTensor:
    """Even-parity projector tensor E ('even') or its complement O ('odd')."""
    if kind == "even":
        return PepsTensor(np.where(_PARITY == 0, 1.0, 0.0), "even")
    if kind == "odd":
        return PepsTensor(np.where(_PARITY == 1, 1.0, 0.0), "odd")
    raise ValueError("kind must be 'even' or 'odd'")


def perturbed_toric_tensor(eps: float) -> PepsTensor:
    """E + eps * O, the deformation interpolating even to even-plus-odd."""
    return PepsTensor(np.where(_PARITY == 0, 1.0, eps), f"even+{eps}*odd")


# -- parity-pattern states ---------------------------------------------------


@dataclass(frozen=True)
class PatternSpec:
    """Which sites carry the odd tensor, and any pinned perimeter legs."""

    lattice: Torus | Patch
    odd_sites: tuple[int, ...] = ()
    boundary: tuple[tuple[int, int], ...] = ()

    @classmethod
    def make(cls, lattice, odd_sites=(),
             boundary: Mapping[int, int] | None = None) -> "PatternSpec":
        odd = tuple(sorted(set(int(s) for s in odd_sites)))
        if odd and not (0 <= odd[0] and odd[-1] < lattice.n_sites):
            raise ValueError("odd site index out of range")
        fixed: tuple[tuple[int, int], ...] = ()
        if boundary:
            if isinstance(lattice, Torus):
                raise ValueError("a torus has no perimeter legs to pin")
            allowed = set(lattice.boundary_qubits)
            items = sorted((int(q), int(b) & 1) for q, b in boundary.items())
            for q, _ in items:
                if q not in allowed:
                    raise ValueError(f"qubit {q} is not a perimeter leg")
            fixed = tuple(items)
        return cls(lattice, odd, fixed)


def parity_system(spec: PatternSpec):
    """GF(2) system over edge bits and free perimeter legs.

    Variables are the lattice edges in their canonical order followed by the
    unpinned perimeter legs in boundary_qubits order.  Each site contributes
    one equation: the parity of its four legs must match its tensor kind.

    Returns (rows, rhs, var_masks, base_key) where var_masks[v] is the packed
    set of qubits flipped by variable v and base_key carries the pinned legs.
    """
    lat = spec.lattice
    edges = lat.edges
    fixed = dict(spec.boundary)
    free_legs: list[int] = []
    if isinstance(lat, Patch):
        free_legs = [q for q in lat.boundary_qubits if q not in fixed]

    n_vars = len(edges) + len(free_legs)
    kw = key_words(lat.n_qubits)
    var_masks = np.zeros((n_vars, kw), dtype=np.uint64)
    site_rows = np.zeros((lat.n_sites, n_vars), dtype=np.uint64)
    for v, e in enumerate(edges):
        for q in (e.qubit_a, e.qubit_b):
            gf2.set_bit(var_masks[v], q)
            site_rows[q >> 2, v] ^= 1
    for j, q in enumerate(free_legs):
        v = len(edges) + j
        gf2.set_bit(var_masks[v], q)
        site_rows[q >> 2, v] ^= 1

    base_key = np.zeros(kw, dtype=np.uint64)
    rhs = np.zeros(lat.n_sites, dtype=np.uint8)
    for s in spec.odd_sites:
        rhs[s] ^= 1
    for q, bit in fixed.items():
        if bit:
            gf2.set_bit(base_key, q)
            rhs[q >> 2] ^= 1

    rows = gf2.pack_rows(site_rows)
    return rows, rhs, var_masks, base_key


def pattern_state(spec: PatternSpec, budget: int = 1 << 22) -> SparseState:
    """Equal-weight sum over all leg assignments matching the pattern.

    Every consistent assignment contributes amplitude 1.  An infeasible
    pattern (e.g. a single odd site on a torus) gives the zero state.
    """
    rows, rhs, var_masks, base_key = parity_system(spec)
    ech = gf2.eliminate(rows, rhs, var_masks.shape[0])
    if not ech.feasible:
        return SparseState.zero(spec.lattice)
    sols = gf2.enumerate_solutions(ech, budget=budget)
    keys = np.tile(base_key, (sols.shape[0], 1))
    for v in range(var_masks.shape[0]):
        sel = gf2.get_bit(sols, v).astype(bool)
        keys[sel] ^= var_masks[v]
    return SparseState(spec.lattice, keys, np.ones(sols.shape[0]))
