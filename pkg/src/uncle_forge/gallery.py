"""Low-energy trial states and their exact energies.

The gallery holds the states used to probe gaplessness: domain-wall sums
on chains, two-defect sums on tori, closure (homology) ground states, and
concatenations of window fragments.  Energy evaluations are exact Rayleigh
quotients; the large strip geometries use a per-term decomposition that
never materializes the full defect sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gf2
from .hamiltonian import (GlobalHamiltonian, LocalProjector, assemble_torus,
                          projected_group_weights, term_energies)
from .kernels import toric_window_span
from .lattices import Chain, Torus
from .sparse_state import SparseState, canonicalize, key_words
from .tensors import PatternSpec, parity_system, pattern_state


@dataclass(frozen=True)
class RegionSpec:
    """Axis-aligned block of torus sites (wrapping allowed)."""

    row0: int
    col0: int
    height: int
    width: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError("region must contain at least one site")

    def positions(self, lat: Torus) -> list[tuple[int, int]]:
        if self.height > lat.n_rows or self.width > lat.n_cols:
            raise ValueError("region does not fit on the lattice")
        return [((self.row0 + i) % lat.n_rows, (self.col0 + j) % lat.n_cols)
                for i in range(self.height) for j in range(self.width)]

    def sites(self, lat: Torus) -> list[int]:
        return [lat.site_index(r, c) for r, c in self.positions(lat)]


def _torus_separation(lat: Torus, a: RegionSpec, b: RegionSpec) -> int:
    """Smallest toroidal Chebyshev distance between sites of a and b."""
    best = None
    for ra, ca in a.positions(lat):
        for rb, cb in b.positions(lat):
            dr = min((ra - rb) % lat.n_rows, (rb - ra) % lat.n_rows)
            dc = min((ca - cb) % lat.n_cols, (cb - ca) % lat.n_cols)
            d = max(dr, dc)
            best = d if best is None else min(best, d)
    return best if best is not None else 0


@dataclass(frozen=True)
class CountReport:
    """Solution count of a pattern's parity system over GF(2)."""

    n_edges: int
    n_vars: int
    rank: int
    feasible: bool
    log2_count: int | None

    @property
    def norm_sq(self) -> float:
        """Squared norm of the pattern state (one per solution), 0 if infeasible."""
        if not self.feasible:
            return 0.0
        return float(2.0 ** self.log2_count)


def gf2_count(spec: PatternSpec) -> CountReport:
    """Count the leg assignments of a pattern without enumerating them."""
    rows, rhs, var_masks, _ = parity_system(spec)
    ech = gf2.eliminate(rows, rhs, var_masks.shape[0])
    return CountReport(n_edges=len(spec.lattice.edges),
                       n_vars=var_masks.shape[0], rank=ech.rank,
                       feasible=ech.feasible, log2_count=ech.log2_solutions)


# -- chain domain-wall states -------------------------------------------------


def ghz_domain_state(n_sites: int, r: int, window: int,
                     offset: int = 1) -> SparseState:
    """Sum of single-domain configurations inside a window of the chain.

    One configuration per pair 1 <= i < j <= window with 2 <= j - i <= r,
    carrying ones exactly at window positions i+1 .. j (positions count
    from 1).  The window must sit strictly inside the chain.
    """
    if not 2 <= r < window:
        raise ValueError("need 2 <= r < window")
    if window >= n_sites:
        raise ValueError("window must be strictly inside the chain")
    if not 0 <= offset <= n_sites - window:
        raise ValueError("window does not fit at this offset")
    chain = Chain(n_sites, periodic=True)
    items = []
    for i in range(1, window):
        for j in range(i + 2, min(i + r, window) + 1):
            run = ((1 << (j - i)) - 1) << (offset + i)
            items.append((run, 1.0))
    return SparseState.from_items(chain, items)


# -- torus defect states -------------------------------------------------------


def toric_phi(lat: Torus, region1: RegionSpec, region2: RegionSpec,
              budget: int = 1 << 25) -> SparseState:
    """Equal-weight sum of all two-defect patterns with one odd site in each
    region.  Regions must be disjoint with toroidal Chebyshev separation of
    at least two sites.
    """
    sep = _torus_separation(lat, region1, region2)
    if sep < 2:
        raise ValueError(f"regions must be separated by >= 2 sites (got {sep})")
    sites1 = region1.sites(lat)
    sites2 = region2.sites(lat)
    report = gf2_count(PatternSpec.make(lat, (sites1[0], sites2[0])))
    total = len(sites1) * len(sites2) * report.norm_sq
    if total > budget:
        raise MemoryError(
            f"defect sum would hold {total:.3g} entries (budget {budget})")
    keys = []
    amps = []
    for a1 in sites1:
        for a2 in sites2:
            st = pattern_state(PatternSpec.make(lat, (a1, a2)), budget=budget)
            keys.append(st.keys)
            amps.append(st.amps)
    return SparseState(lat, np.concatenate(keys, axis=0), np.concatenate(amps))


def toric_closure_states(lat: Torus) -> list[SparseState]:
    """The four homology-weighted sums over closed (all-even) configurations.

    State (a, b) weights each configuration by (-1) to the power
    a * (crossings of a vertical cut) + b * (crossings of a horizontal cut).
    Crossing parities are homology invariants of closed configurations, so
    the four states are mutually orthogonal.
    """
    base = pattern_state(PatternSpec.make(lat, ()))
    col_cut = [lat.qubit(r, lat.n_cols - 1, 1) for r in range(lat.n_rows)]
    row_cut = [lat.qubit(lat.n_rows - 1, c, 2) for c in range(lat.n_cols)]

    def parity(qubits) -> np.ndarray:
        p = np.zeros(len(base), dtype=np.uint64)
        for q in qubits:
            p ^= (base.keys[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)
        return p.astype(np.int64)

    p_col = parity(col_cut)
    p_row = parity(row_cut)
    out = []
    for a in (0, 1):
        for b in (0, 1):
            signs = 1.0 - 2.0 * ((a * p_col + b * p_row) % 2)
            out.append(SparseState(lat, base.keys, base.amps * signs,
                                   canonical=True))
    return out


# -- exact strip energies without materializing phi ----------------------------


def _merged_weight_norm2(states: Sequence[SparseState], qubits,
                         projector: LocalProjector) -> float:
    """||P (sum of states)||^2 via kernel coefficients, exploiting that the
    states' supports are disjoint outside any common rest group."""
    key_cols = []
    vals = []
    for st in states:
        w, rest_rows = projected_group_weights(st, qubits, projector)
        wc = w.tocoo()
        if wc.nnz == 0:
            continue
        keys = np.concatenate(
            [rest_rows[wc.col], wc.row.astype(np.uint64)[:, None]], axis=1)
        key_cols.append(keys)
        vals.append(wc.data)
    if not key_cols:
        return 0.0
    merged_keys, merged_vals = canonicalize(
        np.concatenate(key_cols, axis=0), np.concatenate(vals), drop_tol=0.0)
    del merged_keys
    return float(np.sum(np.abs(merged_vals) ** 2))


def phi_rayleigh_exact(lat: Torus, region1: RegionSpec, region2: RegionSpec,
                       window: LocalProjector | None = None,
                       budget: int = 1 << 22) -> tuple[float, dict]:
    """Exact Rayleigh quotient of the two-defect sum, term by term.

    Patterns with different defect positions have disjoint supports, and a
    window term annihilates every pattern whose defects both avoid it; what
    remains is, per term, the energy of the few patterns with a defect
    inside the window.  This evaluates the same quotient as rayleigh() on
    the materialized state but touches one pattern at a time.
    """
    if window is None:
        window = LocalProjector(toric_window_span("uncle-sum"))
    H = assemble_torus(window, lat.n_rows, lat.n_cols)
    sep = _torus_separation(lat, region1, region2)
    if sep < 2:
        raise ValueError("regions must be separated by >= 2 sites")
    sites1 = region1.sites(lat)
    sites2 = region2.sites(lat)
    report = gf2_count(PatternSpec.make(lat, (sites1[0], sites2[0])))
    if not report.feasible:
        raise ValueError("two-defect patterns are infeasible on this lattice")
    k_pattern = report.norm_sq
    norm2 = len(sites1) * len(sites2) * k_pattern

    def near_terms(sites: Sequence[int]) -> list:
        wanted = set(sites)
        return [t for t in H.terms if wanted & set(t.sites)]

    def one_side(sites_a: Sequence[int], sites_b: Sequence[int]) -> float:
        # terms whose window touches region A; defect b is a spectator
        terms = near_terms(sites_a)
        for t in terms:
            if set(t.sites) & set(sites_b):
                raise ValueError("a window term touches both regions")
        energy = 0.0
        for b in sites_b:
            cache = {a: pattern_state(PatternSpec.make(lat, tuple(sorted((a, b)))),
                                      budget=budget)
                     for a in sites_a}
            for st in cache.values():
                if abs(st.norm2 - k_pattern) > 1e-9:
                    raise AssertionError("pattern norm differs from its count")
            for t in terms:
                inside = [a for a in sites_a if a in set(t.sites)]
                states = [cache[a] for a in inside]
                e = sum(s.norm2 for s in states)
                e -= _merged_weight_norm2(states, t.qubits, t.projector)
                energy += e
        return energy

    energy = one_side(sites1, sites2) + one_side(sites2, sites1)
    details = {
        "norm2": norm2,
        "pattern_norm2": k_pattern,
        "n_patterns": len(sites1) * len(sites2),
        "n_near_terms": len(near_terms(sites1)) + len(near_terms(sites2)),
        "energy": energy,
    }
    return energy / norm2, details


def phi_energy_bound(r: int, lat: Torus | None = None,
                     shape: str = "square") -> float:
    """Counting upper bound on the two-defect Rayleigh quotient.

    Square r x r regions: at most 8r window terms overlap a region
    boundary, each contributing at most 2 r^2 of the r^4 weight, so the
    quotient is at most 16/r.  Full-height strips of width r on an
    N-row torus: 4N boundary terms, each contributing at most 2 N r of
    the (N r)^2 weight, so at most 8/r.
    """
    if r < 1:
        raise ValueError("region width must be positive")
    if shape == "square":
        if lat is not None:
            fits_h = lat.n_rows >= r and lat.n_cols >= 2 * r + 2
            fits_v = lat.n_cols >= r and lat.n_rows >= 2 * r + 2
            if not (fits_h or fits_v):
                raise ValueError("two separated r x r squares do not fit")
        return 16.0 / r
    if shape == "strip":
        if lat is not None and lat.n_cols < 2 * r + 2:
            raise ValueError("two separated width-r strips do not fit")
        return 8.0 / r
    raise ValueError("shape must be 'square' or 'strip'")


def interior_term_energies(H: GlobalHamiltonian, psi: SparseState,
                           regions: Sequence[RegionSpec]) -> np.ndarray:
    """Energies of the terms whose windows avoid every region."""
    lat = H.lattice
    outside = []
    covered = set()
    for reg in regions:
        covered |= set(reg.sites(lat))
    for i, t in enumerate(H.terms):
        if not covered & set(t.sites):
            outside.append(i)
    energies = term_energies(H, psi)
    return energies[outside]


# -- chain concatenation --------------------------------------------------------


@dataclass(frozen=True)
class ConcatBlock:
    """A window fragment to splice into an all-zero background chain."""

    offset: int
    fragment: SparseState | None

    @classmethod
    def empty(cls) -> "ConcatBlock":
        return cls(0, None)

    @property
    def width(self) -> int:
        if self.fragment is None:
            return 0
        return self.fragment.lattice.n_sites


def concat_state(chain: Chain, block1: ConcatBlock,
                 block2: ConcatBlock | None = None,
                 separation: int = 2) -> SparseState:
    """Place one or two window fragments on an all-zero periodic background.

    Amplitudes multiply, so the result is the product state of the two
    fragments and zeros elsewhere.  The windows must be disjoint with at
    least ``separation`` background sites between them on both sides
    (cyclically); separation below 2 is rejected.
    """
    if separation < 2:
        raise ValueError("windows must be separated by at least two sites")
    n = chain.n_sites
    blocks = [b for b in (block1, block2 or ConcatBlock.empty())
              if b.width > 0]
    for b in blocks:
        if not (0 <= b.offset and b.offset + b.width <= n):
            raise ValueError("block does not fit on the chain")
    if len(blocks) == 2:
        a, b = sorted(blocks, key=lambda blk: blk.offset)
        gap_inner = b.offset - (a.offset + a.width)
        gap_outer = n - (b.offset + b.width) + a.offset
        if gap_inner < separation or gap_outer < separation:
            raise ValueError(
                f"blocks are separated by {min(gap_inner, gap_outer)} "
                f"background sites; need {separation}")
    nw = key_words(chain.n_qubits)
    keys = np.zeros((1, nw), dtype=np.uint64)
    amps = np.ones(1)
    for blk in blocks:
        bk = blk.fragment.keys
        ba = blk.fragment.amps
        shifted = np.zeros((len(ba), nw), dtype=np.uint64)
        for q in range(blk.width):
            bit = (bk[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)
            g = q + blk.offset
            shifted[:, g >> 6] |= bit << np.uint64(g & 63)
        keys = (keys[:, None, :] | shifted[None, :, :]).reshape(-1, nw)
        amps = (amps[:, None] * ba[None, :]).reshape(-1)
    return SparseState(chain, keys, amps)
