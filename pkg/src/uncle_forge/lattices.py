"""Lattice geometries and the global bit-labeling conventions.

A chain site ``i`` owns qubit ``i``.  A 2D site ``(r, c)`` owns four qubits,
one per virtual leg, at bit ``4*(r*n_cols + c) + leg`` with legs ordered
N, E, S, W.  Every internal edge pairs one leg of each endpoint; on tori of
height or width 2 the two parallel edges between neighboring sites are kept
as distinct edges (the multigraph, not the simple graph, matches the tensor
network).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEG_N, LEG_E, LEG_S, LEG_W = 0, 1, 2, 3
LEG_NAMES = "NESW"


@dataclass(frozen=True)
class Chain:
    """One-dimensional lattice with one qubit per site."""

    n_sites: int
    periodic: bool = True

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("chain needs at least one site")

    @property
    def n_qubits(self) -> int:
        return self.n_sites

    def shift_permutation(self, offset: int = 1) -> np.ndarray:
        """Qubit permutation for the translation site i -> i + offset."""
        if not self.periodic:
            raise ValueError("translation needs a periodic chain")
        n = self.n_sites
        return (np.arange(n) + offset) % n


@dataclass(frozen=True)
class Edge:
    """An internal edge: two leg qubits forced to carry equal bits."""

    kind: str  # "h" or "v"
    row: int
    col: int
    qubit_a: int
    qubit_b: int


class _Grid2D:
    """Shared site/leg indexing for Torus and Patch."""

    n_rows: int
    n_cols: int

    @property
    def n_sites(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def n_qubits(self) -> int:
        return 4 * self.n_sites

    def site_index(self, row: int, col: int) -> int:
        return (row % self.n_rows) * self.n_cols + (col % self.n_cols)

    def qubit(self, row: int, col: int, leg: int) -> int:
        """Global bit position of the given leg, legs ordered N,E,S,W."""
        if not 0 <= leg < 4:
            raise ValueError("leg must be 0..3 (N,E,S,W)")
        return 4 * self.site_index(row, col) + leg

    def site_qubits(self, site: int) -> tuple[int, int, int, int]:
        return (4 * site, 4 * site + 1, 4 * site + 2, 4 * site + 3)

    def decode_qubit(self, q: int) -> tuple[int, int, int]:
        """Inverse of qubit(): (row, col, leg)."""
        site, leg = divmod(q, 4)
        row, col = divmod(site, self.n_cols)
        return row, col, leg


@dataclass(frozen=True)
class Torus(_Grid2D):
    """N x M torus of 4-leg sites, periodic in both directions."""

    n_rows: int
    n_cols: int

    def __post_init__(self):
        if self.n_rows < 2 or self.n_cols < 2:
            raise ValueError("torus needs at least 2 rows and 2 columns")

    @property
    def edges(self) -> tuple[Edge, ...]:
        """All 2*N*M edges: horizontal row-major, then vertical row-major.

        h(r,c) joins (r,c).E with (r,c+1).W; v(r,c) joins (r,c).S with
        (r+1,c).N, indices wrapping.  For n_rows == 2 the edges v(0,c) and
        v(1,c) are distinct parallel edges, likewise h on width 2.
        """
        out = []
        for r in range(self.n_rows):
            for c in range(self.n_cols):
                out.append(Edge("h", r, c, self.qubit(r, c, LEG_E),
                                self.qubit(r, c + 1, LEG_W)))
        for r in range(self.n_rows):
            for c in range(self.n_cols):
                out.append(Edge("v", r, c, self.qubit(r, c, LEG_S),
                                self.qubit(r + 1, c, LEG_N)))
        return tuple(out)

    @property
    def n_edges(self) -> int:
        return 2 * self.n_sites

    def shift_permutation(self, d_row: int = 0, d_col: int = 1) -> np.ndarray:
        """Qubit permutation translating site (r,c) -> (r+d_row, c+d_col)."""
        perm = np.empty(self.n_qubits, dtype=np.int64)
        for r in range(self.n_rows):
            for c in range(self.n_cols):
                for leg in range(4):
                    perm[self.qubit(r, c, leg)] = self.qubit(
                        r + d_row, c + d_col, leg)
        return perm


@dataclass(frozen=True)
class Patch(_Grid2D):
    """Open n x m patch: internal edges inside, free legs on the perimeter."""

    n_rows: int
    n_cols: int

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("patch needs at least one site")

    @property
    def edges(self) -> tuple[Edge, ...]:
        out = []
        for r in range(self.n_rows):
            for c in range(self.n_cols - 1):
                out.append(Edge("h", r, c, self.qubit(r, c, LEG_E),
                                self.qubit(r, c + 1, LEG_W)))
        for r in range(self.n_rows - 1):
            for c in range(self.n_cols):
                out.append(Edge("v", r, c, self.qubit(r, c, LEG_S),
                                self.qubit(r + 1, c, LEG_N)))
        return tuple(out)

    @property
    def boundary_qubits(self) -> tuple[int, ...]:
        """Perimeter legs in (site row-major, leg N,E,S,W) order."""
        out = []
        for r in range(self.n_rows):
            for c in range(self.n_cols):
                for leg in range(4):
                    if (
                        (leg == LEG_N and r == 0)
                        or (leg == LEG_E and c == self.n_cols - 1)
                        or (leg == LEG_S and r == self.n_rows - 1)
                        or (leg == LEG_W and c == 0)
                    ):
                        out.append(self.qubit(r, c, leg))
        return tuple(out)


Lattice = Chain | Torus | Patch
