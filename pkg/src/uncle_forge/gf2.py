"""Bit-packed linear algebra over GF(2).

Rows are stored as uint64 words, 64 variables per word, variable ``j`` in
bit ``j & 63`` of word ``j >> 6``.  Elimination always pivots columns in
increasing variable order, so ranks, particular solutions, and null bases
are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def n_words(n_vars: int) -> int:
    return max(1, (n_vars + 63) >> 6)


def pack_rows(rows: np.ndarray) -> np.ndarray:
    """Pack a (R, n_vars) 0/1 array into (R, n_words) uint64 words."""
    rows = np.asarray(rows, dtype=np.uint64)
    r, nv = rows.shape
    out = np.zeros((r, n_words(nv)), dtype=np.uint64)
    for j in range(nv):
        out[:, j >> 6] |= rows[:, j] << np.uint64(j & 63)
    return out


def get_bit(words: np.ndarray, j: int) -> np.ndarray:
    return (words[..., j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


def set_bit(words: np.ndarray, j: int) -> None:
    words[..., j >> 6] |= np.uint64(1) << np.uint64(j & 63)


@dataclass
class Gf2Echelon:
    """Reduced row echelon form of a GF(2) system A x = b."""

    n_vars: int
    rank: int
    pivot_cols: list[int]
    rows: np.ndarray  # (R, n_words) uint64, reduced
    rhs: np.ndarray  # (R,) uint8
    feasible: bool

    @property
    def free_cols(self) -> list[int]:
        pivots = set(self.pivot_cols)
        return [j for j in range(self.n_vars) if j not in pivots]

    @property
    def log2_solutions(self) -> int | None:
        """log2 of the solution count, or None when infeasible."""
        if not self.feasible:
            return None
        return self.n_vars - self.rank

    def particular_solution(self) -> np.ndarray:
        """One packed solution, free variables set to zero."""
        if not self.feasible:
            raise ValueError("system is infeasible")
        x = np.zeros(n_words(self.n_vars), dtype=np.uint64)
        for i, col in enumerate(self.pivot_cols):
            if self.rhs[i]:
                set_bit(x, col)
        return x

    def null_basis(self) -> np.ndarray:
        """Packed basis of the solution space of A x = 0, one row per free column."""
        basis = np.zeros((len(self.free_cols), n_words(self.n_vars)),
                         dtype=np.uint64)
        for b, f in enumerate(self.free_cols):
            set_bit(basis[b], f)
            for i, col in enumerate(self.pivot_cols):
                if get_bit(self.rows[i], f):
                    set_bit(basis[b], col)
        return basis


def eliminate(rows: np.ndarray, rhs: np.ndarray, n_vars: int) -> Gf2Echelon:
    """Reduce A x = b over GF(2), pivoting columns in increasing order.

    Parameters
    ----------
    rows : (R, n_words) uint64
        Packed coefficient rows.  Not modified.
    rhs : (R,) array-like of 0/1
        Right-hand side bits.
    n_vars : int
        Number of variables.
    """
    rows = np.array(rows, dtype=np.uint64, copy=True)
    rhs = np.array(rhs, dtype=np.uint8, copy=True)
    n_rows = rows.shape[0]
    pivot_cols: list[int] = []
    r = 0
    for col in range(n_vars):
        if r == n_rows:
            break
        w = col >> 6
        mask = np.uint64(1) << np.uint64(col & 63)
        hits = np.nonzero((rows[r:, w] & mask) != 0)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            rows[[r, p]] = rows[[p, r]]
            rhs[[r, p]] = rhs[[p, r]]
        sel = np.nonzero((rows[:, w] & mask) != 0)[0]
        sel = sel[sel != r]
        if sel.size:
            rows[sel] ^= rows[r]
            rhs[sel] ^= rhs[r]
        pivot_cols.append(col)
        r += 1
    feasible = not bool(rhs[r:].any())
    return Gf2Echelon(n_vars=n_vars, rank=r, pivot_cols=pivot_cols,
                      rows=rows, rhs=rhs, feasible=feasible)


def enumerate_solutions(ech: Gf2Echelon, budget: int = 1 << 22) -> np.ndarray:
    """All packed solutions of A x = b, shape (count, n_words).

    The order is by binary counting over free columns (free column 0 is the
    fastest bit).  Raises MemoryError when the count exceeds ``budget``.
    """
    if not ech.feasible:
        return np.zeros((0, n_words(ech.n_vars)), dtype=np.uint64)
    k = ech.n_vars - ech.rank
    if k > 62 or (1 << k) > budget:
        raise MemoryError(
            f"2^{k} solutions exceed the enumeration budget {budget}")
    count = 1 << k
    basis = ech.null_basis()
    sols = np.tile(ech.particular_solution(), (count, 1))
    idx = np.arange(count, dtype=np.uint64)
    for b in range(k):
        sel = (idx >> np.uint64(b)) & np.uint64(1) != 0
        sols[sel] ^= basis[b]
    return sols
