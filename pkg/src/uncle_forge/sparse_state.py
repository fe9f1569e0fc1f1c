"""Sparse amplitude maps over computational basis configurations.

A state stores (configuration, amplitude) pairs; a configuration is the
integer whose bit q is the value of qubit q, packed into uint64 words
(word 0 carries qubits 0..63).  States are kept in a canonical byte-wise
key order so set operations reduce to merges on sorted arrays.  States are
not normalized and amplitudes below an absolute drop tolerance of 1e-14
are discarded after arithmetic.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

DROP_TOL = 1e-14


def key_words(n_qubits: int) -> int:
    return max(1, (n_qubits + 63) >> 6)


def _byte_view(keys: np.ndarray) -> np.ndarray:
    """Fixed-size byte view of packed key rows; defines the canonical order.

    The order is a memcmp over the raw little-endian words.  It is a fixed
    total order, not the numeric one, and every sort/search in this module
    goes through it.
    """
    keys = np.ascontiguousarray(keys)
    return keys.view(f"V{8 * keys.shape[1]}").reshape(-1)


def canonicalize(keys: np.ndarray, amps: np.ndarray,
                 drop_tol: float = DROP_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Sort keys, merge duplicates, drop negligible amplitudes."""
    if keys.shape[0] == 0:
        return keys, amps
    view = _byte_view(keys)
    order = np.argsort(view, kind="stable")
    keys = keys[order]
    amps = amps[order]
    view = view[order]
    boundary = np.empty(len(view), dtype=bool)
    boundary[0] = True
    boundary[1:] = view[1:] != view[:-1]
    starts = np.nonzero(boundary)[0]
    merged = np.add.reduceat(amps, starts)
    keys = keys[starts]
    keep = np.abs(merged) > drop_tol
    return keys[keep], merged[keep]


def ints_to_words(values: Iterable[int], words: int) -> np.ndarray:
    vals = list(values)
    out = np.zeros((len(vals), words), dtype=np.uint64)
    for i, v in enumerate(vals):
        v = int(v)
        for w in range(words):
            out[i, w] = (v >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def words_to_int(row: np.ndarray) -> int:
    total = 0
    for w in range(row.shape[0] - 1, -1, -1):
        total = (total << 64) | int(row[w])
    return total


class SparseState:
    """Unnormalized sparse vector over the configurations of a lattice."""

    __slots__ = ("lattice", "keys", "amps")

    def __init__(self, lattice, keys: np.ndarray, amps: np.ndarray, *,
                 canonical: bool = False):
        nw = key_words(lattice.n_qubits)
        keys = np.asarray(keys, dtype=np.uint64).reshape(-1, nw)
        amps = np.asarray(amps)
        if amps.dtype.kind not in "fc":
            amps = amps.astype(np.float64)
        if keys.shape[0] != amps.shape[0]:
            raise ValueError("keys and amplitudes disagree in length")
        if not canonical:
            keys, amps = canonicalize(keys, amps)
        self.lattice = lattice
        self.keys = keys
        self.amps = amps

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, lattice) -> "SparseState":
        nw = key_words(lattice.n_qubits)
        return cls(lattice, np.zeros((0, nw), dtype=np.uint64),
                   np.zeros(0), canonical=True)

    @classmethod
    def from_items(cls, lattice, items: Iterable[tuple[int, complex]]
                   ) -> "SparseState":
        items = list(items)
        nw = key_words(lattice.n_qubits)
        keys = ints_to_words((k for k, _ in items), nw)
        amps = np.array([a for _, a in items])
        return cls(lattice, keys, amps)

    @classmethod
    def from_dense(cls, lattice, vec: np.ndarray,
                   drop_tol: float = DROP_TOL) -> "SparseState":
        vec = np.asarray(vec).reshape(-1)
        if vec.shape[0] != 1 << lattice.n_qubits:
            raise ValueError("dense vector has the wrong dimension")
        idx = np.nonzero(np.abs(vec) > drop_tol)[0]
        nw = key_words(lattice.n_qubits)
        keys = np.zeros((idx.size, nw), dtype=np.uint64)
        keys[:, 0] = idx.astype(np.uint64)
        return cls(lattice, keys, vec[idx], canonical=False)

    # -- basics ------------------------------------------------------------

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_qubits

    def __len__(self) -> int:
        return self.keys.shape[0]

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.norm2))

    def items(self) -> Iterator[tuple[int, complex]]:
        """(configuration, amplitude) pairs in canonical key order."""
        for i in range(len(self)):
            yield words_to_int(self.keys[i]), self.amps[i]

    def amplitude(self, config: int) -> complex:
        nw = self.keys.shape[1]
        probe = _byte_view(ints_to_words([config], nw))
        view = _byte_view(self.keys)
        pos = np.searchsorted(view, probe[0])
        if pos < len(view) and view[pos] == probe[0]:
            return self.amps[pos]
        return 0.0

    # -- arithmetic --------------------------------------------------------

    def scaled(self, factor: complex) -> "SparseState":
        if factor == 0:
            return SparseState.zero(self.lattice)
        return SparseState(self.lattice, self.keys, self.amps * factor,
                           canonical=True)

    def add(self, other: "SparseState", alpha: complex = 1.0,
            beta: complex = 1.0) -> "SparseState":
        """alpha * self + beta * other."""
        if other.lattice.n_qubits != self.n_qubits:
            raise ValueError("states live on different qubit counts")
        keys = np.concatenate([self.keys, other.keys], axis=0)
        amps = np.concatenate([alpha * self.amps, beta * other.amps])
        return SparseState(self.lattice, keys, amps)

    def vdot(self, other: "SparseState") -> complex:
        """<self|other> with the left side conjugated."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("states live on different qubit counts")
        va = _byte_view(self.keys)
        vb = _byte_view(other.keys)
        pos = np.searchsorted(va, vb)
        pos_c = np.minimum(pos, len(va) - 1) if len(va) else pos
        hit = np.zeros(len(vb), dtype=bool)
        if len(va):
            hit = va[pos_c] == vb
        out = np.sum(np.conj(self.amps[pos_c[hit]]) * other.amps[hit])
        if self.amps.dtype.kind == "f" and other.amps.dtype.kind == "f":
            return float(out)
        return complex(out)

    def translate(self, perm: np.ndarray) -> "SparseState":
        """Relabel qubits: output bit perm[q] is the input bit q."""
        perm = np.asarray(perm, dtype=np.int64)
        if perm.shape[0] != self.n_qubits:
            raise ValueError("permutation length must match the qubit count")
        nw = self.keys.shape[1]
        out = np.zeros_like(self.keys)
        for q in range(self.n_qubits):
            bits = (self.keys[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)
            t = int(perm[q])
            out[:, t >> 6] |= bits << np.uint64(t & 63)
        return SparseState(self.lattice, out, self.amps.copy())

    def to_dense(self, max_qubits: int = 24) -> np.ndarray:
        if self.n_qubits > max_qubits:
            raise MemoryError(
                f"refusing dense vector on {self.n_qubits} qubits "
                f"(cap {max_qubits})")
        vec = np.zeros(1 << self.n_qubits, dtype=self.amps.dtype)
        vec[self.keys[:, 0].astype(np.int64)] = self.amps
        return vec

    def __repr__(self) -> str:
        return (f"SparseState(n_qubits={self.n_qubits}, nnz={len(self)}, "
                f"norm2={self.norm2:.6g})")
