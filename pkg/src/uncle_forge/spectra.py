"""Eigenvalue machinery: dense spectra, deflated Krylov extremal eigenpairs,
certified ground spaces, and subspace intersection by alternating projection.

Everything here reports residuals; a result that cannot be backed by a
residual below its tolerance is raised as an error, not returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import eigh, svd

from .hamiltonian import GlobalHamiltonian, apply_dense, dense_matrix
from .kernels import KernelSpace, NoConvergence, _FactoredBasis, _b_x, _bt_x
from .sparse_state import SparseState

TAU_NULL = 1e-8
TAU_GAP = 1e-4


class CertificationError(RuntimeError):
    """A claimed ground space failed its residual or gap check."""


@dataclass
class SpectralResult:
    """Eigenvalues in ascending order with the evidence behind them."""

    eigenvalues: np.ndarray
    residuals: np.ndarray | None
    null_dim: int | None
    meta: dict = field(default_factory=dict)
    eigenvectors: np.ndarray | None = None


def dense_spectrum(H: GlobalHamiltonian, tau_null: float = TAU_NULL,
                   vectors: bool = True,
                   max_qubits: int = 13) -> SpectralResult:
    """Full spectrum by dense diagonalization (capped at 2^13 dimensions).

    With vectors=True (the default) every eigenpair's residual is computed;
    vectors=False skips residuals for a faster values-only pass.
    """
    m = dense_matrix(H, max_qubits=max_qubits)
    if vectors:
        w, v = eigh(m)
        res = np.empty_like(w)
        chunk = 512
        for i in range(0, len(w), chunk):
            block = v[:, i:i + chunk]
            r = m @ block - block * w[i:i + chunk]
            res[i:i + chunk] = np.linalg.norm(r, axis=0)
        null_dim = int(np.sum(w < tau_null))
        return SpectralResult(w, res, null_dim, {"solver": "eigh"}, v)
    w = np.linalg.eigvalsh(m)
    null_dim = int(np.sum(w < tau_null))
    return SpectralResult(w, None, null_dim, {"solver": "eigvalsh"})


def _deflation_columns(deflate, dim: int) -> np.ndarray | None:
    if deflate is None:
        return None
    if isinstance(deflate, KernelSpace):
        q = deflate.dense_basis(max_ambient=1 << 21)
    else:
        q = np.asarray(deflate, dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        q, _ = np.linalg.qr(q)
    if q.shape[0] != dim:
        raise ValueError("deflation space dimension mismatch")
    return q


def _lowest_pair(H: GlobalHamiltonian, tol: float, seed: int,
                 q: np.ndarray | None, cap: int
                 ) -> tuple[float, np.ndarray, float, int, int]:
    """One smallest eigenpair of H orthogonal to the columns of q.

    Lanczos with full reorthogonalization (two classical Gram-Schmidt
    passes) and random restarts on breakdown.  The reported residual is
    ||H v - theta v|| against the full operator, not the deflated one.
    Returns (theta, v, residual, iterations, restarts).
    """
    dim = H.dim
    rng = np.random.default_rng(seed)

    def defl(x: np.ndarray) -> np.ndarray:
        if q is not None:
            x = x - q @ (q.conj().T @ x)
        return x

    basis: list[np.ndarray] = []
    h_basis: list[np.ndarray] = []
    t_cols: list[np.ndarray] = []

    v = defl(rng.standard_normal(dim))
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise NoConvergence("the deflated complement is (numerically) empty")
    v /= nv

    theta = 0.0
    res = np.inf
    ritz = v
    converged = False
    n_restarts = 0

    for it in range(cap):
        w = apply_dense(H, v)
        basis.append(v)
        h_basis.append(w)
        vmat = np.stack(basis, axis=1)
        t_cols.append(vmat.conj().T @ w)

        # the breakdown threshold is relative to ||H v||: normalizing a
        # near-zero remainder would amplify roundoff components along the
        # deflated directions and let a locked eigenvector be found again
        w_scale = max(1.0, float(np.linalg.norm(w)))
        for _ in range(2):
            w = defl(w)
            w = w - vmat @ (vmat.conj().T @ w)
        beta = np.linalg.norm(w)
        exhausted = False
        if beta > 1e-10 * w_scale:
            v = w / beta
        else:
            v = rng.standard_normal(dim)
            for _ in range(2):
                v = defl(v)
                v = v - vmat @ (vmat.conj().T @ v)
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                # the basis spans an invariant subspace of the complement
                exhausted = True
            else:
                v = v / nv
                n_restarts += 1

        m = len(basis)
        if exhausted or m == cap or (m >= min(7, cap) and m % 5 == 0):
            t = np.zeros((m, m), dtype=np.result_type(*t_cols))
            for j, col in enumerate(t_cols):
                t[: len(col), j] = col
            # columns fill the upper triangle; reflect it to the lower
            t = np.triu(t) + np.triu(t, 1).conj().T
            theta_all, y = eigh(t)
            theta = float(theta_all[0])
            ritz = vmat @ y[:, 0]
            h_ritz = np.stack(h_basis, axis=1) @ y[:, 0]
            res = float(np.linalg.norm(h_ritz - theta * ritz))
            scale = max(1.0, float(np.abs(theta_all).max()))
            if res <= tol * scale:
                converged = True
                break
            if exhausted:
                break

    if not converged:
        raise NoConvergence(
            f"Krylov iteration hit its cap of {cap} steps with residual "
            f"{res} (tol {tol})")
    return theta, ritz, res, len(basis), n_restarts


def lowest_eigs(H: GlobalHamiltonian, k: int = 1, tol: float = 1e-8,
                seed: int = 0, deflate=None,
                max_iter: int | None = None,
                budget_bytes: float = 1.5e9) -> SpectralResult:
    """Smallest k eigenvalues of H restricted to the orthogonal complement
    of the deflation space.

    Eigenpairs are extracted one at a time, each new pair deflated by the
    previously locked ones, so degenerate levels are resolved with their
    full multiplicity (a single-vector Krylov space sees only one copy).
    Convergence per pair means ||H v - theta v|| <= tol * max(1, |theta|max)
    with the iteration cap ten times the requested subspace size, counting
    at least ten vectors.
    """
    dim = H.dim
    cap = max_iter if max_iter is not None else 10 * max(k, 10)
    cap = min(cap, dim)
    if 2 * cap * dim * 8 > budget_bytes:
        raise MemoryError("Krylov basis would exceed the memory budget")
    q0 = _deflation_columns(deflate, dim)
    n_deflated = 0 if q0 is None else q0.shape[1]
    if dim - n_deflated < k:
        raise ValueError("requested more eigenpairs than the deflated "
                         "complement holds")

    locked: list[np.ndarray] = []
    vals: list[float] = []
    resids: list[float] = []
    iters = 0
    restarts = 0
    for j in range(k):
        cols = ([q0] if q0 is not None else []) + [v[:, None] for v in locked]
        q = np.concatenate(cols, axis=1) if cols else None
        theta, vec, res, it, rs = _lowest_pair(H, tol, seed + j, q, cap)
        locked.append(vec)
        vals.append(theta)
        resids.append(res)
        iters += it
        restarts += rs

    order = np.argsort(vals)
    meta = {"solver": "krylov", "iterations": iters, "seed": seed,
            "restarts": restarts, "deflated": n_deflated}
    return SpectralResult(np.asarray(vals)[order], np.asarray(resids)[order],
                          None, meta, np.stack(locked, axis=1)[:, order])


def ground_space(H: GlobalHamiltonian, tau_null: float = TAU_NULL,
                 tau_gap: float = TAU_GAP, candidates=None, seed: int = 0,
                 tol: float = 1e-6) -> KernelSpace:
    """The null space of a frustration-free Hamiltonian, with a gap witness.

    Without candidates the spectrum is computed densely (small systems).
    With candidates (states believed to span the null space) each one's
    residual is checked against tau_null, the candidates are orthonormalized,
    and the lowest eigenvalue in their orthogonal complement is computed;
    it must exceed tau_gap.  Failing either check raises CertificationError
    with the offending numbers.
    """
    if candidates is None:
        spec = dense_spectrum(H, tau_null=tau_null, vectors=True)
        nd = spec.null_dim
        basis = spec.eigenvectors[:, :nd]
        gap = float(spec.eigenvalues[nd]) if nd < len(spec.eigenvalues) else None
        return KernelSpace(basis, H.dim, tau_null,
                           provenance="ground-space-dense",
                           meta={"null_dim": nd, "gap": gap,
                                 "certified": "dense-spectrum"})

    cols = []
    deltas = []
    for c in candidates:
        vec = c.to_dense() if isinstance(c, SparseState) else np.asarray(c)
        nrm = np.linalg.norm(vec)
        if nrm == 0.0:
            raise CertificationError("zero candidate state")
        vec = vec / nrm
        delta = float(np.linalg.norm(apply_dense(H, vec)))
        deltas.append(delta)
        cols.append(vec)
    bad = [d for d in deltas if d >= tau_null]
    if bad:
        raise CertificationError(
            f"candidate residuals {bad} exceed tau_null={tau_null}")
    gen = np.stack(cols, axis=1)
    u, s, _ = svd(gen, full_matrices=False)
    keep = s > 1e-8 * s[0]
    q = u[:, keep]
    above = lowest_eigs(H, k=1, tol=tol, seed=seed, deflate=q)
    lam = float(above.eigenvalues[0])
    if lam <= tau_gap:
        raise CertificationError(
            f"smallest eigenvalue {lam:.3e} in the candidates' complement "
            f"is not above tau_gap={tau_gap}; the span may be incomplete")
    return KernelSpace(q, H.dim, tau_null, provenance="ground-space-certified",
                       meta={"null_dim": q.shape[1], "gap": lam,
                             "gap_residual": float(above.residuals[0]),
                             "candidate_residuals": deltas,
                             "certified": "candidates+gap"})


def spacing_stats(eigenvalues: np.ndarray,
                  interval: tuple[float, float] = (0.0, 2.0)) -> float:
    """Largest nearest-neighbor gap of the eigenvalues inside the interval.

    The interval endpoints count as sentinel points, so an empty interval
    reports its full width.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if hi <= lo:
        raise ValueError("empty interval")
    pts = np.sort(np.asarray(eigenvalues, dtype=float))
    pts = pts[(pts >= lo) & (pts <= hi)]
    grid = np.concatenate([[lo], pts, [hi]])
    return float(np.max(np.diff(grid)))


def intersect_alternating(spaces: Sequence[KernelSpace], seed: int = 0,
                          n_starts: int = 8, tol: float = 1e-10,
                          max_sweeps: int = 500,
                          rank_tol: float = 1e-8) -> KernelSpace:
    """Intersection of subspaces by cyclic alternating projection.

    Each of n_starts random unit vectors is projected cyclically onto the
    given spaces until a full sweep moves it by at most tol; the limits
    span the intersection.  The returned basis is stored in factored form
    (coefficients over the first space), so ambient dimensions around 2^24
    stay affordable.  Per-start diagnostics live in meta["starts"]; the
    fixed points' coefficient vectors in meta["fixed_point_coeffs"].

    For two subspaces the residual to each input space is checked to be
    non-increasing across sweeps, and a violation raises NoConvergence.
    """
    if len(spaces) < 2:
        raise ValueError("need at least two subspaces")
    ambient = spaces[0].ambient_dim
    if any(s.ambient_dim != ambient for s in spaces):
        raise ValueError("subspaces live in different ambient dimensions")
    rng = np.random.default_rng(seed)

    coeffs = []
    start_meta = []
    for s in range(n_starts):
        x = rng.standard_normal(ambient)
        x /= np.linalg.norm(x)
        prev_res = None
        sweeps = 0
        step = np.inf
        for sweep in range(max_sweeps):
            x_old = x
            res_here = []
            for space in spaces:
                px = space.project(x)
                res_here.append(float(np.linalg.norm(x - px)))
                x = px
            if len(spaces) == 2 and prev_res is not None:
                for r_new, r_old in zip(res_here, prev_res):
                    if r_new > r_old + 1e-10:
                        raise NoConvergence(
                            "alternating projection residual increased "
                            f"({r_old:.3e} -> {r_new:.3e})")
            prev_res = res_here
            step = float(np.linalg.norm(x - x_old))
            sweeps = sweep + 1
            if step <= tol * max(1.0, float(np.linalg.norm(x))):
                break
        else:
            raise NoConvergence(
                f"alternating projection hit {max_sweeps} sweeps with last "
                f"full-sweep change {step:.3e} (slow principal angle)")
        # land exactly in the first space and keep coefficients over it
        x = spaces[0].project(x)
        w = _bt_x(spaces[0].basis, x)
        norm = float(np.linalg.norm(x))
        start_meta.append({"sweeps": sweeps, "step": step, "norm": norm,
                           "residuals": prev_res})
        coeffs.append(w)

    good = [w for w in coeffs if np.linalg.norm(w) > 1e-10]
    if good:
        mat = np.stack(good, axis=1)
        u, sv, _ = svd(mat, full_matrices=False)
        keep = sv > rank_tol * sv[0] if sv.size else np.zeros(0, bool)
        coeff_basis = u[:, keep]
    else:
        coeff_basis = np.zeros((spaces[0].rank, 0))
    basis = _FactoredBasis(spaces[0].basis, coeff_basis)
    return KernelSpace(
        basis, ambient, rank_tol,
        provenance=f"alternating-intersection({len(spaces)} spaces)",
        meta={"starts": start_meta, "fixed_point_coeffs": coeffs,
              "base_space": spaces[0], "n_starts": n_starts, "tol": tol})


def fixed_point_vector(intersection: KernelSpace, i: int) -> np.ndarray:
    """Reconstruct the i-th start's fixed point as a dense vector."""
    base = intersection.meta["base_space"]
    w = intersection.meta["fixed_point_coeffs"][i]
    return _b_x(base.basis, w)
