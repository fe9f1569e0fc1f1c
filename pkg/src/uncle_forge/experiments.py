"""Reproducible experiment runners with JSON/CSV reports and caching.

Each runner takes an ExperimentConfig, computes a list of flat record
dicts plus named pass/fail checks, and returns an ExperimentResult.  The
run() wrapper persists results under a content hash of the scientific
part of the configuration, so re-running with identical settings loads
the cached report byte for byte (wall time excluded from the hash).
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .gallery import (ConcatBlock, RegionSpec, concat_state, gf2_count,
                      ghz_domain_state, interior_term_energies,
                      phi_energy_bound, phi_rayleigh_exact,
                      toric_closure_states, toric_phi)
from .hamiltonian import (GlobalHamiltonian, LocalProjector, PlacedTerm,
                          apply, apply_dense, assemble_chain, assemble_torus,
                          rayleigh)
from .kernels import (KernelSpace, NoConvergence, containment_residual,
                      embed_kernel, epsilon_kernel, mps_kernel, region_span,
                      subspace_distance, toric_window_span, uncle_kernel_ghz,
                      uncle_limit)
from .lattices import Chain, Patch, Torus
from .sparse_state import SparseState
from .spectra import (CertificationError, dense_spectrum, fixed_point_vector,
                      ground_space, intersect_alternating, spacing_stats)
from .tensors import PerturbationSpec, ghz_mps, PatternSpec, pattern_state

EXPERIMENTS = ("ghz-gap", "density", "epsilon-limit", "toric-ground",
               "phi-sweep", "prop1", "additivity")

_DEFAULTS: dict[str, dict] = {
    "ghz-gap": {"sizes": tuple(range(4, 15))},
    "density": {"sizes": (8, 10, 12)},
    "epsilon-limit": {"eps_grid": (1e-1, 1e-2, 1e-3, 1e-4)},
    "toric-ground": {},
    "phi-sweep": {"sizes": (18,), "r_values": (3, 4, 5, 6, 7)},
    "prop1": {},
    "additivity": {"sizes": (16,)},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Scientific settings plus output plumbing for one experiment."""

    experiment: str
    seed: int = 7
    sizes: tuple[int, ...] | None = None
    r_values: tuple[int, ...] | None = None
    eps_grid: tuple[float, ...] | None = None
    tau_null: float = 1e-8
    tau_gap: float = 1e-4
    backend: str = "auto"
    out_dir: str | None = None
    force: bool = False
    quiet: bool = False

    def resolved(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment '{self.experiment}'")
        updates = {}
        for key, val in _DEFAULTS[self.experiment].items():
            if getattr(self, key) is None:
                updates[key] = val
        return replace(self, **updates) if updates else self

    def science_dict(self) -> dict:
        """The fields that define the computation (not where it goes)."""
        d = asdict(self)
        for key in ("out_dir", "force", "quiet"):
            d.pop(key)
        return _jsonable(d)

    def digest(self) -> str:
        blob = json.dumps(self.science_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class ExperimentResult:
    experiment: str
    config: dict
    records: list[dict]
    checks: dict[str, bool]
    wall_time_s: float
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_doc(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": self.version,
            "config": _jsonable(self.config),
            "records": _jsonable(self.records),
            "checks": _jsonable(self.checks),
            "passed": self.passed,
            "wall_time_s": round(float(self.wall_time_s), 3),
        }


def resolve_out_dir(config: ExperimentConfig) -> Path:
    out = config.out_dir or os.environ.get("UNCLE_FORGE_OUT") or "runs"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_result(result: ExperimentResult, out_dir: Path,
                 digest: str) -> Path:
    base = out_dir / f"{result.experiment}-{digest}"
    doc = result.to_doc()
    json_path = base.with_suffix(".json")
    json_path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    columns = sorted({k for rec in result.records for k in rec})
    with open(base.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="")
        writer.writeheader()
        for rec in result.records:
            writer.writerow({k: _jsonable(v) for k, v in rec.items()})
    return json_path


def load_result(path: Path) -> ExperimentResult:
    doc = json.loads(path.read_text())
    return ExperimentResult(doc["experiment"], doc["config"], doc["records"],
                            doc["checks"], doc["wall_time_s"], doc["version"])


def run(config: ExperimentConfig) -> tuple[ExperimentResult, Path, bool]:
    """Run (or load) one experiment; returns (result, json_path, cached)."""
    cfg = config.resolved()
    out_dir = resolve_out_dir(cfg)
    digest = cfg.digest()
    path = out_dir / f"{cfg.experiment}-{digest}.json"
    if path.exists() and not cfg.force:
        return load_result(path), path, True
    runner = _RUNNERS[cfg.experiment]
    t0 = time.perf_counter()
    records, checks = runner(cfg)
    result = ExperimentResult(cfg.experiment, cfg.science_dict(), records,
                              checks, time.perf_counter() - t0)
    write_result(result, out_dir, digest)
    return result, path, False


# -- shared builders -----------------------------------------------------------


def ghz_parent_term() -> LocalProjector:
    return LocalProjector(mps_kernel(ghz_mps(), 3))


def ghz_uncle_term() -> LocalProjector:
    return LocalProjector(uncle_kernel_ghz())


def _ghz_sector_span(n: int) -> KernelSpace:
    """span{|0...0>, |1...1>} on an n-site chain."""
    basis = np.zeros((1 << n, 2))
    basis[0, 0] = 1.0
    basis[-1, 1] = 1.0
    return KernelSpace(basis, 1 << n, 0.0, provenance="ghz-sector-span")


def _uniform_states(n: int) -> list[SparseState]:
    chain = Chain(n, periodic=True)
    return [SparseState.from_items(chain, [(0, 1.0)]),
            SparseState.from_items(chain, [((1 << n) - 1, 1.0)])]


# -- runners -------------------------------------------------------------------


def run_ghz_gap(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Null dimensions, ground spaces, and first excited levels, both models."""
    terms = {"parent": ghz_parent_term(), "uncle": ghz_uncle_term()}
    records = []
    lam1 = {"parent": {}, "uncle": {}}
    null_ok = True
    dist_ok = True
    for n in cfg.sizes:
        for model, term in terms.items():
            h = assemble_chain(term, n)
            rec = {"n": n, "model": model}
            if n <= 12:
                spec = dense_spectrum(h, tau_null=cfg.tau_null,
                                      vectors=(n <= 10))
                rec["null_dim"] = spec.null_dim
                rec["lambda1"] = float(spec.eigenvalues[spec.null_dim])
                rec["solver"] = spec.meta["solver"]
                if spec.eigenvectors is not None:
                    gs = KernelSpace(spec.eigenvectors[:, :spec.null_dim],
                                     h.dim, cfg.tau_null, "dense-null-space")
                    rec["ground_distance"] = subspace_distance(
                        gs, _ghz_sector_span(n))
            if n > 10:
                gs = ground_space(h, tau_null=cfg.tau_null,
                                  tau_gap=cfg.tau_gap,
                                  candidates=_uniform_states(n),
                                  seed=cfg.seed)
                rec.setdefault("null_dim", gs.meta["null_dim"])
                rec.setdefault("lambda1", float(gs.meta["gap"]))
                rec.setdefault("solver", "krylov-certified")
                rec["ground_distance"] = subspace_distance(
                    gs, _ghz_sector_span(n))
                rec["gap_residual"] = gs.meta["gap_residual"]
            null_ok = null_ok and rec["null_dim"] == 2
            dist_ok = dist_ok and rec["ground_distance"] < 1e-8
            lam1[model][n] = rec["lambda1"]
            records.append(rec)

    probe = [n for n in cfg.sizes if n >= 6]
    parent_vals = [lam1["parent"][n] for n in probe]
    uncle_vals = [lam1["uncle"][n] for n in probe]
    checks = {
        "null_dim_is_2": null_ok,
        "ground_space_matches_sector_span": dist_ok,
        "parent_gap_flat": min(parent_vals) / max(parent_vals) > 0.8,
        "uncle_gap_decreasing": all(b < a for a, b in
                                    zip(uncle_vals, uncle_vals[1:])),
        "uncle_gap_halves": uncle_vals[-1] < 0.5 * uncle_vals[0],
    }
    return records, checks


def run_density(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Full uncle spectra and how their level spacings fill [0, 2]."""
    term = ghz_uncle_term()
    records = []
    gaps = []
    bounds_ok = True
    count_ok = True
    for n in cfg.sizes:
        h = assemble_chain(term, n)
        spec = dense_spectrum(h, tau_null=cfg.tau_null, vectors=True)
        w = spec.eigenvalues
        gap = spacing_stats(w, (0.0, 2.0))
        gaps.append(gap)
        count_ok = count_ok and len(w) == 1 << n
        bounds_ok = bounds_ok and float(w[0]) > -1e-9 and float(w[-1]) < n + 1e-9
        records.append({
            "n": n, "count": len(w), "lambda_min": float(w[0]),
            "lambda_max": float(w[-1]), "null_dim": spec.null_dim,
            "max_spacing_0_2": gap,
            "max_residual": float(np.max(spec.residuals)),
        })
    checks = {
        "eigenvalue_count": count_ok,
        "spectrum_in_range": bounds_ok,
        "spacings_strictly_decreasing": all(b < a for a, b in
                                            zip(gaps, gaps[1:])),
    }
    return records, checks


def run_epsilon_limit(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Perturbed kernels approaching the uncle kernel, generic and degenerate."""
    a = ghz_mps()
    target = uncle_kernel_ghz()
    p_gen = PerturbationSpec.seeded(cfg.seed)
    records = []
    for eps in cfg.eps_grid:
        ker = epsilon_kernel(a, p_gen, eps)
        records.append({
            "case": "generic", "eps": float(eps), "rank": ker.rank,
            "distance_to_uncle": subspace_distance(ker, target),
            "degenerate_direction": ker.meta["degenerate_direction"],
        })
    dists = [r["distance_to_uncle"] for r in records]
    slope = float(np.polyfit(np.log(np.asarray(cfg.eps_grid)),
                             np.log(np.asarray(dists)), 1)[0])

    parent = mps_kernel(a, 3)
    records.append({
        "case": "eps-zero", "eps": 0.0, "rank": parent.rank,
        "distance_to_uncle": subspace_distance(parent, target),
    })

    limit_gen = uncle_limit(a, p_gen, eps_grid=cfg.eps_grid)
    limit_gen_dist = subspace_distance(limit_gen, target)
    records.append({
        "case": "generic-limit", "eps": float(cfg.eps_grid[-1]),
        "rank": limit_gen.rank,
        "distance_to_uncle": limit_gen_dist,
        "stabilized": limit_gen.meta["stabilized"],
        "distances": list(limit_gen.meta["distances"]),
    })

    # the sharp degenerate case: both upper off-diagonal entries zero, so no
    # matrix-product path from boundary 0 to boundary 1 exists and the
    # |0,+,1>-type direction is absent from the kernel at every epsilon
    # (b0 + b1 = 0 with b0 nonzero turns out to restore the generic limit
    # at second order, so only this stratum changes the limit space)
    ent = p_gen.data
    p_deg = PerturbationSpec.from_ghz_entries(
        a=(ent[0, 0, 0], ent[1, 0, 0]),
        b=(0.0, 0.0),
        c=(ent[0, 1, 0], ent[1, 1, 0]),
        d=(ent[0, 1, 1], ent[1, 1, 1]))
    deg_flagged = True
    deg_records = []
    for eps in cfg.eps_grid:
        ker = epsilon_kernel(a, p_deg, eps)
        deg_flagged = deg_flagged and ker.meta["degenerate_direction"]
        deg_records.append({
            "case": "degenerate", "eps": float(eps), "rank": ker.rank,
            "distance_to_uncle": subspace_distance(ker, target),
        })
    records.extend(deg_records)
    limit_deg = uncle_limit(a, p_deg, eps_grid=cfg.eps_grid)
    deg_sep = subspace_distance(limit_deg, limit_gen)
    deg_dist_uncle = subspace_distance(limit_deg, target)
    records.append({
        "case": "degenerate-limit", "eps": float(cfg.eps_grid[-1]),
        "rank": limit_deg.rank, "distance_to_uncle": deg_dist_uncle,
        "distance_to_generic_limit": deg_sep,
        "stabilized": limit_deg.meta["stabilized"],
    })

    checks = {
        "slope_near_one": abs(slope - 1.0) <= 0.2,
        "ranks_are_4": all(r["rank"] == 4 for r in records
                           if r["case"] == "generic"),
        "degenerate_rank_drop": all(r["rank"] == 3 for r in records
                                    if r["case"] == "degenerate"),
        "eps_zero_is_parent": parent.rank == 2,
        "generic_limit_close": limit_gen_dist <= 1e-3,
        "degenerate_flagged": deg_flagged,
        "degenerate_limit_separated": deg_sep > 0.1,
    }
    records.append({"case": "fit", "slope": slope})
    return records, checks


def run_toric_ground(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Certified 2x2 toric ground spaces, plus the GF(2) counting laws."""
    parent_kernel = toric_window_span("parent-even")
    uncle_kernel = toric_window_span("uncle-sum")
    local_res = containment_residual(parent_kernel, uncle_kernel)
    records = [{
        "part": "window", "parent_rank": parent_kernel.rank,
        "uncle_rank": uncle_kernel.rank,
        "parent_in_uncle_residual": local_res,
    }]

    lat = Torus(2, 2)
    cands = toric_closure_states(lat)
    spaces = {}
    cert_ok = True
    for model, kernel in (("parent", parent_kernel), ("uncle", uncle_kernel)):
        h = assemble_torus(LocalProjector(kernel), 2, 2)
        try:
            gs = ground_space(h, tau_null=cfg.tau_null, tau_gap=cfg.tau_gap,
                              candidates=cands, seed=cfg.seed)
            spaces[model] = gs
            records.append({
                "part": "ground", "model": model, "n_rows": 2, "n_cols": 2,
                "null_dim": gs.meta["null_dim"], "gap": gs.meta["gap"],
                "max_candidate_residual":
                    float(max(gs.meta["candidate_residuals"])),
            })
        except (CertificationError, NoConvergence) as err:
            cert_ok = False
            records.append({"part": "ground", "model": model,
                            "error": str(err)})
    if len(spaces) == 2:
        mutual = subspace_distance(spaces["parent"], spaces["uncle"])
        ranks_equal = spaces["parent"].rank == spaces["uncle"].rank
    else:
        mutual, ranks_equal = 1.0, False
    records.append({"part": "compare", "mutual_distance": mutual,
                    "ranks_equal": ranks_equal})

    single = pattern_state(PatternSpec.make(lat, (0,)))
    records.append({"part": "single-defect", "n_rows": 2, "n_cols": 2,
                    "norm_sq": single.norm2})

    rank_law_ok = True
    enum_ok = True
    for n in range(2, 7):
        for m in range(n, 7):
            report = gf2_count(PatternSpec.make(Torus(n, m), ()))
            expected = n * m + 1
            rank_law_ok = rank_law_ok and report.log2_count == expected
            rec = {"part": "count", "n_rows": n, "n_cols": m,
                   "n_edges": report.n_edges, "rank": report.rank,
                   "log2_count": report.log2_count,
                   "log2_expected": expected}
            if report.n_edges <= 24:
                state = pattern_state(PatternSpec.make(Torus(n, m), ()),
                                      budget=1 << 25)
                rec["enumerated"] = len(state)
                enum_ok = enum_ok and len(state) == 1 << report.log2_count
            records.append(rec)

    checks = {
        "window_containment": local_res < 1e-10,
        "certified": cert_ok,
        "ranks_equal": ranks_equal,
        "ground_spaces_coincide": mutual < 1e-8,
        "single_defect_infeasible": single.norm2 == 0.0,
        "closed_config_count_law": rank_law_ok,
        "count_matches_enumeration": enum_ok,
    }
    return records, checks


def run_phi_sweep(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Defect-sum Rayleigh quotients: chain exponent and torus strips."""
    records = []

    # chain part: vary the maximum domain length r inside a fixed window
    n = cfg.sizes[0]
    window = min(14, n - 4)
    h_chain = assemble_chain(ghz_uncle_term(), n)
    quotients = []
    for r in cfg.r_values:
        phi = ghz_domain_state(n, r, window)
        q = rayleigh(h_chain, phi, backend=cfg.backend)
        quotients.append(q)
        records.append({"part": "chain", "n": n, "window": window, "r": r,
                        "n_configs": len(phi), "quotient": q})
    xs = np.log(np.asarray(cfg.r_values, dtype=float) - 1.0)
    slope = float(np.polyfit(xs, np.log(np.asarray(quotients)), 1)[0])
    records.append({"part": "chain-fit", "slope": slope})

    uncle = LocalProjector(toric_window_span("uncle-sum"))

    # square part: one defect pair on a 4 x 4 torus, interior windows silent
    lat44 = Torus(4, 4)
    h44 = assemble_torus(uncle, 4, 4)
    r1 = RegionSpec(0, 0, 1, 1)
    r2 = RegionSpec(0, 2, 1, 1)
    phi44 = toric_phi(lat44, r1, r2)
    interior = interior_term_energies(h44, phi44, [r1, r2])
    interior_rel = float(np.max(np.abs(interior))) / phi44.norm2
    q44 = rayleigh(h44, phi44, backend="sparse")
    q44_dec, det44 = phi_rayleigh_exact(lat44, r1, r2, window=uncle)
    bound44 = phi_energy_bound(1, lat44, "square")
    records.append({
        "part": "square", "n_rows": 4, "n_cols": 4, "r": 1,
        "quotient": q44, "quotient_decomposed": q44_dec, "bound": bound44,
        "interior_energy_rel": interior_rel, "norm2": phi44.norm2,
    })

    # strip part: full-height strips, direct route where the sum fits
    strip_checks = []
    strip_q: dict[tuple[int, int], float] = {}
    for n_cols, r_list, direct in ((8, (1, 2), True), (10, (1, 2, 3), False)):
        lat = Torus(2, n_cols)
        for r in r_list:
            reg1 = RegionSpec(0, 0, 2, r)
            reg2 = RegionSpec(0, r + 2, 2, r)
            q_dec, details = phi_rayleigh_exact(lat, reg1, reg2, window=uncle)
            rec = {"part": "strip", "n_rows": 2, "n_cols": n_cols, "r": r,
                   "quotient": q_dec, "bound": phi_energy_bound(r, lat, "strip"),
                   "norm2": details["norm2"],
                   "pattern_norm2": details["pattern_norm2"]}
            if direct:
                h = assemble_torus(uncle, 2, n_cols)
                phi = toric_phi(lat, reg1, reg2)
                q_direct = rayleigh(h, phi, backend="sparse")
                rec["quotient_direct"] = q_direct
                strip_checks.append(
                    abs(q_direct - q_dec) <= 1e-10 * max(1.0, abs(q_direct)))
                norm_exact = details["norm2"] == phi.norm2
                rec["norm_identity_exact"] = norm_exact
                strip_checks.append(norm_exact)
            strip_q[(n_cols, r)] = q_dec
            records.append(rec)

    big = [strip_q[(10, r)] for r in (1, 2, 3)]
    checks = {
        "chain_slope_in_band": -1.2 <= slope <= -0.8,
        "chain_quotients_decreasing": all(b < a for a, b in
                                          zip(quotients, quotients[1:])),
        "square_interior_silent": interior_rel < 1e-12,
        "square_routes_agree": abs(q44 - q44_dec) <= 1e-10 * max(1.0, q44),
        "square_below_bound": q44 <= bound44,
        "strip_routes_agree": all(strip_checks),
        "strip_quotients_decreasing": all(b < a for a, b in zip(big, big[1:])),
        "strips_below_bound": all(
            q <= phi_energy_bound(r, None, "strip")
            for (_, r), q in strip_q.items()),
    }
    return records, checks


def run_prop1(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """The 2x3 sum span as the intersection of two shifted window kernels."""
    records = []

    # small sanity geometry first: identical planes, then orthogonal lines
    rng = np.random.default_rng(cfg.seed)
    q, _ = np.linalg.qr(rng.standard_normal((8, 2)))
    plane = KernelSpace(q, 8, 1e-10, "sanity-plane")
    same = intersect_alternating([plane, plane], seed=cfg.seed, n_starts=4)
    records.append({"part": "sanity-identical", "rank": same.rank,
                    "distance": subspace_distance(same, plane)})
    e0 = KernelSpace(np.eye(8)[:, :1], 8, 1e-10, "axis-0")
    e1 = KernelSpace(np.eye(8)[:, 1:2], 8, 1e-10, "axis-1")
    disjoint = intersect_alternating([e0, e1], seed=cfg.seed, n_starts=4)
    records.append({"part": "sanity-orthogonal", "rank": disjoint.rank})

    s22 = region_span(2, 2, "sum")
    s23 = region_span(2, 3, "sum")
    lat = Patch(2, 3)
    win_terms = []
    win_qubits = []
    for c0 in (0, 1):
        sites = (lat.site_index(0, c0), lat.site_index(0, c0 + 1),
                 lat.site_index(1, c0), lat.site_index(1, c0 + 1))
        qs = tuple(q for s in sites for q in lat.site_qubits(s))
        win_qubits.append(qs)
        win_terms.append(GlobalHamiltonian(
            lat, (PlacedTerm(LocalProjector(s22), sites, qs),)))
    embedded = [embed_kernel(s22, qs, lat.n_qubits) for qs in win_qubits]

    # annihilation residual per window term, column by column; the grouped
    # sparse apply never touches the 2^24 ambient space densely
    contain = []
    basis = s23.basis.tocsc()
    for term in win_terms:
        worst = 0.0
        for j in range(s23.rank):
            col = basis[:, j]
            st = SparseState.from_items(
                lat, zip(col.indices.tolist(), col.data.tolist()))
            worst = max(worst, apply(term, st, backend="sparse").norm)
        contain.append(worst)
    records.append({"part": "containment", "s23_rank": s23.rank,
                    "s22_rank": s22.rank,
                    "residual_window0": contain[0],
                    "residual_window1": contain[1]})

    inter = intersect_alternating(embedded, seed=cfg.seed, n_starts=8,
                                  tol=1e-10)
    dists = []
    for i in range(inter.meta["n_starts"]):
        x = fixed_point_vector(inter, i)
        nrm = float(np.linalg.norm(x))
        if nrm < 1e-10:
            dists.append(None)
            continue
        resid = x - s23.project(x)
        dists.append(float(np.linalg.norm(resid)) / nrm)
        records.append({"part": "fixed-point", "start": i, "norm": nrm,
                        "distance_to_s23": dists[-1],
                        "sweeps": inter.meta["starts"][i]["sweeps"]})
    span_res = containment_residual(inter, s23)
    records.append({"part": "intersection", "span_rank": inter.rank,
                    "span_in_s23_residual": span_res})

    good = [d for d in dists if d is not None]
    checks = {
        "sanity_identical_plane": same.rank == 2
        and subspace_distance(same, plane) < 1e-8,
        "sanity_orthogonal_lines": disjoint.rank == 0,
        "s23_inside_both_windows": max(contain) < 1e-10,
        "all_starts_nonzero": len(good) == len(dists),
        "fixed_points_in_s23": len(good) == 8 and max(good) < 1e-6,
        "span_in_s23": span_res < 1e-6,
    }
    return records, checks


def run_additivity(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Window-compressed eigenpairs and the energy of their concatenation."""
    n = cfg.sizes[0]
    if n < 16:
        raise ValueError("the additivity experiment needs at least 16 sites")
    h = assemble_chain(ghz_uncle_term(), n)
    chain = Chain(n, periodic=True)

    width1, width2 = 5, 7
    offset1 = 2
    offset2 = offset1 + width1 + 2
    # the chain is periodic, so the two sites before offset1 double as the
    # margin after the second window
    if offset2 + width2 + 2 - n > offset1:
        raise ValueError("windows with their margins do not fit")

    def window_pair(offset: int, width: int):
        """Lowest localizable compressed eigenpair and its global residual.

        The window compression is exact (project H onto configurations
        supported inside the window), so each compressed pair (lam, y)
        gives a global state x with <x|H|x> = lam exactly; delta measures
        how far x is from a true eigenvector.  Pairs are scanned upward
        from the first nonzero level until one has delta < lam.
        """
        dim = h.dim
        idx = np.arange(1 << width, dtype=np.int64) << offset
        cols = np.zeros((dim, 1 << width))
        for j in range(1 << width):
            e = np.zeros(dim)
            e[idx[j]] = 1.0
            cols[:, j] = apply_dense(h, e)
        hw = cols[idx, :]
        hw = 0.5 * (hw + hw.T)
        w, v = np.linalg.eigh(hw)
        first = int(np.searchsorted(w, cfg.tau_gap))
        for pick in range(first, min(first + 10, len(w))):
            lam = float(w[pick])
            y = v[:, pick]
            x = np.zeros(dim)
            x[idx] = y
            delta = float(np.linalg.norm(apply_dense(h, x) - lam * x))
            if delta < lam:
                frag = SparseState.from_dense(Chain(width, periodic=False), y)
                return lam, delta, frag, pick - first
        return lam, delta, None, -1

    lam1, delta1, frag1, skip1 = window_pair(offset1, width1)
    lam2, delta2, frag2, skip2 = window_pair(offset2, width2)
    if frag1 is None or frag2 is None:
        records = [{"part": "failure", "lambda1": lam1, "delta1": delta1,
                    "lambda2": lam2, "delta2": delta2,
                    "note": "every scanned pair had delta >= lambda"}]
        return records, {"extraction_localized": False}

    b1 = ConcatBlock(offset1, frag1)
    b2 = ConcatBlock(offset2, frag2)
    phi1 = concat_state(chain, b1)
    phi12 = concat_state(chain, b1, b2)
    phi21 = concat_state(chain, b2, b1)
    q1 = rayleigh(h, phi1, backend=cfg.backend)
    q12 = rayleigh(h, phi12, backend=cfg.backend)
    q21 = rayleigh(h, phi21, backend=cfg.backend)

    records = [{
        "part": "pairs", "n": n,
        "offset1": offset1, "width1": width1, "lambda1": lam1, "delta1": delta1,
        "offset2": offset2, "width2": width2, "lambda2": lam2, "delta2": delta2,
        "levels_skipped": skip1 + skip2,
    }, {
        "part": "energies", "single": q1, "pair": q12, "pair_swapped": q21,
        "sum": lam1 + lam2, "defect": abs(q12 - lam1 - lam2),
        "allowance": delta1 + delta2,
    }]
    checks = {
        "extraction_localized": True,
        "single_matches_lambda1": abs(q1 - lam1) <= delta1 + 1e-12,
        "additivity_bound": abs(q12 - lam1 - lam2) <= delta1 + delta2,
        "order_irrelevant": abs(q12 - q21) <= 1e-12,
    }
    return records, checks


_RUNNERS = {
    "ghz-gap": run_ghz_gap,
    "density": run_density,
    "epsilon-limit": run_epsilon_limit,
    "toric-ground": run_toric_ground,
    "phi-sweep": run_phi_sweep,
    "prop1": run_prop1,
    "additivity": run_additivity,
}
