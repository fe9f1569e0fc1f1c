"""Numerical workbench for parent and uncle Hamiltonians of tensor
network states: kernel spaces, frustration-free assembly, certified
spectra, and the trial states that expose gapless behavior."""

__version__ = "0.1.0"

from .gallery import (ConcatBlock, CountReport, RegionSpec, concat_state,
                      gf2_count, ghz_domain_state, phi_energy_bound,
                      phi_rayleigh_exact, toric_closure_states, toric_phi)
from .hamiltonian import (GlobalHamiltonian, LocalProjector, apply,
                          assemble_chain, assemble_torus, rayleigh,
                          term_energies)
from .kernels import (KernelSpace, NoConvergence, containment_residual,
                      embed_kernel, epsilon_kernel, mps_kernel, region_span,
                      subspace_distance, toric_window_span, uncle_kernel_ghz,
                      uncle_limit)
from .lattices import Chain, Patch, Torus
from .sparse_state import SparseState
from .spectra import (CertificationError, SpectralResult, dense_spectrum,
                      ground_space, intersect_alternating, lowest_eigs,
                      spacing_stats)
from .tensors import (MpsTensor, PatternSpec, PepsTensor, PerturbationSpec,
                      ghz_mps, mps_state, pattern_state, perturb_mps,
                      perturbed_toric_tensor, toric_tensor)

__all__ = [
    "Chain", "Torus", "Patch", "SparseState",
    "MpsTensor", "PerturbationSpec", "PepsTensor", "PatternSpec",
    "ghz_mps", "perturb_mps", "mps_state", "toric_tensor",
    "perturbed_toric_tensor", "pattern_state",
    "KernelSpace", "mps_kernel", "uncle_kernel_ghz", "epsilon_kernel",
    "uncle_limit", "toric_window_span", "region_span", "subspace_distance",
    "containment_residual", "embed_kernel", "NoConvergence",
    "LocalProjector", "GlobalHamiltonian", "assemble_chain", "assemble_torus",
    "apply", "rayleigh", "term_energies",
    "SpectralResult", "dense_spectrum", "lowest_eigs", "ground_space",
    "intersect_alternating", "spacing_stats", "CertificationError",
    "RegionSpec", "ConcatBlock", "CountReport", "gf2_count",
    "ghz_domain_state", "toric_phi", "toric_closure_states", "concat_state",
    "phi_energy_bound", "phi_rayleigh_exact",
    "__version__",
]
