"""
GHZ chain: parent vs uncle Hamiltonian
======================================

Both Hamiltonians share the two-dimensional ground space
span{|00...0>, |11...1>}, but they disagree above it: the parent model
keeps its spectral gap at 3 while the uncle gap closes as the chain
grows.
"""

import numpy as np

from uncle_forge.hamiltonian import LocalProjector, assemble_chain
from uncle_forge.kernels import (KernelSpace, mps_kernel, subspace_distance,
                                 uncle_kernel_ghz)
from uncle_forge.spectra import dense_spectrum
from uncle_forge.tensors import ghz_mps

# the two local 3-site projectors
parent = LocalProjector(mps_kernel(ghz_mps(), 3))
uncle = LocalProjector(uncle_kernel_ghz())
print(f"parent kernel rank {parent.kernel.rank}, "
      f"uncle kernel rank {uncle.kernel.rank}")

print(f"\n{'n':>3} {'model':>7} {'null_dim':>8} {'gap':>12} {'distance':>10}")
for n in (4, 6, 8, 10):
    # the target ground space: the two uniform configurations
    sector = np.zeros((1 << n, 2))
    sector[0, 0] = 1.0
    sector[-1, 1] = 1.0
    span = KernelSpace(sector, 1 << n, 0.0, provenance="sector-span")

    for name, term in (("parent", parent), ("uncle", uncle)):
        h = assemble_chain(term, n)
        spec = dense_spectrum(h, vectors=True)
        ground = KernelSpace(spec.eigenvectors[:, :spec.null_dim],
                             h.dim, 1e-8, provenance="dense-null-space")
        gap = spec.eigenvalues[spec.null_dim]
        dist = subspace_distance(ground, span)
        print(f"{n:>3} {name:>7} {spec.null_dim:>8} {gap:>12.8f} {dist:>10.2e}")

# the uncle gap at n=6 is exactly 2 - sqrt(3)
print(f"\n2 - sqrt(3) = {2 - np.sqrt(3):.8f}")
