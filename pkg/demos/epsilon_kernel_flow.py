"""
From parent to uncle along a perturbation
=========================================

Perturbing the GHZ tensor, A -> A + eps*P, enlarges the local kernel
from rank 2 to rank 4.  As eps -> 0 the perturbed kernel does not return
to the parent kernel: for generic P it converges to the uncle kernel,
at a distance shrinking linearly in eps.  A degenerate perturbation
(both upper off-diagonal entries zero) converges somewhere else.
"""

import numpy as np

from uncle_forge.kernels import (epsilon_kernel, mps_kernel,
                                 subspace_distance, uncle_kernel_ghz,
                                 uncle_limit)
from uncle_forge.tensors import PerturbationSpec, ghz_mps

a = ghz_mps()
target = uncle_kernel_ghz()
p = PerturbationSpec.seeded(7)

print(f"parent kernel rank: {mps_kernel(a, 3).rank}")
print(f"uncle kernel rank:  {target.rank}\n")

print(f"{'eps':>8} {'rank':>5} {'distance to uncle':>18}")
for eps in (1e-1, 1e-2, 1e-3, 1e-4):
    ker = epsilon_kernel(a, p, eps)
    d = subspace_distance(ker, target)
    print(f"{eps:>8.0e} {ker.rank:>5} {d:>18.3e}")

dists = [subspace_distance(epsilon_kernel(a, p, e), target)
         for e in (1e-1, 1e-2, 1e-3, 1e-4)]
slope = np.polyfit(np.log([1e-1, 1e-2, 1e-3, 1e-4]), np.log(dists), 1)[0]
print(f"\nlog-log slope: {slope:.3f}  (linear shrinkage)")

limit = uncle_limit(a, p)
print(f"extrapolated limit: rank {limit.rank}, "
      f"distance to uncle {subspace_distance(limit, target):.2e}")

# now break genericity: zero out both upper off-diagonal entries
ent = p.data
p_deg = PerturbationSpec.from_ghz_entries(
    a=(ent[0, 0, 0], ent[1, 0, 0]),
    b=(0.0, 0.0),
    c=(ent[0, 1, 0], ent[1, 1, 0]),
    d=(ent[0, 1, 1], ent[1, 1, 1]))
ker = epsilon_kernel(a, p_deg, 1e-3)
print(f"\ndegenerate case at eps=1e-3: rank {ker.rank}, "
      f"flagged: {ker.meta['degenerate_direction']}")
limit_deg = uncle_limit(a, p_deg)
print(f"degenerate limit: rank {limit_deg.rank}, "
      f"distance to the generic limit "
      f"{subspace_distance(limit_deg, limit):.3f}")
