"""
Low-energy domain walls on the uncle chain
==========================================

Summing all single-domain configurations with domains up to length r
gives trial states whose energy falls off like C/(r-1).  These states
witness the closing gap of the uncle Hamiltonian without any
eigensolver.  The fitted exponent sharpens toward -1 as the window
grows; the `phi-sweep` experiment runs the full-size fit (window 14 on
18 sites, exponent about -0.83).
"""

import numpy as np

from uncle_forge.gallery import ghz_domain_state
from uncle_forge.hamiltonian import LocalProjector, assemble_chain, rayleigh
from uncle_forge.kernels import uncle_kernel_ghz

n = 14
h = assemble_chain(LocalProjector(uncle_kernel_ghz()), n)
r_values = np.arange(3, 8)

for window in (8, 10, 12):
    print(f"chain of {n} sites, domains inside a window of {window}")
    print(f"{'r':>3} {'configs':>8} {'quotient':>12}")
    quotients = []
    for r in r_values:
        phi = ghz_domain_state(n, int(r), window)
        q = rayleigh(h, phi)
        quotients.append(q)
        print(f"{r:>3} {len(phi):>8} {q:>12.6f}")
    slope = np.polyfit(np.log(r_values - 1.0), np.log(quotients), 1)[0]
    print(f"log-log slope against (r - 1): {slope:.3f}\n")
