"""Certification against the brute-force references.

The reduced pipeline is compared with the dense SVD of the explicit
six-variable tensor (no symmetry used anywhere) and the Schmidt number
is evaluated through three independent routes.  This is the correctness
argument for the whole package, runnable in seconds at desk scale.
"""

import time

import numpy as np

from stsm import (
    DESK,
    brute_force_K,
    brute_force_spectrum,
    build_wavefunction,
    decompose,
    g1_from_psi,
    gaussian_1d_oracle,
    schmidt_number_g1,
)

psi = build_wavefunction(DESK.make_grid(), DESK.make_pump(), DESK.make_crystal())

t0 = time.perf_counter()
result = decompose(psi, DESK.l_max, DESK.m_max, DESK.tol)
t_reduced = time.perf_counter() - t0

t0 = time.perf_counter()
lam_oracle = brute_force_spectrum(psi)
t_oracle = time.perf_counter() - t0

lam_reduced = result.expanded_spectrum()
dev = np.abs(lam_reduced[:50] - lam_oracle[:50]) / lam_oracle[:50]
print(f"reduced pipeline: {t_reduced:.2f} s   dense oracle: {t_oracle:.2f} s "
      f"({t_oracle / t_reduced:.0f}x)")
print(f"top-50 spectrum match, max relative deviation: {dev.max():.2e}")
print("    rank   reduced          oracle")
for k in (0, 1, 2, 10, 25, 49):
    print(f"    {k:4d}   {lam_reduced[k]:.12e}  {lam_oracle[k]:.12e}")

k_spec = result.K
k_g1 = schmidt_number_g1(g1_from_psi(psi))
k_brute = brute_force_K(psi)
print(f"\nK three ways: spectrum {k_spec:.6f} | correlation {k_g1:.6f} "
      f"| brute force {k_brute:.6f}")

mu, head = gaussian_1d_oracle(4.0, 1.0)
print(f"\ndouble-Gaussian kernel check: geometric ratio {mu:.8f} "
      f"(closed-form {((2 - 1) / (2 + 1)) ** 2:.8f})")
print("head:", " ".join(f"{v:.3e}" for v in head[:5]))
