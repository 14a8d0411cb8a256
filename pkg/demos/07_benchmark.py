"""Scaling measurement: reduced pipeline vs dense oracle.

Per size n the state uses n samples on every axis, so the oracle
factorises an (n^3 x n^3) matrix while the reduced path decomposes
about n/2 matrices of size (n^2 x n^2) after an FFT.  The measured
ratio grows with n, the desk-scale signature of the
complexity separation between the two paths.
"""

from stsm import benchmark

rows = benchmark([8, 12, 16], repeats=2)
print(f"{'n':>4} {'reduced [s]':>12} {'oracle [s]':>12} {'ratio':>8}")
for r in rows:
    print(f"{r['n']:>4} {r['t_reduced']:>12.4f} {r['t_oracle']:>12.4f} {r['ratio']:>8.1f}")
print("\nratio grows with n; at production scales the reduced path is the")
print("difference between minutes and machine-lifetimes.")
