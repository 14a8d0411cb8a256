"""Brute-force references certifying the reduced pipeline at small sizes.

These paths deliberately avoid the azimuthal FFT: the spectrum oracle
materialises the full six-variable tensor on explicit (phi_s, phi_i)
grids and takes one dense SVD; the Schmidt-number oracle evaluates the
correlation-function integral by direct summation.  Single-threaded by
design; a hard per-axis size guard keeps them desk-sized.
"""

from __future__ import annotations

import numpy as np

from .biphoton import BiphotonTensor
from .errors import ConfigError, NumericalError
from .grid import GridSpec

__all__ = [
    "SIZE_GUARD",
    "brute_force_spectrum",
    "brute_force_K",
    "gaussian_1d_oracle",
]

#: Maximum samples per axis; keeps the dense matrix at most 4096^2 complex.
SIZE_GUARD = 16


def _guard(grid: GridSpec):
    if max(grid.n_q, grid.n_omega, grid.n_phi) > SIZE_GUARD:
        raise ConfigError(
            f"oracle refuses axes larger than {SIZE_GUARD} "
            f"(got n_q={grid.n_q}, n_omega={grid.n_omega}, n_phi={grid.n_phi})"
        )


def _six_dim_matrix(psi: BiphotonTensor, corrupt_weights: bool = False) -> np.ndarray:
    """Flattened, measure-weighted (q, phi, w) x (q, phi, w) matrix.

    ``corrupt_weights`` is a negative-control hook: it deliberately breaks
    the radial measure so downstream comparisons must fail.
    """
    g = psi.grid
    m = g.n_phi
    # explicit azimuthal axes: dphi index = (j_s - j_i) mod M
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    full = psi.values[:, :, :, :, idx]                  # (q_s, w_s, q_i, w_i, p_s, p_i)
    full = np.transpose(full, (0, 4, 1, 2, 5, 3))       # (q_s, p_s, w_s, q_i, p_i, w_i)
    n = g.n_q * m * g.n_omega
    mat = full.reshape(n, n)
    w_q = g.q_weights.copy()
    if corrupt_weights:
        w_q = np.ones_like(w_q) * w_q.mean()
    w6 = np.sqrt(
        np.einsum("a,b,c->abc", w_q, np.full(m, g.phi_weight), g.omega_weights).ravel()
    )
    return w6[:, None] * mat * w6[None, :]


def brute_force_spectrum(psi: BiphotonTensor, corrupt_weights: bool = False) -> np.ndarray:
    """Sorted Schmidt weights from one dense SVD of the six-variable state.

    Squared singular values, normalised to unit sum, descending.  Every
    +-l pair appears twice, so this is directly comparable to the reduced
    pipeline's degeneracy-expanded spectrum.
    """
    _guard(psi.grid)
    mat = _six_dim_matrix(psi, corrupt_weights=corrupt_weights)
    s = np.linalg.svd(mat, compute_uv=False)
    lam = s * s
    total = lam.sum()
    if total <= 0.0:
        raise NumericalError("oracle state has zero norm")
    return lam / total


def brute_force_K(psi: BiphotonTensor) -> float:
    """Schmidt number by direct summation of the correlation integral.

    Builds G(a, b, dphi) term by term from the relative-angle sum (no
    Fourier transform anywhere) and returns trace^2 / ||G||^2 under the
    polar measure.
    """
    _guard(psi.grid)
    g = psi.grid
    p = g.n_q * g.n_omega
    m = g.n_phi
    w_pair = g.pair_weights()
    vals = psi.values.reshape(p, p, m)
    gcorr = np.zeros((p, p, m), dtype=complex)
    for dm in range(m):
        acc = np.zeros((p, p), dtype=complex)
        for j in range(m):
            acc += (vals[:, :, j] * w_pair[None, :]) @ vals[:, :, (j + dm) % m].conj().T
        gcorr[:, :, dm] = g.phi_weight * acc
    diag = np.einsum("aam->am", gcorr)[:, 0].real
    trace = 2.0 * np.pi * float(np.sum(w_pair * diag))
    hs = 2.0 * np.pi * g.phi_weight * float(
        np.einsum("a,b,abm->", w_pair, w_pair, np.abs(gcorr) ** 2)
    )
    if hs <= 0.0:
        raise NumericalError("correlation tensor has zero norm")
    return trace * trace / hs


def gaussian_1d_oracle(a: float, b: float, n: int = 256, n_levels: int = 10):
    """Dense SVD of the double-Gaussian kernel exp[-a(x+y)^2 - b(x-y)^2].

    Returns ``(ratio, head)``: the geometric decay ratio of the squared
    singular values and the first ``n_levels`` normalised weights.  For
    a != b the ratio is verified constant across the first levels to
    1e-6 relative; for the separable case a == b the spectrum collapses
    to one value and the (tiny) ratio is returned without that check.
    """
    if a <= 0 or b <= 0:
        raise ConfigError("kernel parameters must be positive")
    scale = (4.0 * a * b) ** -0.25
    span = 10.0 * scale
    dx = 2.0 * span / n
    x = -span + (np.arange(n) + 0.5) * dx
    k = np.exp(-a * (x[:, None] + x[None, :]) ** 2 - b * (x[:, None] - x[None, :]) ** 2) * dx
    s = np.linalg.svd(k, compute_uv=False)
    lam = s * s
    lam = lam / lam.sum()
    head = lam[:n_levels]
    if head[1] / head[0] < 1e-10:
        return float(head[1] / head[0]), head
    ratios = head[1:] / head[:-1]
    mu = float(np.median(ratios))
    spread = float(np.max(np.abs(ratios - mu)) / mu)
    if spread > 1e-6:
        raise NumericalError(
            f"double-Gaussian spectrum is not geometric: ratio spread {spread:.2e}"
        )
    return mu, head
