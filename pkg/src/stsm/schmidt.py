"""Symmetry-reduced Schmidt decomposition engine.

Pipeline: FFT over the azimuthal-difference axis -> one flattened,
measure-weighted matrix per OAM index l -> per-l SVD -> assembly of the
spectrum, modes, idler phases and Schmidt number.

Conventions
-----------
The weighted kernel stored per l is  A_l = 2*pi * D^{1/2} alpha_l D^{1/2},
where alpha_l is the discrete azimuthal Fourier coefficient (1/M * FFT)
and D the diagonal of composite weights q*dq*dw.  The 2*pi (the global
angle integral) is folded in so that the squared singular values are the
physical Schmidt weights: summed over all Fourier bins they equal the
measure-weighted squared norm of the state (discrete Parseval), with no
loose factors.  Unweighted modes u_lm(q, w) obtained by dividing by
sqrt(weight) are orthonormal under sum q dq dw.

Per-l kernels are plain symmetric (A_l = A_l^T), which forces the idler
vectors in the plain-product expansion A = sum_m s_m u_m v_m^T to equal
the signal vectors up to one constant phase beta_lm per mode; ``betas``
records those phases.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .biphoton import BiphotonTensor, squared_norm
from .errors import ConfigError, InvariantError, NumericalError
from .grid import GridSpec

__all__ = [
    "AzimuthalKernel",
    "SchmidtResult",
    "CorrelationTensor",
    "azimuthal_kernels",
    "decompose_kernel",
    "assemble",
    "decompose",
    "reconstruct_mode",
    "reconstruct",
    "g1_from_psi",
    "schmidt_number_g1",
    "schmidt_number_from_psi",
    "parseval_residual",
    "benchmark",
]


@dataclass(frozen=True, eq=False)
class AzimuthalKernel:
    """One measure-weighted azimuthal kernel.

    ``matrix`` is (n_q*n_omega) x (n_q*n_omega), flattened C-order with
    the composite index a = i_q * n_omega + i_omega on both sides, and
    already carries sqrt(w_row * w_col) plus the global 2*pi.
    """

    l: int
    matrix: np.ndarray
    grid: GridSpec

    def unflatten(self, vec: np.ndarray) -> np.ndarray:
        """Reshape a flattened (q, omega) vector back to 2D."""
        return vec.reshape(self.grid.n_q, self.grid.n_omega)


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    """Spectrum, modes, idler phases and Schmidt number of one decomposition.

    Entries are ordered by l ascending then descending weight.  ``lambdas``
    are normalised so that sum(degeneracy * lambdas) = 1; ``degeneracy``
    is 1 for l = 0 and 2 for l > 0 (the +-l pair).  ``modes[k]`` is the
    2D signal mode u(q, w), orthonormal under sum q dq dw within each l.
    ``total_weight`` is the retained raw weight before normalisation
    (equal to the squared norm of the input minus the truncation tail).
    """

    ls: np.ndarray
    ms: np.ndarray
    degeneracy: np.ndarray
    lambdas: np.ndarray
    modes: np.ndarray
    betas: np.ndarray
    K: float
    grid: GridSpec
    total_weight: float
    #: max_k || v_k - e^{i beta_k} u_k ||_2 over unit weighted vectors
    #: (zero for coherent-mode results, which have no independent idler side)
    alignment_residual: float = 0.0

    def __len__(self) -> int:
        return len(self.lambdas)

    def expanded_spectrum(self) -> np.ndarray:
        """Degeneracy-expanded weights, sorted descending (+-l counted separately)."""
        return -np.sort(-np.repeat(self.lambdas, self.degeneracy))

    def mode(self, l: int, m: int) -> np.ndarray:
        """Signal mode u_lm(q, w); KeyError if (l, m) was not retained."""
        hit = np.flatnonzero((self.ls == l) & (self.ms == m))
        if len(hit) == 0:
            raise KeyError(f"mode (l={l}, m={m}) not present in this result")
        return self.modes[hit[0]]

    def weight(self, l: int, m: int) -> float:
        hit = np.flatnonzero((self.ls == l) & (self.ms == m))
        if len(hit) == 0:
            raise KeyError(f"mode (l={l}, m={m}) not present in this result")
        return float(self.lambdas[hit[0]])


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Reduced signal correlation G(q_s, w_s, q_s', w_s', dphi_ss').

    ``trace`` is the measure trace 2*pi * sum q dq dw G(a, a, 0) of the
    stored values; ``total_intensity`` keeps the unnormalised trace when
    the values themselves have been normalised.
    """

    values: np.ndarray
    grid: GridSpec
    trace: float
    total_intensity: float

    def hermitian_defect(self) -> float:
        """max |G - G^H| with G^H(a,b,m) = conj G(b,a,-m), relative to max |G|."""
        g = self.values
        m = self.grid.n_phi
        idx = (-np.arange(m)) % m
        gh = np.conj(np.transpose(g, (2, 3, 0, 1, 4)))[..., idx]
        scale = np.abs(g).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(g - gh).max() / scale)


def _fft_bins(values: np.ndarray, m: int) -> np.ndarray:
    """Discrete azimuthal Fourier coefficients, (1/M) sum_k f_k e^{-i l phi_k}."""
    return np.fft.fft(values, axis=-1) / m


def azimuthal_kernels(psi: BiphotonTensor, l_max: int) -> list[AzimuthalKernel]:
    """Weighted kernels A_l for l = 0..l_max (negative l are degenerate copies)."""
    g = psi.grid
    if l_max < 0:
        raise ConfigError("l_max must be non-negative")
    if g.n_phi < 2 * l_max + 1:
        raise ConfigError(
            f"n_phi={g.n_phi} cannot resolve l_max={l_max}; need n_phi >= {2 * l_max + 1}"
        )
    p = g.n_q * g.n_omega
    sqw = np.sqrt(g.pair_weights())
    alphas = _fft_bins(psi.values, g.n_phi).reshape(p, p, g.n_phi)
    out = []
    for l in range(l_max + 1):
        mat = (2.0 * np.pi) * (sqw[:, None] * alphas[:, :, l] * sqw[None, :])
        out.append(AzimuthalKernel(l=l, matrix=mat, grid=g))
    return out


def _order_modes(s: np.ndarray, u_cols: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Deterministic ordering: descending value; near-ties broken by the
    first moment of |u|^2 in omega, then in q."""
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    if len(s_sorted) > 1 and s_sorted[0] > 0:
        tie = np.isclose(s_sorted[:-1], s_sorted[1:], rtol=1e-12, atol=0.0)
        if tie.any():
            mom_w = np.empty(len(order))
            mom_q = np.empty(len(order))
            wm = np.outer(np.ones(grid.n_q), grid.omega).ravel()
            qm = np.outer(grid.q, np.ones(grid.n_omega)).ravel()
            for j, k in enumerate(order):
                # weighted singular vectors already carry the measure
                d = np.abs(u_cols[:, k]) ** 2
                tot = d.sum()
                mom_w[j] = (d * wm).sum() / tot if tot > 0 else 0.0
                mom_q[j] = (d * qm).sum() / tot if tot > 0 else 0.0
            # group runs of tied values and reorder inside each run
            i = 0
            order = order.copy()
            while i < len(order):
                j = i
                while j + 1 < len(order) and np.isclose(
                    s_sorted[j + 1], s_sorted[i], rtol=1e-12, atol=0.0
                ):
                    j += 1
                if j > i:
                    sub = np.lexsort((mom_q[i : j + 1], mom_w[i : j + 1]))
                    order[i : j + 1] = order[i : j + 1][sub]
                i = j + 1
    return order


def _takagi_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary Z with Z^H m Z* real diagonal, for complex symmetric m.

    Uses the real embedding [[Re, Im], [Im, -Re]], whose +sigma eigenpairs
    [x; y] are the con-eigenvectors z = x + iy of m (m z* = sigma z);
    orthonormality of the z's follows from the embedding's exact
    anti-commutation with the symplectic map.
    """
    k = m.shape[0]
    t = np.block([[m.real, m.imag], [m.imag, -m.real]])
    w, v = np.linalg.eigh(t)
    pos = np.argsort(-w)[:k]
    return v[:k, pos] + 1j * v[k:, pos]


def _align_degenerate_groups(u: np.ndarray, s: np.ndarray, a: np.ndarray, keep: int):
    """Rotate near-degenerate left-singular groups into the symmetric basis.

    A solver's independent factors mix arbitrarily inside quasi-degenerate
    subspaces, where the constant-phase relation between signal and idler
    modes holds only after choosing the right basis.  Groups are chained
    by consecutive gaps below 1e-6 * sigma_0 (absolute), may extend past
    the retention cut, and are rotated only when the group's alignment
    matrix is symmetric (it always is for the physical kernels).
    """
    if keep == 0 or s[0] <= 0.0:
        return u
    gap = 1e-6 * s[0]
    i = 0
    while i < keep:
        j = i
        # the total-spread cap stops drift across long slowly-decaying runs
        while (j + 1 < len(s) and s[j] - s[j + 1] < gap
               and s[i] - s[j + 1] < 3.0 * gap and s[j + 1] > 0.0):
            j += 1
        if j > i:
            ug = u[:, i: j + 1]
            m_align = (ug.conj().T @ (a.T @ ug.conj())) / s[i]
            if np.abs(m_align - m_align.T).max() < 1e-8:
                u[:, i: j + 1] = ug @ _takagi_unitary(m_align)
        i = j + 1
    return u


def decompose_kernel(kernel: AzimuthalKernel, m_max: int, tol: float):
    """SVD of one weighted kernel.

    Returns ``(sigmas, left, right)`` with at most ``m_max`` singular
    values above ``tol * sigma_0``.  ``left[k]`` and ``right[k]`` are the
    unflattened modes divided by sqrt(weight), orthonormal under
    sum q dq dw; ``right`` follows the plain-product expansion
    A = sum s u v^T (rows of V^H), so right = e^{i beta} left for the
    symmetric kernels produced here.
    """
    if tol < 0:
        raise ConfigError("tol must be non-negative")
    try:
        u, s, _ = np.linalg.svd(kernel.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge for kernel l={kernel.l}") from exc
    order = _order_modes(s, u, kernel.grid)
    u, s = u[:, order].copy(), s[order]
    if len(s) and s[0] > 0.0:
        # count of values strictly above the floor, capped at m_max
        keep = min(m_max, int(np.searchsorted(-s, -tol * s[0], side="left")))
    else:
        keep = 0
    u = _align_degenerate_groups(u, s, kernel.matrix, keep)
    sqw = np.sqrt(kernel.grid.pair_weights())
    left = np.stack(
        [kernel.unflatten(u[:, k] / sqw) for k in range(keep)]
    ) if keep else np.zeros((0, kernel.grid.n_q, kernel.grid.n_omega), complex)
    # canonical completion v_m = A^T conj(u_m) / sigma_m: exact SVD identity,
    # immune to the left/right subspace mixing a solver's independent V
    # exhibits under near-degenerate singular values
    right = np.stack(
        [kernel.unflatten((kernel.matrix.T @ np.conj(u[:, k])) / s[k] / sqw) for k in range(keep)]
    ) if keep else np.zeros((0, kernel.grid.n_q, kernel.grid.n_omega), complex)
    return s[:keep], left, right


def assemble(per_l, grid: GridSpec) -> SchmidtResult:
    """Combine per-l SVD outputs into a normalised result.

    ``per_l`` is an iterable of (l, sigmas, left, right) tuples sharing
    one grid.  The spectrum is normalised so sum(degeneracy * lambda) = 1
    and idler phases are beta = arg <u, v> under the polar measure.
    """
    ls, ms, lams, modes, betas = [], [], [], [], []
    w_pair = grid.pair_weights().reshape(grid.n_q, grid.n_omega)
    sq_pair = np.sqrt(w_pair)
    align = 0.0
    for l, s, left, right in per_l:
        for k in range(len(s)):
            ls.append(l)
            ms.append(k)
            lams.append(s[k] ** 2)
            modes.append(left[k])
            ip = np.sum(w_pair * np.conj(left[k]) * right[k])
            beta = float(np.angle(ip))
            betas.append(beta)
            diff = (right[k] - np.exp(1j * beta) * left[k]) * sq_pair
            align = max(align, float(np.linalg.norm(diff)))
    if not lams:
        raise InvariantError("empty Schmidt spectrum: nothing above the truncation floor")
    ls = np.asarray(ls, dtype=int)
    ms = np.asarray(ms, dtype=int)
    lams = np.asarray(lams, dtype=float)
    deg = np.where(ls == 0, 1, 2)
    total = float(np.sum(deg * lams))
    if total <= 0.0:
        raise InvariantError("empty Schmidt spectrum: zero total weight")
    lams = lams / total
    k_number = 1.0 / float(np.sum(deg * lams**2))
    return SchmidtResult(
        ls=ls,
        ms=ms,
        degeneracy=deg,
        lambdas=lams,
        modes=np.stack(modes),
        betas=np.asarray(betas, dtype=float),
        K=k_number,
        grid=grid,
        total_weight=total,
        alignment_residual=align,
    )


def decompose(psi: BiphotonTensor, l_max: int, m_max: int = 100, tol: float = 1e-6,
              workers: int = 1) -> SchmidtResult:
    """Full reduced pipeline: kernels, per-l SVDs (parallelisable), assembly."""
    kernels = azimuthal_kernels(psi, l_max)

    def task(kern):
        s, left, right = decompose_kernel(kern, m_max, tol)
        return (kern.l, s, left, right)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_l = list(pool.map(task, kernels))
    else:
        per_l = [task(k) for k in kernels]
    return assemble(per_l, psi.grid)


def reconstruct_mode(result: SchmidtResult, l: int, m: int, phi_samples: np.ndarray) -> np.ndarray:
    """Full 3-variable mode u_lm(q, w) e^{i l phi} over (q, w, phi)."""
    u = result.mode(l, m)
    phase = np.exp(1j * l * np.asarray(phi_samples, dtype=float))
    return u[:, :, None] * phase[None, None, :]


def reconstruct(result: SchmidtResult, grid: GridSpec | None = None) -> np.ndarray:
    """Reduced 5-variable tensor rebuilt from the retained modes.

    Psi_rec = (1/2pi) sum_{l,m} sqrt(lambda_raw) u v (e^{il dphi} + c.c. for l>0);
    its measure-weighted squared distance to the source tensor equals the
    discarded spectral weight (Parseval).
    """
    g = grid or result.grid
    phi = g.phi
    out = np.zeros((g.n_q, g.n_omega, g.n_q, g.n_omega, g.n_phi), dtype=complex)
    lam_raw = result.lambdas * result.total_weight
    for k in range(len(result)):
        l = int(result.ls[k])
        u = result.modes[k]
        v = u * np.exp(1j * result.betas[k])
        pair = np.sqrt(lam_raw[k]) * u[:, :, None, None] * v[None, None, :, :]
        if l == 0:
            out += pair[..., None]
        else:
            out += pair[..., None] * (2.0 * np.cos(l * phi))[None, None, None, None, :]
    return out / (2.0 * np.pi)


def g1_from_psi(psi: BiphotonTensor) -> CorrelationTensor:
    """Reduced signal correlation from the low-gain state.

    The idler contraction and the relative-angle convolution are done as
    a product in azimuthal Fourier space: G = sum_l f_l e^{-il dphi} with
    f_l = 2*pi alpha_l D alpha_l^dagger.  The output is exactly Hermitian
    by symmetrisation and carries trace ~ 1 for a normalised input.
    """
    g = psi.grid
    p = g.n_q * g.n_omega
    m = g.n_phi
    w_pair = g.pair_weights()
    alphas = _fft_bins(psi.values, m).reshape(p, p, m)
    f = np.empty((p, p, m), dtype=complex)
    for l in range(m):
        a = alphas[:, :, l]
        f[:, :, l] = (2.0 * np.pi) * ((a * w_pair[None, :]) @ a.conj().T)
    gvals = np.fft.fft(f, axis=-1)  # sum_l f_l e^{-i l dphi_k}
    # enforce exact Hermitian symmetry G(a,b,k) = conj G(b,a,-k)
    idx = (-np.arange(m)) % m
    gvals = 0.5 * (gvals + np.conj(np.transpose(gvals, (1, 0, 2))[:, :, idx]))
    gvals = gvals.reshape(g.n_q, g.n_omega, g.n_q, g.n_omega, m)
    tr = _measure_trace(gvals, g)
    return CorrelationTensor(values=gvals, grid=g, trace=tr, total_intensity=tr)


def _measure_trace(gvals: np.ndarray, grid: GridSpec) -> float:
    p = grid.n_q * grid.n_omega
    diag = np.einsum("aam->am", gvals.reshape(p, p, grid.n_phi))[:, 0]
    return float(2.0 * np.pi * np.sum(grid.pair_weights() * diag.real))


def schmidt_number_g1(g1: CorrelationTensor) -> float:
    """Schmidt number from the correlation tensor alone.

    K = trace^2 / [2*pi * int |G|^2 (q dq dw) (q' dq' dw') dphi], the
    scale-invariant form of the inverse purity; equals the inverse sum of
    squared normalised weights.
    """
    g = g1.grid
    p = g.n_q * g.n_omega
    w_pair = g.pair_weights()
    v2 = np.abs(g1.values.reshape(p, p, g.n_phi)) ** 2
    hs = 2.0 * np.pi * g.phi_weight * float(np.einsum("a,b,abm->", w_pair, w_pair, v2))
    if hs <= 0.0:
        raise NumericalError("correlation tensor has zero norm")
    tr = _measure_trace(g1.values, g)
    return tr * tr / hs


def schmidt_number_from_psi(psi: BiphotonTensor) -> float:
    """Fast K: per-bin Gram norms of the weighted kernels, no mode extraction.

    K = (sum_l ||A_l||_F^2)^2 / sum_l ||A_l A_l^H||_F^2 over all Fourier
    bins, which is the correlation-function route collapsed to matrix
    norms; exact on the grid and truncation-free in l.
    """
    g = psi.grid
    p = g.n_q * g.n_omega
    sqw = np.sqrt(g.pair_weights())
    alphas = _fft_bins(psi.values, g.n_phi).reshape(p, p, g.n_phi)
    num = 0.0
    den = 0.0
    for l in range(g.n_phi):
        a = (2.0 * np.pi) * (sqw[:, None] * alphas[:, :, l] * sqw[None, :])
        num += float(np.vdot(a, a).real)
        gram = a @ a.conj().T
        den += float(np.vdot(gram, gram).real)
    if den <= 0.0:
        raise NumericalError("state has zero norm")
    return num * num / den


def parseval_residual(psi: BiphotonTensor, kernels: list[AzimuthalKernel] | None = None) -> float:
    """| ||Psi||^2 - sum_l g_l ||A_l||_F^2 | over all bins, g_l the +-l degeneracy.

    Bin weights are 1 for l = 0, 2 for 0 < l < M/2, and 1 for the Nyquist
    bin of an even M (it is its own negative).
    """
    g = psi.grid
    m = g.n_phi
    p = g.n_q * g.n_omega
    sqw = np.sqrt(g.pair_weights())
    alphas = _fft_bins(psi.values, m).reshape(p, p, m)
    total = 0.0
    for l in range(m // 2 + 1):
        a = (2.0 * np.pi) * (sqw[:, None] * alphas[:, :, l] * sqw[None, :])
        weight = 1.0 if (l == 0 or 2 * l == m) else 2.0
        total += weight * float(np.vdot(a, a).real)
    return abs(squared_norm(psi.values, g) - total)


def benchmark(sizes, pump=None, crystal=None, repeats: int = 2):
    """Wall-clock comparison of the reduced pipeline against the dense oracle.

    For each n in ``sizes`` a state with n_q = n_omega = n_phi = n is
    built on desk-scale physics and both paths are timed (best of
    ``repeats``).  Returns rows of dicts with keys
    n, t_reduced, t_oracle, ratio.
    """
    from . import oracle
    from .biphoton import build_wavefunction
    from .config import desk_crystal, desk_grid, desk_pump

    pump = pump or desk_pump()
    crystal = crystal or desk_crystal()
    rows = []
    for n in sizes:
        grid = desk_grid(n_q=n, n_omega=n, n_phi=n)
        psi = build_wavefunction(grid, pump, crystal)
        l_max = grid.max_azimuthal_order()

        def run_reduced():
            return decompose(psi, l_max=l_max, m_max=10_000, tol=0.0)

        def run_oracle():
            return oracle.brute_force_spectrum(psi)

        t_red = min(_timed(run_reduced) for _ in range(repeats))
        t_ora = min(_timed(run_oracle) for _ in range(repeats))
        rows.append(
            {
                "n": int(n),
                "t_reduced": t_red,
                "t_oracle": t_ora,
                "ratio": t_ora / t_red,
            }
        )
    return rows


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0
