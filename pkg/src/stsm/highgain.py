"""High-gain path: correlation function from the sinh gain kernel.

The signal correlation is a (rho, t) integral over the pump envelope of

    |V_p|^2 * 2*pi*J0(|dq| rho) * e^{i dw t}
           * sinhc(Gamma L) * sinhc(Gamma' L) * e^{i(dkz - dkz') L / 2}

divided by k_sz k_sz', where Gamma^2 = c2_eff |V_p|^2 - (dkz/2)^2 with the
central mismatch dkz evaluated at the correlation centre of each signal
point.  The calibration constant is chosen so Gamma*L = g at the pump
peak with zero mismatch, which places the low/high gain boundary at
g = 1; at |V_p| = 0 the kernel collapses to the low-gain L*sinc(dkz L/2).

Coherent modes come from the azimuthal Fourier transform of the
correlation tensor followed by per-l Hermitian eigendecompositions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.constants import c as C_LIGHT
from scipy.special import j0

from .dispersion import CrystalConfig, central_delta_kz, ordinary_wavenumber
from .errors import ConfigError, DomainError, NumericalError
from .grid import GridSpec
from .schmidt import CorrelationTensor, SchmidtResult, _measure_trace

__all__ = [
    "PumpHighGain",
    "GainCalibration",
    "CorrelationTensor",
    "pump_envelope",
    "gamma",
    "sinhc_gain",
    "build_g1",
    "coherent_modes",
    "integrated_intensity",
    "gain_sweep",
]

#: below this |Gamma*L| the sinh(Gamma L)/Gamma ratio switches to its series.
SERIES_SWITCH = 1e-4


@dataclass(frozen=True)
class PumpHighGain:
    """Coherent Gaussian pump for the gain kernel.

    ``g`` is the dimensionless pump amplitude (g < 1 low gain, g > 1 high
    gain under the shipped calibration), ``w_p`` the waist, ``delta_t``
    the temporal width, ``lambda_p0`` the central wavelength.
    """

    g: float
    w_p: float
    delta_t: float
    lambda_p0: float

    def __post_init__(self):
        if min(self.g, self.w_p, self.delta_t, self.lambda_p0) <= 0:
            raise DomainError("high-gain pump parameters must all be positive")

    @property
    def omega_p0(self) -> float:
        return 2.0 * np.pi * C_LIGHT / self.lambda_p0


@dataclass(frozen=True)
class GainCalibration:
    """Scaling constant inside Gamma, units rad^2/m^2.

    The shipped convention fixes c2_eff = 1/L^2 so that at the pump peak
    (rho = 0, t = 0) with zero mismatch Gamma * L = g exactly.
    """

    c2_eff: float

    def __post_init__(self):
        if self.c2_eff <= 0:
            raise ConfigError("c2_eff must be positive")

    @classmethod
    def for_crystal(cls, crystal: CrystalConfig) -> "GainCalibration":
        return cls(c2_eff=1.0 / crystal.length**2)


def pump_envelope(rho, t, pump: PumpHighGain):
    """V_p(rho, t) = g exp(-rho^2/w_p^2) exp(-t^2/(2 dt^2))."""
    rho = np.asarray(rho, dtype=float)
    t = np.asarray(t, dtype=float)
    return pump.g * np.exp(-(rho / pump.w_p) ** 2) * np.exp(-0.5 * (t / pump.delta_t) ** 2)


def gamma(central_dkz, rho, t, pump: PumpHighGain, cal: GainCalibration):
    """Gain rate Gamma = sqrt(c2_eff |V_p(rho,t)|^2 - (dkz/2)^2), principal root.

    A negative bracket yields a positive-imaginary Gamma, for which
    sinh(Gamma L)/Gamma degenerates to the oscillatory L*sinc branch.
    """
    vp2 = np.abs(pump_envelope(rho, t, pump)) ** 2
    bracket = cal.c2_eff * vp2 - 0.25 * np.square(np.asarray(central_dkz, dtype=float))
    return np.sqrt(bracket.astype(complex))


def sinhc_gain(gam, length: float):
    """sinh(Gamma L)/Gamma, continuous across Gamma = 0 via a series branch."""
    gam = np.asarray(gam, dtype=complex)
    z = gam * length
    small = np.abs(z) < SERIES_SWITCH
    z2 = z * z
    series = length * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, 1.0, np.sinh(np.where(small, 1.0, z)) / np.where(small, 1.0, gam))
    return np.where(small, series, direct)


def _quad_nodes(n: int, lo: float, hi: float):
    x, w = leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _probe_element(grid: GridSpec, pump: PumpHighGain, crystal: CrystalConfig,
                   cal: GainCalibration, n_rho: int, n_t: int, pair) -> complex:
    """One raw correlation element (no prefactors) at the given quadrature order."""
    (iq_a, iw_a), (iq_b, iw_b), m_idx = pair
    rho, w_rho = _quad_nodes(n_rho, 0.0, 4.0 * pump.w_p)
    t, w_t = _quad_nodes(n_t, -4.0 * pump.delta_t, 4.0 * pump.delta_t)
    s_pair = []
    for iq, iw in ((iq_a, iw_a), (iq_b, iw_b)):
        dkz = central_delta_kz(grid.q[iq], grid.omega[iw], crystal, pump.lambda_p0)
        vp2 = np.abs(pump_envelope(rho[:, None], t[None, :], pump)) ** 2
        bracket = cal.c2_eff * vp2 - 0.25 * dkz**2
        s_pair.append(sinhc_gain(np.sqrt(bracket.astype(complex)), crystal.length))
    dphi = 2.0 * np.pi * m_idx / grid.n_phi
    dq = np.sqrt(max(grid.q[iq_a] ** 2 + grid.q[iq_b] ** 2
                     - 2.0 * grid.q[iq_a] * grid.q[iq_b] * np.cos(dphi), 0.0))
    dw = grid.omega[iw_a] - grid.omega[iw_b]
    radial = (2.0 * np.pi * pump.g**2 * rho * w_rho
              * np.exp(-2.0 * (rho / pump.w_p) ** 2) * j0(dq * rho))
    temporal = w_t * np.exp(-((t / pump.delta_t) ** 2)) * np.exp(1j * dw * t)
    return complex(np.einsum("i,j,ij,ij->", radial, temporal, s_pair[0], s_pair[1]))


def build_g1(grid: GridSpec, pump: PumpHighGain, crystal: CrystalConfig,
             cal: GainCalibration | None = None, n_rho: int = 64, n_t: int = 64,
             normalize: bool = True) -> CorrelationTensor:
    """Evaluate the gain-kernel correlation tensor on ``grid``.

    Gauss-Legendre quadrature on [0, 4 w_p] x [-4 dt, 4 dt]; the angular
    part of the transverse phase factor is folded into 2*pi*J0(|dq| rho).
    Hermitian symmetry is exact by construction.  With ``normalize`` the
    values are scaled to unit measure trace and the raw trace is kept in
    ``total_intensity``.
    """
    cal = cal or GainCalibration.for_crystal(crystal)
    nq, nw, m = grid.n_q, grid.n_omega, grid.n_phi
    p = nq * nw

    rho, w_rho = _quad_nodes(n_rho, 0.0, 4.0 * pump.w_p)
    t, w_t = _quad_nodes(n_t, -4.0 * pump.delta_t, 4.0 * pump.delta_t)

    # per-signal-point central mismatch and gain factor S(a; rho, t)
    qa = np.repeat(grid.q, nw)
    wa = np.tile(grid.omega, nq)
    dkz = central_delta_kz(qa, wa, crystal, pump.lambda_p0)              # (p,)
    vp2 = np.abs(pump_envelope(rho[:, None], t[None, :], pump)) ** 2     # (n_rho, n_t)
    bracket = cal.c2_eff * vp2[None, :, :] - 0.25 * dkz[:, None, None] ** 2
    s_fac = sinhc_gain(np.sqrt(bracket.astype(complex)), crystal.length)  # (p, n_rho, n_t)
    if not np.isfinite(s_fac).all():
        raise NumericalError("gain factor overflowed; reduce g or the crystal length")

    # temporal phase table over unique frequency differences
    k_s = ordinary_wavenumber(grid.omega, crystal.sellmeier)
    ksz = np.sqrt(k_s[None, :] ** 2 - grid.q[:, None] ** 2).ravel()       # (p,)
    domega = grid.omega[1] - grid.omega[0] if nw > 1 else 1.0
    dw_unique = (np.arange(2 * nw - 1) - (nw - 1)) * domega
    t_phase = np.exp(1j * dw_unique[:, None] * t[None, :])               # (2nw-1, n_t)

    # E[a, b, i] = sum_j wt Vp2_t S[a,i,j] S[b,i,j] e^{i dw_ab t_j},
    # looped over frequency pairs to keep temporaries at (nq, n_rho, n_t)
    gauss_t = np.exp(-((t / pump.delta_t) ** 2))
    tp = t_phase * (w_t * gauss_t)[None, :]                              # (2nw-1, n_t)
    s_a = s_fac.reshape(nq, nw, n_rho, n_t)
    e_abi = np.empty((nq, nw, nq, nw, n_rho), dtype=complex)
    for iw in range(nw):
        for iv in range(nw):
            left = s_a[:, iw] * tp[iw - iv + nw - 1][None, None, :]
            e_abi[:, iw, :, iv, :] = np.einsum(
                "qij,rij->qri", left, s_a[:, iv], optimize=True
            )

    # radial factor: 2*pi * rho * w_rho * exp(-2 rho^2/w^2) * J0(|dq| rho)
    cphi = grid.cos_phi()
    dq_abs = np.sqrt(np.maximum(
        grid.q[:, None, None] ** 2 + grid.q[None, :, None] ** 2
        - 2.0 * grid.q[:, None, None] * grid.q[None, :, None] * cphi[None, None, :], 0.0))
    bessel = j0(dq_abs[..., None] * rho)                                 # (nq,nq,m,n_rho)
    gauss_rho = np.exp(-2.0 * (rho / pump.w_p) ** 2)
    radial = bessel * (2.0 * np.pi * pump.g**2 * rho * w_rho * gauss_rho)

    gvals = np.einsum("qwrvi,qrmi->qwrvm", e_abi, radial, optimize=True)

    # mismatch phase and 1/(k_sz k_sz') prefactor
    phase = np.exp(0.5j * dkz * crystal.length).reshape(nq, nw)
    inv_ksz = (1.0 / ksz).reshape(nq, nw)
    gvals *= (phase * inv_ksz)[:, :, None, None, None]
    gvals *= (np.conj(phase) * inv_ksz)[None, None, :, :, None]

    # exact Hermitian symmetry: average with conj G(b, a, -m)
    idx = (-np.arange(m)) % m
    gvals = 0.5 * (gvals + np.conj(np.transpose(gvals, (2, 3, 0, 1, 4))[..., idx]))

    raw_trace = _measure_trace(gvals, grid)
    if raw_trace <= 0.0:
        raise NumericalError("correlation tensor has non-positive trace")

    # quadrature self-check: sample elements across the frequency/angle
    # differences must be stable under raising the order; Gauss-Legendre
    # converges super-geometrically once the phases are resolved, so any
    # visible drift means the node counts are too low
    if n_rho >= 8 and n_t >= 8 and nw > 1:
        probes = [
            ((nq - 1, 0), (nq - 1, nw - 1), m // 2),
            ((nq - 1, 0), (nq - 1, nw // 2), 0),
            ((0, 0), (nq - 1, 0), m // 2),
            ((nq - 1, 0), (nq - 1, max(1, nw // 4)), m // 2),
        ]
        diag_pair = ((nq - 1, 0), (nq - 1, 0), 0)
        scale = abs(_probe_element(grid, pump, crystal, cal, n_rho, n_t, diag_pair))
        drift = 0.0
        for pair in probes:
            used = _probe_element(grid, pump, crystal, cal, n_rho, n_t, pair)
            finer = _probe_element(grid, pump, crystal, cal, n_rho + 8, n_t + 8, pair)
            drift = max(drift, abs(used - finer))
        if scale > 0.0 and drift / scale > 0.02:
            raise NumericalError(
                "gain-kernel quadrature is under-resolved "
                f"(order +8 probe drifts by {drift / scale:.2f} "
                "of the diagonal scale); raise n_rho/n_t"
            )
    if normalize:
        gvals = gvals / raw_trace
        return CorrelationTensor(values=gvals, grid=grid, trace=1.0, total_intensity=raw_trace)
    return CorrelationTensor(values=gvals, grid=grid, trace=raw_trace, total_intensity=raw_trace)


def coherent_modes(g1: CorrelationTensor, l_max: int, m_max: int = 100,
                   tol: float = 1e-6) -> SchmidtResult:
    """Azimuthal FFT of the correlation tensor and per-l eigendecomposition.

    Each weighted Fourier block 2*pi D^{1/2} f_l D^{1/2} is Hermitian
    positive semidefinite; its eigenvalues are the mode weights and the
    eigenvectors, unweighted, the modes.  Eigenvalues below
    -1e-8 * lambda_max signal quadrature failure.
    """
    g = g1.grid
    if g.n_phi < 2 * l_max + 1:
        raise ConfigError(
            f"n_phi={g.n_phi} cannot resolve l_max={l_max}; need n_phi >= {2 * l_max + 1}"
        )
    p = g.n_q * g.n_omega
    sqw = np.sqrt(g.pair_weights())
    # G = sum_l f_l e^{-il dphi}  =>  f_l = (1/M) sum_k G e^{+il dphi_k} = ifft
    f = np.fft.ifft(g1.values, axis=-1).reshape(p, p, g.n_phi)
    per_l = []
    lam_max = 0.0
    for l in range(l_max + 1):
        block = (2.0 * np.pi) * (sqw[:, None] * f[:, :, l] * sqw[None, :])
        block = 0.5 * (block + block.conj().T)
        try:
            w, v = np.linalg.eigh(block)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition failed for l={l}") from exc
        w, v = w[::-1], v[:, ::-1]
        lam_max = max(lam_max, float(w.max(initial=0.0)))
        per_l.append((l, w, v))
    if lam_max <= 0.0:
        raise NumericalError("coherent-mode spectrum is empty")
    floor = -1e-8 * lam_max
    out_l, out_m, out_lam, out_modes = [], [], [], []
    for l, w, v in per_l:
        if w.min(initial=0.0) < floor:
            raise NumericalError(
                f"significantly negative eigenvalue {w.min():.3e} at l={l}; "
                "quadrature orders n_rho/n_t are too low"
            )
        # same relative floor convention as the SVD path: lambda ~ sigma^2
        keep = np.flatnonzero(w > tol * tol * max(w[0], 0.0))[: m_max]
        for k_i, k in enumerate(keep):
            out_l.append(l)
            out_m.append(k_i)
            out_lam.append(float(w[k]))
            out_modes.append((v[:, k] / sqw).reshape(g.n_q, g.n_omega))
    if not out_lam:
        raise NumericalError("coherent-mode spectrum is empty")
    ls_arr = np.asarray(out_l, dtype=int)
    lam_arr = np.asarray(out_lam, dtype=float)
    deg = np.where(ls_arr == 0, 1, 2)
    total = float(np.sum(deg * lam_arr))
    lam_arr = lam_arr / total
    return SchmidtResult(
        ls=ls_arr,
        ms=np.asarray(out_m, dtype=int),
        degeneracy=deg,
        lambdas=lam_arr,
        modes=np.stack(out_modes),
        betas=np.zeros(len(lam_arr)),
        K=1.0 / float(np.sum(deg * lam_arr**2)),
        grid=g,
        total_weight=total,
    )


def integrated_intensity(g1: CorrelationTensor) -> float:
    """Measure-weighted trace of the stored correlation values."""
    return _measure_trace(g1.values, g1.grid)


def gain_sweep(g_values, grid: GridSpec, pump: PumpHighGain, crystal: CrystalConfig,
               cal: GainCalibration | None = None, n_rho: int = 64, n_t: int = 64):
    """Intensity and Schmidt number across a pump-amplitude ramp.

    Returns rows of dicts {g, intensity, K}; K uses the correlation-route
    formula, intensity the unnormalised trace.
    """
    from dataclasses import replace

    from .schmidt import schmidt_number_g1

    rows = []
    for g_val in g_values:
        p = replace(pump, g=float(g_val))
        g1 = build_g1(grid, p, crystal, cal, n_rho=n_rho, n_t=n_t, normalize=False)
        rows.append(
            {
                "g": float(g_val),
                "intensity": integrated_intensity(g1),
                "K": schmidt_number_g1(g1),
            }
        )
    return rows
