"""Low-gain two-photon state on the reduced (q_s, w_s, q_i, w_i, dphi) grid.

The state is the pump Fourier amplitude times the phase-matching function
sinc(dkz L/2) exp(i dkz L/2), evaluated pointwise and normalised to unit
squared norm under the polar measure

    2*pi * sum q_s dq dw * q_i dq dw * (2*pi/M) |Psi|^2 = 1,

the leading 2*pi being the trivial global-angle integral.  The tensor is
constructed from azimuthally symmetric ingredients, so evenness in dphi
and signal/idler exchange symmetry hold bit-exactly on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .dispersion import CrystalConfig, ordinary_wavenumber, pump_wavenumber
from .errors import DomainError
from .grid import GridSpec

__all__ = [
    "PumpLowGain",
    "BiphotonTensor",
    "pump_amplitude",
    "pump_q_magnitude",
    "build_wavefunction",
    "marginal_intensity",
    "boundary_ratio",
    "squared_norm",
]

#: |Psi|^2 boundary-to-peak ratio above which a window is suspect.
WINDOW_WARN_RATIO = 1e-4


@dataclass(frozen=True)
class PumpLowGain:
    """Gaussian pump: central wavelength, beam waist, spectral width.

    ``delta_lambda_p`` is the wavelength-domain width converted internally
    through delta_omega = delta_lambda * omega_0 / lambda_0; the frequency
    exponent is taken literally as exp[-(w - w0)^2 / delta_omega^2].
    """

    lambda_p0: float
    w_p: float
    delta_lambda_p: float

    def __post_init__(self):
        if min(self.lambda_p0, self.w_p, self.delta_lambda_p) <= 0:
            raise DomainError("pump parameters must all be strictly positive")

    @property
    def omega_p0(self) -> float:
        return 2.0 * np.pi * C_LIGHT / self.lambda_p0

    @property
    def delta_omega_p(self) -> float:
        return self.delta_lambda_p * self.omega_p0 / self.lambda_p0


def pump_amplitude(q_p, omega_p, pump: PumpLowGain):
    """Gaussian pump spectrum exp[-q^2 w^2/4] exp[-(w - w0)^2/dw^2], peak 1."""
    q_p = np.asarray(q_p, dtype=float)
    omega_p = np.asarray(omega_p, dtype=float)
    det = (omega_p - pump.omega_p0) / pump.delta_omega_p
    return np.exp(-0.25 * (q_p * pump.w_p) ** 2) * np.exp(-det * det)


def pump_q_magnitude(q_s, q_i, delta_phi):
    """|q_s + q_i| = sqrt(q_s^2 + q_i^2 + 2 q_s q_i cos dphi) (law of cosines)."""
    q_s = np.asarray(q_s, dtype=float)
    q_i = np.asarray(q_i, dtype=float)
    arg = q_s * q_s + q_i * q_i + 2.0 * q_s * q_i * np.cos(delta_phi)
    return np.sqrt(np.maximum(arg, 0.0))


@dataclass(frozen=True, eq=False)
class BiphotonTensor:
    """Reduced wavefunction values indexed (q_s, w_s, q_i, w_i, dphi).

    ``norm`` is the measure-weighted squared norm of ``values`` as stored
    (1.0 for tensors produced by :func:`build_wavefunction`).  dphi is the
    last (contiguous) axis because the azimuthal FFT is the hot loop.
    """

    values: np.ndarray
    grid: GridSpec
    norm: float

    def exchange_transposed(self) -> np.ndarray:
        """Values with signal and idler swapped: axes (2, 3, 0, 1, 4)."""
        return np.transpose(self.values, (2, 3, 0, 1, 4))

    def phi_reflected(self) -> np.ndarray:
        """Values at 2*pi - dphi (index k -> (-k) mod M)."""
        idx = (-np.arange(self.grid.n_phi)) % self.grid.n_phi
        return self.values[..., idx]


def squared_norm(values: np.ndarray, grid: GridSpec) -> float:
    """Squared norm under 2*pi * (q dq dw)_s (q dq dw)_i dphi."""
    w_pair = grid.pair_weights()
    p = np.abs(values.reshape(len(w_pair), len(w_pair), grid.n_phi)) ** 2
    total = np.einsum("a,b,abm->", w_pair, w_pair, p)
    return float(2.0 * np.pi * grid.phi_weight * total)


def build_wavefunction(grid: GridSpec, pump: PumpLowGain, crystal: CrystalConfig,
                       envelope=None) -> BiphotonTensor:
    """Evaluate and normalise the reduced two-photon amplitude on ``grid``.

    ``envelope`` optionally replaces the Gaussian pump spectrum with any
    rotationally symmetric callable A(|q_p|, omega_p); only the Gaussian
    is shipped.  Raises a domain error naming the offending leg if any
    grid point is evanescent (window too large).
    """
    nq, nw, m = grid.n_q, grid.n_omega, grid.n_phi
    q = grid.q
    w = grid.omega

    k_s = ordinary_wavenumber(w, crystal.sellmeier)              # (nw,)
    w_sum = w[:, None] + w[None, :]                              # (nw, nw), exactly symmetric
    k_p = pump_wavenumber(w_sum, crystal)                        # (nw, nw)

    arg_s = k_s[None, :] ** 2 - q[:, None] ** 2                  # (nq, nw)
    if np.any(arg_s <= 0.0):
        iq, iw = np.argwhere(arg_s <= 0.0)[0]
        raise DomainError(
            "evanescent grid point; q_max or the frequency window is too large",
            leg="signal",
            q=float(q[iq]),
            omega=float(w[iw]),
        )
    kz_qw = np.sqrt(arg_s)                                       # shared by signal and idler

    # cos table mirrored so dphi and 2*pi - dphi give bit-identical values
    cphi = grid.cos_phi()
    qp2 = (q[:, None, None] ** 2 + q[None, :, None] ** 2
           + 2.0 * q[:, None, None] * q[None, :, None] * cphi[None, None, :])
    qp2 = np.maximum(qp2, 0.0)                                  # (nq, nq, m), symmetric in (0, 1)

    arg_p = k_p[None, :, None, :, None] ** 2 - qp2[:, None, :, None, :]
    if np.any(arg_p <= 0.0):
        idx = np.argwhere(arg_p <= 0.0)[0]
        raise DomainError(
            "evanescent pump grid point; q_max or the frequency window is too large",
            leg="pump",
            q=float(np.sqrt(qp2[idx[0], idx[2], idx[4]])),
            omega=float(w_sum[idx[1], idx[3]]),
        )

    # dkz = kz_p - (kz_s + kz_i); the bracketed sum is an exactly
    # exchange-symmetric array, keeping the full tensor bit-symmetric.
    kz_sum = kz_qw[:, :, None, None] + kz_qw[None, None, :, :]
    dkz = np.sqrt(arg_p) - kz_sum[..., None]

    if envelope is None:
        amp_q = np.exp(-0.25 * qp2 * pump.w_p**2)                    # (nq, nq, m)
        det = (w_sum - pump.omega_p0) / pump.delta_omega_p
        amp_w = np.exp(-det * det)                                   # (nw, nw)
        a_p = amp_q[:, None, :, None, :] * amp_w[None, :, None, :, None]
    else:
        a_p = np.asarray(
            envelope(np.sqrt(qp2)[:, None, :, None, :] * np.ones_like(dkz),
                     w_sum[None, :, None, :, None] * np.ones_like(dkz))
        )

    half_phase = 0.5 * dkz * crystal.length
    values = a_p * np.sinc(half_phase / np.pi) * np.exp(1j * half_phase)

    n2 = squared_norm(values, grid)
    if n2 <= 0.0:
        raise DomainError("wavefunction vanished on the whole grid")
    values /= np.sqrt(n2)
    return BiphotonTensor(values=values, grid=grid, norm=1.0)


def marginal_intensity(psi: BiphotonTensor) -> np.ndarray:
    """I(q_s, w_s): |Psi|^2 integrated over (q_i dq_i dw_i dphi).

    Normalised so that 2*pi * sum q dq dw I = 1.
    """
    g = psi.grid
    w_pair = g.pair_weights()
    p = np.abs(psi.values.reshape(len(w_pair), len(w_pair), g.n_phi)) ** 2
    out = g.phi_weight * np.einsum("abm,b->a", p, w_pair)
    return out.reshape(g.n_q, g.n_omega)


def boundary_ratio(psi: BiphotonTensor) -> float:
    """max |Psi|^2 over the window boundary relative to the global peak.

    Boundary faces are the largest radial sample (signal or idler) and
    both frequency-window edges.  Values above WINDOW_WARN_RATIO signal
    that the grid window truncates the state.
    """
    v2 = np.abs(psi.values) ** 2
    peak = v2.max()
    if peak == 0.0:
        return 0.0
    faces = [
        v2[-1], v2[:, :, -1],
        v2[:, 0], v2[:, -1], v2[:, :, :, 0], v2[:, :, :, -1],
    ]
    return float(max(f.max() for f in faces) / peak)
