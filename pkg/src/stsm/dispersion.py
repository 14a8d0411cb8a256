"""Crystal optics for type-I down-conversion in a negative uniaxial crystal.

Sellmeier refractive indices, the effective extraordinary index seen by a
pump tilted by ``theta_p`` against the optic axis, ordinary-wave
wavenumbers for signal/idler, and the longitudinal wavevector mismatch.

All functions are pure and accept numpy arrays; frequencies are angular
(rad/s), wavevectors rad/m, wavelengths metres unless a ``_um`` suffix
says micrometres.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import DomainError

__all__ = [
    "SellmeierSet",
    "BBO",
    "CrystalConfig",
    "ordinary_index",
    "extraordinary_index",
    "effective_pump_index",
    "ordinary_wavenumber",
    "pump_wavenumber",
    "delta_kz",
    "central_delta_kz",
    "wavelength_um",
]


@dataclass(frozen=True)
class SellmeierSet:
    """Four-coefficient Sellmeier model, n^2 = a + b/(lam^2 - c) - d*lam^2.

    ``lam`` is the vacuum wavelength in micrometres.  ``ordinary`` and
    ``extraordinary`` hold (a, b, c, d) for the two principal indices;
    ``band_um`` is the declared validity band.  Coefficients are plain
    configuration data so another crystal is a config change, not a code
    change.
    """

    ordinary: tuple[float, float, float, float]
    extraordinary: tuple[float, float, float, float]
    band_um: tuple[float, float] = (0.22, 1.5)

    def __post_init__(self):
        lo, hi = self.band_um
        if not (0 < lo < hi):
            raise DomainError(f"invalid Sellmeier band {self.band_um}")


# Eimerl et al., J. Appl. Phys. 62, 1968 (1987).  Fitted over 0.22-1.06 um;
# the polynomial stays smooth, real and > 1 well beyond the fit range, so
# the declared band is opened up to 1.5 um for wide signal windows.
BBO = SellmeierSet(
    ordinary=(2.7405, 0.0184, 0.0179, 0.0155),
    extraordinary=(2.3730, 0.0128, 0.0156, 0.0044),
    band_um=(0.22, 1.5),
)


def _check_band(lam_um, sellmeier: SellmeierSet, what: str):
    lam_um = np.asarray(lam_um, dtype=float)
    lo, hi = sellmeier.band_um
    if np.any(lam_um < lo) or np.any(lam_um > hi):
        bad = lam_um[(lam_um < lo) | (lam_um > hi)]
        raise DomainError(
            f"wavelength outside Sellmeier band [{lo}, {hi}] um",
            leg=what,
            lambda_um=float(np.atleast_1d(bad).ravel()[0]),
        )
    return lam_um


def _index(lam_um, coefs):
    a, b, c, d = coefs
    lam2 = lam_um * lam_um
    return np.sqrt(a + b / (lam2 - c) - d * lam2)


def ordinary_index(lam_um, sellmeier: SellmeierSet = BBO):
    """Ordinary refractive index n_o at vacuum wavelength ``lam_um`` (um)."""
    return _index(_check_band(lam_um, sellmeier, "ordinary"), sellmeier.ordinary)


def extraordinary_index(lam_um, sellmeier: SellmeierSet = BBO):
    """Principal extraordinary index n_e at vacuum wavelength ``lam_um`` (um)."""
    return _index(_check_band(lam_um, sellmeier, "extraordinary"), sellmeier.extraordinary)


def effective_pump_index(theta_p, lam_um, sellmeier: SellmeierSet = BBO):
    """Index seen by an extraordinarily polarised pump tilted by ``theta_p``.

    eta(theta) = n_e n_o / sqrt(n_o^2 sin^2 theta + n_e^2 cos^2 theta),
    which interpolates monotonically between n_o at theta = 0 and n_e at
    theta = pi/2.
    """
    n_o = ordinary_index(lam_um, sellmeier)
    n_e = extraordinary_index(lam_um, sellmeier)
    s2 = np.sin(theta_p) ** 2
    c2 = np.cos(theta_p) ** 2
    return n_e * n_o / np.sqrt(n_o**2 * s2 + n_e**2 * c2)


@dataclass(frozen=True)
class CrystalConfig:
    """Crystal cut and length: pump tilt ``theta_p`` (rad), ``length`` (m)."""

    theta_p: float
    length: float
    sellmeier: SellmeierSet = field(default_factory=lambda: BBO)

    def __post_init__(self):
        if not (0.0 < self.theta_p < np.pi / 2):
            raise DomainError(f"theta_p={self.theta_p} outside (0, pi/2)")
        if self.length <= 0.0:
            raise DomainError(f"crystal length must be positive, got {self.length}")


def wavelength_um(omega):
    """Vacuum wavelength (um) of angular frequency ``omega`` (rad/s)."""
    return 2.0 * np.pi * C_LIGHT / np.asarray(omega, dtype=float) * 1e6


def ordinary_wavenumber(omega, sellmeier: SellmeierSet = BBO):
    """k = n_o(lam) * omega / c for an ordinary wave (signal/idler)."""
    return ordinary_index(wavelength_um(omega), sellmeier) * np.asarray(omega) / C_LIGHT


def pump_wavenumber(omega_p, crystal: CrystalConfig):
    """k_p = eta(theta_p) * omega_p / c for the extraordinary pump."""
    eta = effective_pump_index(crystal.theta_p, wavelength_um(omega_p), crystal.sellmeier)
    return eta * np.asarray(omega_p) / C_LIGHT


def _kz(k, q, leg):
    """Longitudinal component sqrt(k^2 - q^2); evanescent input is a domain error."""
    k = np.asarray(k, dtype=float)
    q = np.asarray(q, dtype=float)
    arg = k * k - q * q
    mask = np.atleast_1d(arg <= 0.0)
    if mask.any():
        idx = tuple(np.argwhere(mask)[0])
        shape = mask.shape
        qb = np.broadcast_to(np.atleast_1d(q * np.ones_like(arg)), shape)
        kb = np.broadcast_to(np.atleast_1d(k * np.ones_like(arg)), shape)
        raise DomainError(
            "evanescent transverse wavevector (q >= k); shrink q_max or the frequency window",
            leg=leg,
            q=float(qb[idx]),
            k=float(kb[idx]),
        )
    return np.sqrt(arg)


def delta_kz(q_p, q_s, q_i, omega_s, omega_i, crystal: CrystalConfig):
    """Longitudinal mismatch sqrt(k_p^2-q_p^2) - sqrt(k_s^2-q_s^2) - sqrt(k_i^2-q_i^2).

    The pump wavenumber is evaluated with the effective index at
    omega_p = omega_s + omega_i; signal and idler use the ordinary index
    at their own frequencies.  Symmetric under the exchange
    (q_s, omega_s) <-> (q_i, omega_i) by construction.
    """
    k_p = pump_wavenumber(np.asarray(omega_s) + np.asarray(omega_i), crystal)
    k_s = ordinary_wavenumber(omega_s, crystal.sellmeier)
    k_i = ordinary_wavenumber(omega_i, crystal.sellmeier)
    kz_s = _kz(k_s, q_s, "signal")
    kz_i = _kz(k_i, q_i, "idler")
    kz_p = _kz(k_p, q_p, "pump")
    return kz_p - (kz_s + kz_i)


def central_delta_kz(q_s, omega_s, crystal: CrystalConfig, lambda_p0: float):
    """Mismatch evaluated at the correlation centre q_i = -q_s, omega_i = omega_p0 - omega_s.

    The pump is on axis (q_p = 0) and at its central frequency, so
    dkz = k_p - sqrt(k_s^2 - q_s^2) - sqrt(kbar_i^2 - q_s^2).
    """
    omega_p0 = 2.0 * np.pi * C_LIGHT / lambda_p0
    k_p = pump_wavenumber(omega_p0, crystal)
    k_s = ordinary_wavenumber(omega_s, crystal.sellmeier)
    k_i = ordinary_wavenumber(omega_p0 - np.asarray(omega_s), crystal.sellmeier)
    kz_s = _kz(k_s, q_s, "signal")
    kz_i = _kz(k_i, q_s, "idler")
    return k_p - (kz_s + kz_i)
