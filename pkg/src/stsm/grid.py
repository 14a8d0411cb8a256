"""Discretisation of the reduced five-variable state.

Radial wavevector and frequency axes use a cell-midpoint convention with
rectangle-rule quadrature; the azimuthal-difference axis is the uniform
circle grid 2*pi*k/M.  Orthonormality throughout the package is defined
by the polar measure q dq domega (2*pi/M per azimuthal sample), and the
weights stored here are the single source of that measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = ["GridSpec"]


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Grid samples and quadrature weights for (q, omega, delta_phi).

    ``q``            midpoint radial samples in (0, q_max), rad/m
    ``omega``        midpoint frequency samples centred on the degenerate
                     frequency, rad/s
    ``n_phi``        number M of azimuthal-difference samples 2*pi*k/M
    ``q_weights``    q * dq per radial sample (polar radial measure)
    ``omega_weights`` domega per frequency sample
    ``phi_weight``   2*pi/M

    Weights are stored explicitly so tests and alternative quadratures can
    override them; the constructors below fill in the rectangle rule.
    """

    q: np.ndarray
    omega: np.ndarray
    n_phi: int
    q_weights: np.ndarray
    omega_weights: np.ndarray
    phi_weight: float

    @classmethod
    def make(cls, n_q: int, q_max: float, n_omega: int, omega_center: float,
             omega_half_width: float, n_phi: int) -> "GridSpec":
        """Build the default midpoint grid.

        q_j = (j + 1/2) dq with dq = q_max / n_q, so no sample sits at
        q = 0; omega samples are midpoints of 2*omega_half_width around
        omega_center, symmetric about it for any n_omega.
        """
        if n_q < 1 or n_omega < 1 or n_phi < 1:
            raise ConfigError("grid sizes must be positive")
        if q_max <= 0 or omega_half_width <= 0 or omega_center <= omega_half_width:
            raise ConfigError("grid windows must be positive and omega window must stay positive")
        dq = q_max / n_q
        q = (np.arange(n_q) + 0.5) * dq
        domega = 2.0 * omega_half_width / n_omega
        omega = omega_center - omega_half_width + (np.arange(n_omega) + 0.5) * domega
        return cls(
            q=q,
            omega=omega,
            n_phi=int(n_phi),
            q_weights=q * dq,
            omega_weights=np.full(n_omega, domega),
            phi_weight=2.0 * np.pi / n_phi,
        )

    def __post_init__(self):
        if np.any(self.q <= 0.0):
            raise ConfigError("radial samples must be strictly positive (midpoint grid)")
        if np.any(self.q_weights <= 0.0) or np.any(self.omega_weights <= 0.0):
            raise ConfigError("quadrature weights must be positive")
        if len(self.q) != len(self.q_weights) or len(self.omega) != len(self.omega_weights):
            raise ConfigError("weight arrays must match their sample arrays")

    @property
    def n_q(self) -> int:
        return len(self.q)

    @property
    def n_omega(self) -> int:
        return len(self.omega)

    @property
    def phi(self) -> np.ndarray:
        """Azimuthal-difference samples 2*pi*k/M, k = 0..M-1."""
        return 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

    def cos_phi(self) -> np.ndarray:
        """cos(delta_phi) table, mirrored so entry M-k is bit-identical to entry k."""
        m = self.n_phi
        half = np.cos(2.0 * np.pi * np.arange(m // 2 + 1) / m)
        out = np.empty(m)
        out[: m // 2 + 1] = half
        out[m // 2 + 1:] = half[1: (m + 1) // 2][::-1]
        return out

    def pair_weights(self) -> np.ndarray:
        """Composite (q, omega) weight q*dq*domega, flattened C-order to length n_q*n_omega."""
        return np.outer(self.q_weights, self.omega_weights).ravel()

    def max_azimuthal_order(self) -> int:
        """Largest OAM index resolvable on this grid (Nyquist: M >= 2l+1)."""
        return (self.n_phi - 1) // 2
