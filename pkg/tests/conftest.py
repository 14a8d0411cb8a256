"""Shared fixtures: the desk-scale state and its decomposition.

The desk configuration shrinks the published pump/windows so that a
12-point grid resolves the state and the dense oracle stays tractable;
heavyweight objects are session-scoped so the suite builds them once.
"""

import numpy as np
import pytest

from stsm.biphoton import BiphotonTensor, build_wavefunction, squared_norm
from stsm.config import DESK
from stsm.grid import GridSpec
from stsm.schmidt import decompose


@pytest.fixture(scope="session")
def desk_cfg():
    return DESK


@pytest.fixture(scope="session")
def desk_grid():
    return DESK.make_grid()


@pytest.fixture(scope="session")
def desk_pump():
    return DESK.make_pump()


@pytest.fixture(scope="session")
def desk_crystal():
    return DESK.make_crystal()


@pytest.fixture(scope="session")
def desk_psi(desk_grid, desk_pump, desk_crystal):
    return build_wavefunction(desk_grid, desk_pump, desk_crystal)


@pytest.fixture(scope="session")
def desk_result(desk_psi, desk_cfg):
    return decompose(desk_psi, desk_cfg.l_max, desk_cfg.m_max, desk_cfg.tol)


def tiny_grid(n_q=4, n_omega=3, n_phi=8):
    """Small synthetic grid with order-one axes for algebraic tests."""
    return GridSpec.make(n_q=n_q, q_max=1.0, n_omega=n_omega,
                         omega_center=10.0, omega_half_width=1.0, n_phi=n_phi)


def separable_state(grid, seed=7):
    """Psi = f(q_s, w_s) f(q_i, w_i), no azimuthal dependence; normalised."""
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((grid.n_q, grid.n_omega)) + 1j * rng.standard_normal(
        (grid.n_q, grid.n_omega)
    )
    vals = np.einsum("ab,cd->abcd", f, f)[..., None] * np.ones(grid.n_phi)
    vals = vals.astype(complex)
    n2 = squared_norm(vals, grid)
    return BiphotonTensor(values=vals / np.sqrt(n2), grid=grid, norm=1.0)


def rank_d_state(grid, d, seed=3):
    """Equal-weight sum of d product terms with orthonormal factors (l = 0 only)."""
    rng = np.random.default_rng(seed)
    p = grid.n_q * grid.n_omega
    raw = rng.standard_normal((p, d)) + 1j * rng.standard_normal((p, d))
    w = grid.pair_weights()
    # orthonormalise under the polar measure
    basis, _ = np.linalg.qr(np.sqrt(w)[:, None] * raw)
    modes = basis / np.sqrt(w)[:, None]
    vals = np.zeros((p, p), dtype=complex)
    for k in range(d):
        vals += np.outer(modes[:, k], modes[:, k]) / d
    vals = vals.reshape(grid.n_q, grid.n_omega, grid.n_q, grid.n_omega)
    vals = np.repeat(vals[..., None], grid.n_phi, axis=-1)
    n2 = squared_norm(vals, grid)
    return BiphotonTensor(values=vals / np.sqrt(n2), grid=grid, norm=1.0)
