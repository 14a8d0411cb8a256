"""Brute-force references: dense spectrum, direct K, double-Gaussian kernel."""

import numpy as np
import pytest

from stsm.biphoton import BiphotonTensor
from stsm.errors import ConfigError
from stsm.grid import GridSpec
from stsm.oracle import SIZE_GUARD, brute_force_K, brute_force_spectrum, gaussian_1d_oracle

from conftest import rank_d_state, separable_state, tiny_grid


def test_separable_state_spectrum_is_delta():
    grid = tiny_grid()
    lam = brute_force_spectrum(separable_state(grid))
    assert lam[0] == pytest.approx(1.0, abs=1e-10)
    assert lam[1] < 1e-12


def test_spectrum_invariant_under_global_phase():
    grid = tiny_grid()
    psi = separable_state(grid)
    rotated = BiphotonTensor(
        values=psi.values * np.exp(1.234j), grid=grid, norm=psi.norm
    )
    assert np.allclose(
        brute_force_spectrum(psi), brute_force_spectrum(rotated), atol=1e-14
    )


def test_size_guard_refuses_large_axes():
    grid = GridSpec.make(SIZE_GUARD + 1, 1.0, 4, 10.0, 1.0, 8)
    vals = np.zeros((SIZE_GUARD + 1, 4, SIZE_GUARD + 1, 4, 8), dtype=complex)
    vals[0, 0, 0, 0, 0] = 1.0
    psi = BiphotonTensor(values=vals, grid=grid, norm=1.0)
    with pytest.raises(ConfigError):
        brute_force_spectrum(psi)
    with pytest.raises(ConfigError):
        brute_force_K(psi)


def test_brute_force_k_separable_and_rank_d():
    grid = tiny_grid(n_q=4, n_omega=3, n_phi=8)
    assert brute_force_K(separable_state(grid)) == pytest.approx(1.0, abs=1e-10)
    for d in (2, 4):
        assert brute_force_K(rank_d_state(grid, d)) == pytest.approx(d, rel=1e-10)


def test_corrupt_weights_hook_changes_spectrum(desk_psi):
    clean = brute_force_spectrum(desk_psi)
    broken = brute_force_spectrum(desk_psi, corrupt_weights=True)
    dev = np.abs(clean[:50] - broken[:50]) / clean[:50]
    assert dev.max() > 1e-3  # negative control visibly fails


def test_gaussian_oracle_separable_case():
    ratio, head = gaussian_1d_oracle(2.0, 2.0)
    assert ratio < 1e-10
    assert head[0] == pytest.approx(1.0, abs=1e-9)


def test_gaussian_oracle_geometric_decay():
    mu, head = gaussian_1d_oracle(4.0, 1.0)
    ratios = head[1:] / head[:-1]
    assert np.max(np.abs(ratios - mu)) / mu < 1e-6
    # amplitude ratio (sqrt a - sqrt b)/(sqrt a + sqrt b) squared for weights
    expect = ((2.0 - 1.0) / (2.0 + 1.0)) ** 2
    assert mu == pytest.approx(expect, rel=1e-6)


def test_gaussian_oracle_swap_symmetric():
    mu_ab, head_ab = gaussian_1d_oracle(4.0, 1.0)
    mu_ba, head_ba = gaussian_1d_oracle(1.0, 4.0)
    assert mu_ab == pytest.approx(mu_ba, rel=1e-10)
    assert np.allclose(head_ab, head_ba, rtol=1e-10)


def test_gaussian_oracle_rejects_bad_parameters():
    with pytest.raises(ConfigError):
        gaussian_1d_oracle(-1.0, 2.0)
