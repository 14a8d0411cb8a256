"""Low-gain state construction: pump factors, symmetries, normalisation."""

import dataclasses

import numpy as np
import pytest

from stsm.biphoton import (
    BiphotonTensor,
    PumpLowGain,
    boundary_ratio,
    build_wavefunction,
    marginal_intensity,
    pump_amplitude,
    pump_q_magnitude,
    squared_norm,
)
from stsm.errors import DomainError
from stsm.grid import GridSpec

from conftest import tiny_grid


@pytest.fixture(scope="module")
def pump():
    return PumpLowGain(lambda_p0=355e-9, w_p=9e-6, delta_lambda_p=4e-9)


def test_pump_amplitude_peak_and_widths(pump):
    assert pump_amplitude(0.0, pump.omega_p0, pump) == pytest.approx(1.0)
    assert pump_amplitude(2.0 / pump.w_p, pump.omega_p0, pump) == pytest.approx(np.e**-1)
    assert pump_amplitude(0.0, pump.omega_p0 + pump.delta_omega_p, pump) == pytest.approx(
        np.e**-1
    )


def test_pump_parameters_positive():
    with pytest.raises(DomainError):
        PumpLowGain(lambda_p0=355e-9, w_p=-1.0, delta_lambda_p=1e-9)


def test_pump_q_magnitude_limits():
    assert pump_q_magnitude(1.5, 1.5, np.pi) == pytest.approx(0.0, abs=1e-12)
    assert pump_q_magnitude(1.5, 1.5, 0.0) == pytest.approx(3.0)
    assert pump_q_magnitude(3.0, 4.0, np.pi / 2) == pytest.approx(5.0)
    q_s, q_i = 2.0, 5.0
    phi = np.linspace(0, 2 * np.pi, 50)
    v = pump_q_magnitude(q_s, q_i, phi)
    assert np.all(v <= q_s + q_i + 1e-12)
    assert np.all(v >= q_i - q_s - 1e-12)


def test_built_state_symmetries_exact(desk_psi):
    assert np.array_equal(desk_psi.values, desk_psi.exchange_transposed())
    assert np.array_equal(desk_psi.values, desk_psi.phi_reflected())


def test_built_state_normalised(desk_psi, desk_grid):
    assert squared_norm(desk_psi.values, desk_grid) == pytest.approx(1.0, abs=1e-12)


def test_phase_matched_point_has_unit_sinc(desk_pump, desk_crystal):
    # at dkz = 0 the phase-matching factor is exactly 1, so the state
    # value reduces to the pump amplitude (before normalisation)
    from stsm.dispersion import central_delta_kz

    omega0 = desk_pump.omega_p0
    assert np.sinc(0.0) == 1.0
    dkz = central_delta_kz(0.0, omega0 / 2, desk_crystal, desk_pump.lambda_p0)
    assert abs(dkz) * desk_crystal.length / 2 < 0.01  # near-matched centre point


def test_measure_covariance(desk_psi, desk_grid):
    # doubling the composite quadrature weight doubles the squared norm,
    # so renormalised |Psi|^2 halves pointwise
    doubled = dataclasses.replace(desk_grid, phi_weight=desk_grid.phi_weight * 2.0)
    n2 = squared_norm(desk_psi.values, doubled)
    assert n2 == pytest.approx(2.0, rel=1e-12)
    renorm = desk_psi.values / np.sqrt(n2)
    assert np.allclose(
        np.abs(renorm) ** 2, 0.5 * np.abs(desk_psi.values) ** 2, rtol=1e-12
    )


def test_evanescent_window_raises_named_error(pump):
    from stsm.dispersion import CrystalConfig

    crystal = CrystalConfig(theta_p=np.deg2rad(32.914), length=2e-3)
    bad = GridSpec.make(6, 5e7, 4, pump.omega_p0 / 2, 1e14, 8)
    with pytest.raises(DomainError):
        build_wavefunction(bad, pump, crystal)


def test_marginal_intensity_normalised(desk_psi, desk_grid):
    intensity = marginal_intensity(desk_psi)
    assert np.all(intensity >= 0)
    total = 2 * np.pi * np.sum(
        desk_grid.q_weights[:, None] * desk_grid.omega_weights[None, :] * intensity
    )
    assert total == pytest.approx(1.0, abs=1e-10)


def test_marginal_intensity_of_separable_state_is_proportional_to_f2():
    grid = tiny_grid(n_q=5, n_omega=4, n_phi=8)
    rng = np.random.default_rng(11)
    f = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    vals = (np.einsum("ab,cd->abcd", f, f)[..., None] * np.ones(8)).astype(complex)
    n2 = squared_norm(vals, grid)
    psi = BiphotonTensor(values=vals / np.sqrt(n2), grid=grid, norm=1.0)
    intensity = marginal_intensity(psi)
    ratio = intensity / np.abs(f) ** 2
    assert np.allclose(ratio, ratio.ravel()[0], rtol=1e-12)


def test_marginal_matches_mode_sum(desk_psi, desk_result, desk_grid):
    # cross-module identity: I(q, w) = sum degeneracy * lambda * |u|^2 / 2pi,
    # the 1/2pi being the azimuthal normalisation of the full modes
    intensity = marginal_intensity(desk_psi)
    rebuilt = np.einsum(
        "k,kab->ab",
        desk_result.degeneracy * desk_result.lambdas * desk_result.total_weight,
        np.abs(desk_result.modes) ** 2,
    ) / (2 * np.pi)
    assert np.allclose(rebuilt, intensity, rtol=1e-6, atol=intensity.max() * 1e-9)


def test_boundary_ratio_flags_truncated_window(desk_psi):
    # the desk window deliberately truncates the frequency ridge
    assert boundary_ratio(desk_psi) > 1e-4


def test_boundary_ratio_small_for_contained_state():
    grid = tiny_grid(n_q=6, n_omega=5, n_phi=8)
    vals = np.zeros((6, 5, 6, 5, 8), dtype=complex)
    vals[2, 2, 2, 2, :] = 1.0  # interior blob
    psi = BiphotonTensor(values=vals, grid=grid, norm=squared_norm(vals, grid))
    assert boundary_ratio(psi) == 0.0


def test_custom_envelope_hook(desk_grid, desk_crystal, desk_pump):
    flat = build_wavefunction(
        desk_grid, desk_pump, desk_crystal, envelope=lambda qp, wp: np.ones_like(qp)
    )
    # a flat envelope leaves pure phase-matching structure; still normalised
    assert squared_norm(flat.values, desk_grid) == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(flat.values, flat.exchange_transposed())
