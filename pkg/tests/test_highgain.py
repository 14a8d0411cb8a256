"""Gain kernel, coherent-mode decomposition, and low-gain limit checks."""

from dataclasses import replace

import numpy as np
import pytest
from scipy.constants import c as C_LIGHT

from stsm.dispersion import CrystalConfig
from stsm.errors import ConfigError, DomainError, NumericalError
from stsm.grid import GridSpec
from stsm.highgain import (
    GainCalibration,
    PumpHighGain,
    build_g1,
    coherent_modes,
    gain_sweep,
    gamma,
    integrated_intensity,
    pump_envelope,
    sinhc_gain,
)
from stsm.schmidt import CorrelationTensor, schmidt_number_g1

LAMBDA_P = 355e-9
OMEGA_P0 = 2 * np.pi * C_LIGHT / LAMBDA_P


@pytest.fixture(scope="module")
def crystal():
    return CrystalConfig(theta_p=np.deg2rad(32.914), length=2e-3)


@pytest.fixture(scope="module")
def cal(crystal):
    return GainCalibration.for_crystal(crystal)


@pytest.fixture(scope="module")
def pump():
    return PumpHighGain(g=1.0, w_p=9e-6, delta_t=2.4e-14, lambda_p0=LAMBDA_P)


# ----------------------------------------------------------------- gamma

def test_calibration_puts_gain_boundary_at_g(pump, cal, crystal):
    gam = gamma(0.0, 0.0, 0.0, pump, cal)
    assert gam * crystal.length == pytest.approx(pump.g, rel=1e-14)
    g8 = replace(pump, g=8.0)
    assert gamma(0.0, 0.0, 0.0, g8, cal) * crystal.length == pytest.approx(8.0, rel=1e-14)


def test_gamma_zero_bracket_gives_length_limit(pump, cal, crystal):
    # bracket = 0: dkz/2 exactly matches the gain rate
    dkz = 2.0 * pump.g / crystal.length
    gam = gamma(dkz, 0.0, 0.0, pump, cal)
    assert abs(gam) < 1e-10 / crystal.length
    assert sinhc_gain(gam, crystal.length) == pytest.approx(crystal.length, rel=1e-12)


def test_gamma_no_pump_is_low_gain_sinc(cal, crystal):
    dark = PumpHighGain(g=1e-300, w_p=9e-6, delta_t=2.4e-14, lambda_p0=LAMBDA_P)
    for dkz in (500.0, 3000.0, 12000.0):
        gam = gamma(dkz, 0.0, 0.0, dark, cal)
        assert gam.real == pytest.approx(0.0, abs=1e-20)
        assert gam.imag == pytest.approx(dkz / 2, rel=1e-14)
        expect = crystal.length * np.sinc(dkz * crystal.length / 2 / np.pi)
        got = sinhc_gain(gam, crystal.length)
        assert abs(got - expect) / abs(expect) < 1e-10


def test_sinhc_series_matches_direct_at_switch(crystal):
    for mag in (0.9999e-4, 1.0001e-4):
        for phase in (1.0, 1j, 0.7 + 0.7j):
            z = mag * phase / abs(phase)
            gam = np.array(z / crystal.length)
            direct = crystal.length * np.sinh(z) / z
            assert abs(sinhc_gain(gam, crystal.length) - direct) / abs(direct) < 1e-12


def test_pump_envelope_peak_and_positivity(pump):
    assert pump_envelope(0.0, 0.0, pump) == pytest.approx(pump.g)
    assert pump_envelope(pump.w_p, 0.0, pump) == pytest.approx(pump.g * np.e**-1)
    with pytest.raises(DomainError):
        PumpHighGain(g=-1.0, w_p=1e-6, delta_t=1e-14, lambda_p0=LAMBDA_P)
    with pytest.raises(ConfigError):
        GainCalibration(c2_eff=0.0)


# ----------------------------------------------------------------- build_g1

@pytest.fixture(scope="module")
def small_grid():
    return GridSpec.make(6, 1.5e5, 6, OMEGA_P0 / 2, 1.5e14, 12)


@pytest.fixture(scope="module")
def g1_small(small_grid, pump, crystal, cal):
    return build_g1(small_grid, pump, crystal, cal, n_rho=32, n_t=32)


def test_g1_hermitian_exactly(g1_small):
    assert g1_small.hermitian_defect() == 0.0


def test_g1_trace_normalised(g1_small):
    assert g1_small.trace == pytest.approx(1.0, abs=1e-12)
    assert integrated_intensity(g1_small) == pytest.approx(1.0, abs=1e-12)


def test_g1_diagonal_real_nonnegative(g1_small, small_grid):
    p = small_grid.n_q * small_grid.n_omega
    diag = np.einsum("aam->am", g1_small.values.reshape(p, p, small_grid.n_phi))[:, 0]
    assert np.abs(diag.imag).max() < 1e-14 * np.abs(diag.real).max()
    assert np.all(diag.real >= 0)


def test_starved_quadrature_is_numerical_error(small_grid, pump, crystal, cal):
    with pytest.raises(NumericalError):
        build_g1(small_grid, pump, crystal, cal, n_rho=8, n_t=8)


def test_integrated_intensity_linear(g1_small):
    scaled = CorrelationTensor(
        values=g1_small.values * 3.5,
        grid=g1_small.grid,
        trace=g1_small.trace * 3.5,
        total_intensity=g1_small.total_intensity * 3.5,
    )
    assert integrated_intensity(scaled) == pytest.approx(
        3.5 * integrated_intensity(g1_small), rel=1e-12
    )


def test_low_gain_limit_matches_wavefunction_route(crystal, cal):
    # sub-cell monochromatic pump: both routes are omega-diagonal and the
    # central-mismatch kernel approximation becomes exact
    from stsm.biphoton import PumpLowGain, build_wavefunction
    from stsm.schmidt import g1_from_psi

    thin = CrystalConfig(theta_p=np.deg2rad(32.914), length=1e-3)
    thin_cal = GainCalibration.for_crystal(thin)
    dlam = 0.5e-9
    dw_p = dlam * OMEGA_P0 / LAMBDA_P
    grid = GridSpec.make(8, 1.2e5, 6, OMEGA_P0 / 2, 1e14, 176)
    psi = build_wavefunction(grid, PumpLowGain(LAMBDA_P, 100e-6, dlam), thin)
    g1_lo = g1_from_psi(psi)
    g1_hg = build_g1(
        grid,
        PumpHighGain(g=1e-4, w_p=100e-6, delta_t=np.sqrt(2) / dw_p, lambda_p0=LAMBDA_P),
        thin, thin_cal, n_rho=96, n_t=192,
    )
    a, b = g1_lo.values.ravel(), g1_hg.values.ravel()
    corr = abs(np.vdot(a, b)) / np.sqrt(np.vdot(a, a).real * np.vdot(b, b).real)
    assert corr > 0.99


# ----------------------------------------------------------- coherent modes

def test_fourier_blocks_hermitian(g1_small, small_grid):
    p = small_grid.n_q * small_grid.n_omega
    f = np.fft.ifft(g1_small.values, axis=-1).reshape(p, p, small_grid.n_phi)
    for l in range(4):
        blk = f[:, :, l]
        assert np.abs(blk - blk.conj().T).max() < 1e-12 * np.abs(blk).max()


def test_synthetic_rank_one_correlation_is_pure(small_grid):
    rng = np.random.default_rng(2)
    p = small_grid.n_q * small_grid.n_omega
    u = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    vals = np.outer(u, u.conj())[:, :, None] * np.ones(small_grid.n_phi)
    vals = vals.reshape(
        small_grid.n_q, small_grid.n_omega, small_grid.n_q, small_grid.n_omega,
        small_grid.n_phi,
    )
    g1 = CorrelationTensor(values=vals, grid=small_grid, trace=1.0, total_intensity=1.0)
    # floor at 1e-8 of the peak weight, above eigensolver noise
    res = coherent_modes(g1, l_max=3, m_max=10, tol=1e-4)
    assert res.K == pytest.approx(1.0, abs=1e-10)
    assert len(res) == 1
    assert schmidt_number_g1(g1) == pytest.approx(1.0, abs=1e-10)


def test_coherent_modes_spectrum_properties(g1_small):
    res = coherent_modes(g1_small, l_max=5, m_max=30, tol=1e-6)
    assert np.all(res.lambdas >= 0)
    assert np.sum(res.degeneracy * res.lambdas) == pytest.approx(1.0, abs=1e-10)
    assert res.K == pytest.approx(schmidt_number_g1(g1_small), rel=0.01)


def test_coherent_modes_nyquist_guard(g1_small):
    with pytest.raises(ConfigError):
        coherent_modes(g1_small, l_max=6)  # n_phi = 12 resolves l <= 5


def test_negative_eigenvalue_guard(small_grid):
    rng = np.random.default_rng(4)
    p = small_grid.n_q * small_grid.n_omega
    h = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    h = h + h.conj().T  # Hermitian but indefinite
    vals = np.repeat(h[:, :, None], small_grid.n_phi, axis=2).reshape(
        small_grid.n_q, small_grid.n_omega, small_grid.n_q, small_grid.n_omega,
        small_grid.n_phi,
    )
    g1 = CorrelationTensor(values=vals, grid=small_grid, trace=1.0, total_intensity=1.0)
    with pytest.raises(NumericalError):
        coherent_modes(g1, l_max=2, m_max=5, tol=1e-8)


# ----------------------------------------------------------------- sweeps

def test_gain_sweep_trends(small_grid, pump, crystal, cal):
    rows = gain_sweep([0.25, 0.5, 1.0, 2.0, 4.0, 8.0], small_grid, pump, crystal, cal,
                      n_rho=48, n_t=48)
    intensity = np.array([r["intensity"] for r in rows])
    ks = np.array([r["K"] for r in rows])
    assert np.all(np.diff(intensity) > 0)
    # super-linear onset past g = 1: doubling ratio grows
    assert intensity[5] / intensity[4] > intensity[1] / intensity[0]
    assert ks[-1] < ks[2]  # K(8) < K(1)


def test_gain_sweep_low_gain_limit_matches_decomposition_k(crystal, cal):
    # q-trivial matched geometry: the idler-window truncation channel is
    # closed and both routes count the same frequency modes
    from stsm.biphoton import PumpLowGain, build_wavefunction
    from stsm.schmidt import decompose

    dlam = 0.5e-9
    dw_p = dlam * OMEGA_P0 / LAMBDA_P
    grid = GridSpec.make(6, 5e3, 6, OMEGA_P0 / 2, 1e14, 8)
    psi = build_wavefunction(grid, PumpLowGain(LAMBDA_P, 50e-6, dlam), crystal)
    res = decompose(psi, l_max=3, m_max=100, tol=1e-6)
    pump0 = PumpHighGain(g=1.0, w_p=50e-6, delta_t=np.sqrt(2) / dw_p, lambda_p0=LAMBDA_P)
    rows = gain_sweep([1e-4], grid, pump0, crystal, cal, n_rho=48, n_t=160)
    assert abs(rows[0]["K"] - res.K) / res.K < 0.05
