"""High-gain regime: exponential brightening, spectrum narrowing, and
mode broadening with pump amplitude.

The correlation function is built from the sinh gain kernel with the
shipped calibration (Gamma * L = g at the pump peak, so g = 1 marks the
low/high gain boundary), then decomposed into coherent modes per OAM
index.
"""

import numpy as np
from dataclasses import replace
from scipy.constants import c

from stsm import (
    CrystalConfig,
    GainCalibration,
    GridSpec,
    PumpHighGain,
    build_g1,
    coherent_modes,
    gain_sweep,
    mode_width,
)

LAMBDA_P = 355e-9
OMEGA_P0 = 2 * np.pi * c / LAMBDA_P
crystal = CrystalConfig(theta_p=np.deg2rad(32.914), length=2e-3)
cal = GainCalibration.for_crystal(crystal)
pump = PumpHighGain(g=1.0, w_p=9e-6, delta_t=2.4e-14, lambda_p0=LAMBDA_P)

grid = GridSpec.make(8, 1.5e5, 8, OMEGA_P0 / 2, 1.5e14, 16)
rows = gain_sweep([0.25, 0.5, 1.0, 2.0, 4.0, 8.0], grid, pump, crystal, cal,
                  n_rho=48, n_t=48)
print("gain ramp (intensity in kernel units, relative growth is the point):")
print(f"  {'g':>6} {'intensity':>14} {'I(g)/I(g/2)':>12} {'K':>8}")
prev = None
for r in rows:
    ratio = "" if prev is None else f"{r['intensity']/prev:12.1f}"
    print(f"  {r['g']:>6.2f} {r['intensity']:>14.4e} {ratio:>12} {r['K']:>8.3f}")
    prev = r["intensity"]
print("growth turns super-linear past g = 1 while K falls: fewer, brighter modes.")

print("\nfundamental-mode widths vs gain (wide window so the broadening fits):")
wide = GridSpec.make(10, 4.0e5, 8, OMEGA_P0 / 2, 3.0e14, 24)
print(f"  {'g':>4} {'width_q (rad/m)':>16} {'width_w (rad/s)':>16} {'K':>8}")
for g in (1.0, 4.0, 8.0):
    g1 = build_g1(wide, replace(pump, g=g), crystal, cal, n_rho=48, n_t=48)
    res = coherent_modes(g1, l_max=5, m_max=40, tol=1e-6)
    u00 = res.mode(0, 0)
    print(f"  {g:>4.0f} {mode_width(u00, wide, 'q'):>16.4e} "
          f"{mode_width(u00, wide, 'omega'):>16.4e} {res.K:>8.3f}")
print("the gain acceptance scales like sqrt(g), so the surviving modes broaden.")
