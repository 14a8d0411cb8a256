"""Schmidt-number sweeps: waist, crystal length, bandwidth, and the
finite-window artifact on a crystal-angle ramp.

The waist and length ramps run in a window-contained configuration where
the grid holds the whole phase-matching support; the bandwidth ramp runs
in the window-limited desk configuration, which is the regime where the
bandwidth trend is meaningful at this scale.  The angle ramp is computed
twice, with the radial window at W and 2W: past the angle where the
emission ring leaves the smaller window the two curves diverge - the
finite-window artifact every windowed calculation must watch for.
"""

from stsm import DESK, RunConfig, sweep, theta_window_comparison

TREND = RunConfig(n_q=10, n_omega=28, n_phi=24, q_max=1.0e5,
                  omega_half_width=3.5e14, w_p=30e-6, delta_lambda_p=1.5e-9)


def show(title, rows, key="value"):
    print(f"\n{title}  [trend: {rows[0]['trend']}]")
    for r in rows:
        print(f"  {r[key]:.4e}   K = {r['K']:8.3f}")


show("K vs pump waist (window-contained config):",
     sweep("w_p", [18e-6, 24e-6, 30e-6, 36e-6, 42e-6], TREND))

show("K vs crystal length (window-contained config):",
     sweep("L", [1.2e-3, 1.6e-3, 2.0e-3, 2.4e-3, 2.8e-3], TREND))

show("K vs pump bandwidth (window-limited desk config):",
     sweep("delta_lambda_p", [2e-9, 3e-9, 4e-9, 5e-9, 6e-9],
           DESK.with_overrides({"n_q": 14, "n_omega": 14, "n_phi": 32})))

print("\nK vs crystal angle with radial window W and 2W:")
rows = theta_window_comparison(
    [32.914, 32.95, 33.00, 33.05, 33.10, 33.15],
    DESK.with_overrides({"n_q": 14, "n_omega": 14, "n_phi": 32}),
)
print(f"  {'theta (deg)':>12} {'K (W)':>10} {'K (2W)':>10} {'ratio':>8}")
for r in rows:
    print(f"  {r['theta_p_deg']:>12.3f} {r['K_window']:>10.3f} "
          f"{r['K_window_scaled']:>10.3f} {r['K_window_scaled']/r['K_window']:>8.2f}")
print("the smaller window saturates and declines first; doubling the window")
print("pushes the artificial decline to larger angles.")
