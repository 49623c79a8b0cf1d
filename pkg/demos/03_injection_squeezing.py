"""Quadrature squeezing of an injection-locked laser.

A weak coherent field locks the laser phase; mu is the injected amplitude
relative to the intracavity one.  With a regular pump the amplitude (x)
quadrature is squeezed below the vacuum level, with a floor near mu^2/4 at
zero frequency, while the phase (y) quadrature carries the excess noise.
At I = 1e6 the finite-saturation corrections are still visible for the
smallest mu, so the saturated limit is listed alongside.

Run:  python3 demos/03_injection_squeezing.py
"""
import warnings

import numpy as np

from salaser import design_system, homodyne_spectrum, solve

warnings.simplefilter("ignore")

print(f"{'mu':>8} {'S_x(0) limit':>13} {'S_x(0)':>12} {'mu^2/4':>12} {'S_y(0)':>12}")
for mu in (1e-3, 3e-3, 1e-2, 3e-2, 1e-1):
    system = design_system(beta=1e-6, beta_p=1e-6, n_tilde=1e12, mu=mu, pump_statistic=1.0)
    p = solve(system).branch("upper")
    lim = homodyne_spectrum(system, p, "x", [0.0], regime="saturated").values[0]
    sx = homodyne_spectrum(system, p, "x", [0.0]).values[0]
    sy = homodyne_spectrum(system, p, "y", [0.0]).values[0]
    print(f"{mu:8.0e} {lim:13.4e} {sx:12.4e} {mu**2 / 4:12.4e} {sy:12.4e}")

mu = 1e-2
system = design_system(beta=1e-6, beta_p=1e-6, n_tilde=1e12, mu=mu, pump_statistic=1.0)
omega = np.geomspace(1e-3, 10, 9)
sx = homodyne_spectrum(system, solve(system).branch("upper"), "x", omega).values
print(f"\nS_x(omega) at mu = {mu}")
for w, v in zip(omega, sx):
    print(f"  omega = {w:8.3g}   S_x = {v:.4e}")
