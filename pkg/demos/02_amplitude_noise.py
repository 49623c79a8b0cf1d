"""Photocurrent noise of a regularly pumped laser.

The pump statistic s interpolates between Poissonian (s = 0) and perfectly
regular (s = 1) excitation.  Deep in saturation the low-frequency Fano
factor of the output photocurrent drops to 1 - s, recovering shot noise
above the cavity bandwidth.  A saturable absorber with a finite pump
adds its own fluctuations; the second table shows by how much.

Run:  python3 demos/02_amplitude_noise.py
"""
import warnings

import numpy as np

from salaser import design_system, fano_spectrum, solve

warnings.simplefilter("ignore")

omega = np.array([0.0, 0.3, 1.0, 3.0, 10.0])

print("Fano factor, I = 1e4, no absorber")
print("   s  " + "".join(f"  w={w:<6g}" for w in omega))
for s in (0.0, 0.5, 0.9, 1.0):
    system = design_system(beta=1e-4, beta_p=1e-4, n_tilde=1e8, pump_statistic=s)
    v = fano_spectrum(system, solve(system).branch("upper"), omega).values
    print(f"{s:5.2f} " + "".join(f"  {x:8.5f}" for x in v))

print("\nFano factor at w = 0, s = 1, I = I_p = 1e4, versus absorber pump ratio R_p/R")
for ratio in (0.0, 1e-4, 1e-3, 1e-2, 1e-1):
    loss_Ap = ratio * (1 + 1e4) / (1 - ratio)
    system = design_system(beta=1e-4, beta_p=1e-4, n_tilde=1e8, pump_statistic=1.0,
                           loss_Ap=loss_Ap)
    f0 = fano_spectrum(system, solve(system).branch("upper"), [0.0]).values[0]
    print(f"  R_p/R = {ratio:7.0e}   F(0) = {f0: .3e}")
