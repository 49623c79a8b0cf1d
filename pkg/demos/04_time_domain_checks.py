"""Time-domain cross-checks of the closed forms.

1. The full medium + field equations relax to the same photon number as
   the reduced field equation, with an error that shrinks in proportion to
   the ratio of cavity to medium rates.
2. A linearized intensity fluctuation, sampled exactly as an
   Ornstein-Uhlenbeck process, has a periodogram that follows the
   analytic Lorentzian.
3. The free-running phase wanders diffusively at the predicted rate,
   and the absorber speeds this up.

Run:  python3 demos/04_time_domain_checks.py   (about a second)
"""
import math
import warnings

import numpy as np

from salaser import design_system, noise_coefficients, phase_diffusion_rate, solve
from salaser.dynamics import (StochasticRunConfig, TrajectoryState, integrate_adiabatic,
                              integrate_full_system, simulate_intensity_fluctuations,
                              simulate_phase_diffusion)
from salaser.noise_spectra import intensity_noise_spectrum

warnings.simplefilter("ignore")

print("adiabatic elimination error")
for r in (1e-2, 1e-3, 1e-4):
    system = design_system(beta=1e-3, beta_p=2e-3, n_tilde=1e4, loss_Ap=0.5,
                           fast=1 / r**2, slow=1 / r)
    p = solve(system).branch("upper")
    init = TrajectoryState.from_point(system, p, field=math.sqrt(1.1 * p.n_tilde))
    full = integrate_full_system(system, init, 60.0, n_samples=2)[-1].photons
    adi = abs(integrate_adiabatic(system, init.field, 60.0, n_samples=2)[-1][1]) ** 2
    print(f"  kappa/rate = {r:6.0e}   relative error = {abs(full - adi) / adi:.3e}")

system = design_system(beta=1e-2, beta_p=1e-2, n_tilde=100.0)
p = solve(system).branch("upper")
D = noise_coefficients(system, p).D
est = simulate_intensity_fluctuations(system, p, StochasticRunConfig.for_rate(D, seed=42))
ref = intensity_noise_spectrum(system, p, est.omega).values
inside = np.mean(np.abs(est.values - ref) <= 3 * est.stderr)
print(f"\nintensity PSD: {inside:.1%} of {est.omega.size} bins within 3 standard errors")

print("\nphase diffusion, n = 1e4")
for coop in (0.0, 2.0):
    system = design_system(beta=1e-4, beta_p=1e-4, n_tilde=1e4, loss_Ap=coop)
    p = solve(system).branch("upper")
    rate = phase_diffusion_rate(system, p)
    est = simulate_phase_diffusion(system, p, StochasticRunConfig(1, 0.01 / rate,
                                                                  100.0 / rate, 200))
    print(f"  A_p/kappa = {coop}: predicted {rate:.4e}, "
          f"sampled {est.slope:.4e} +/- {est.slope_stderr:.1e}")
