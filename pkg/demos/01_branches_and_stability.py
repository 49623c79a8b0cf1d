"""Steady states and their stability as the absorber is turned up.

A weakly saturable gain medium paired with a strongly saturable absorber
(beta_p = 10 beta) develops a bistable window: the absorber clamps the
laser off at low intensity, but once it bleaches a high-intensity branch
survives.  For each absorber strength we list every stationary point, the
sign of the amplitude relaxation rate D, and whether the closed-form
cooperativity criterion agrees with the linearized drift.

Run:  python3 demos/01_branches_and_stability.py
"""
import warnings

import numpy as np

from salaser import agreement_map, classify, design_system, solve
from salaser.stability import with_cooperativity

warnings.simplefilter("ignore")

base = design_system(beta=1e-3, beta_p=1e-2, n_tilde=1e3)

print(f"{'A_p/kappa':>10} {'branch':>8} {'n':>12} {'D/kappa':>10} {'stable':>7} {'criterion':>10}")
for coop in (0.0, 2.0, 5.0, 10.0, 20.0):
    system = with_cooperativity(base, coop)
    for p in solve(system).points:
        rep = classify(system, p)
        D = "-" if rep.decay_rate_D is None else f"{rep.decay_rate_D:.4f}"
        print(f"{coop:10.2f} {p.branch:>8} {p.n_tilde:12.4g} {D:>10} "
              f"{str(rep.numerically_stable):>7} {rep.agreement:>10}")

# The audit over a log grid: how often do the two verdicts disagree?
amap = agreement_map(base, np.geomspace(0.1, 40, 30))
print("\nagreement counts:", amap.counts)
print("note:", amap.note)
