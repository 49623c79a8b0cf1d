"""Cross-check suite run by ``salaser validate``.

Each check compares two independent routes to the same quantity and
reports ``pass``, ``fail`` or ``skip`` (when the check does not apply to
the configured system).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import (StochasticRunConfig, TrajectoryState, integrate_adiabatic,
                       integrate_full_system, simulate_intensity_fluctuations,
                       simulate_phase_diffusion)
from .errors import LaserModelError
from .model import LaserSystem, derive_constants
from .noise_spectra import intensity_noise_spectrum, noise_coefficients, phase_diffusion_rate
from .stability import agreement_map, classify
from .steady_state import RESIDUAL_TOL, point_residual, solve


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def as_row(self) -> dict:
        return asdict(self)


def _lasing(branches):
    return [p for p in branches.points if p.n_tilde > 0 and p.branch != "trivial"]


def _hierarchy(system: LaserSystem) -> float:
    """Largest slow/fast medium rate ratio, which sets the adiabatic error."""
    a, p = system.active, system.passive
    return max(a.gamma2 / a.gamma1, p.gamma1 / p.gamma2, system.adiabatic_ratio)


def check_residuals(system, branches) -> Check:
    worst = max((point_residual(system, p) for p in branches.points), default=0.0)
    ok = worst <= RESIDUAL_TOL
    return Check("stationarity_residual", "pass" if ok else "fail", worst, RESIDUAL_TOL)


def check_adiabatic(system, branches) -> Check:
    """Full media + field relaxation versus the closed field equation."""
    stable = [p for p in _lasing(branches) if classify(system, p).numerically_stable]
    if not stable:
        return Check("adiabatic_vs_full", "skip", detail="no stable lasing point")
    p = stable[-1]
    tol = 3 * _hierarchy(system)
    if tol >= 0.5:
        return Check("adiabatic_vs_full", "skip", tolerance=tol,
                     detail="medium rates not separated enough for a meaningful comparison")
    D = noise_coefficients(system, p).D + 0.5 * system.kappa * p.mu
    t_end = 40.0 / D
    init = TrajectoryState.from_point(system, p, field=p.amplitude * math.sqrt(1.05))
    full = integrate_full_system(system, init, t_end, n_samples=2)[-1].photons
    adi = abs(integrate_adiabatic(system, init.field, t_end, n_samples=2)[-1][1]) ** 2
    err = abs(full - adi) / p.n_tilde
    return Check("adiabatic_vs_full", "pass" if err <= tol else "fail", err, tol,
                 f"branch={p.branch} t_end={t_end:.4g}")


def check_decay_rate(system, branches) -> Check:
    worst, seen = 0.0, 0
    for p in _lasing(branches):
        rep = classify(system, p)
        D = rep.decay_rate_D + 0.5 * system.kappa * p.mu
        lam = rep.jacobian_eigenvalues[0].real
        scale = max(abs(D), system.kappa * 1e-6)
        worst = max(worst, abs(-lam - D) / scale)
        seen += 1
    if not seen:
        return Check("decay_rate_vs_jacobian", "skip", detail="no lasing point")
    tol = 1e-4
    return Check("decay_rate_vs_jacobian", "pass" if worst <= tol else "fail", worst, tol)


def check_psd(system, branches, seed) -> Check:
    name = "psd_analytic_vs_stochastic"
    cands = [p for p in _lasing(branches) if not p.locked]
    for p in cands:
        nc = noise_coefficients(system, p, synchronized=False)
        if nc.D <= 0:
            continue
        if nc.D1 < 0:
            return Check(name, "skip", detail="nonclassical source (D1 < 0) is not sampled")
        est = simulate_intensity_fluctuations(system, p,
                                              StochasticRunConfig.for_rate(nc.D, seed=seed))
        ref = intensity_noise_spectrum(system, p, est.omega).values
        frac = float(np.mean(np.abs(est.values - ref) <= 3 * est.stderr))
        return Check(name, "pass" if frac >= 0.95 else "fail", frac, 0.95,
                     f"fraction of {est.omega.size} bins within 3 sigma")
    return Check(name, "skip", detail="no stable free-running lasing point")


def check_phase(system, branches, seed) -> Check:
    name = "phase_diffusion_mc"
    cands = [p for p in _lasing(branches) if not p.locked]
    if not cands:
        return Check(name, "skip", detail="no free-running lasing point")
    p = cands[-1]
    rate = phase_diffusion_rate(system, p)
    cfg = StochasticRunConfig(seed, 0.01 / rate, 100.0 / rate, 200)
    est = simulate_phase_diffusion(system, p, cfg)
    z = abs(est.slope - rate) / est.slope_stderr
    return Check(name, "pass" if z <= 5 else "fail", z, 5.0,
                 "deviation in standard errors")


def check_agreement(system, branches) -> Check:
    name = "cooperativity_agreement_map"
    lasing = _lasing(branches)
    c = derive_constants(system)
    if not lasing or c.beta_p == c.beta:
        return Check(name, "skip", detail="needs a lasing point and beta_p != beta")
    I, I_p = lasing[-1].I, lasing[-1].I_p
    centre = abs((1 + I_p) ** 2 * I / (I_p - I)) if I_p != I else 1.0
    coops = np.geomspace(max(centre * 1e-2, 1e-6), centre * 1e2, 9)
    amap = agreement_map(system, coops)
    counts = amap.counts
    silent = counts["disagree"] > 0 and not amap.note
    return Check(name, "fail" if silent else "pass", float(counts["disagree"]), None,
                 f"agree={counts['agree']} disagree={counts['disagree']} "
                 f"not_applicable={counts['not_applicable']}")


def run_validation(system: LaserSystem, seed: int = 0) -> list[Check]:
    """Run every cross-check; a check that raises is reported as ``fail``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        branches = solve(system)
        out = []
        for fn, args in ((check_residuals, ()), (check_adiabatic, ()),
                         (check_decay_rate, ()), (check_psd, (seed,)),
                         (check_phase, (seed,)), (check_agreement, ())):
            try:
                out.append(fn(system, branches, *args))
            except (LaserModelError, ValueError) as exc:
                out.append(Check(fn.__name__.removeprefix("check_"), "fail",
                                 detail=f"{type(exc).__name__}: {exc}"))
    return out
