"""Acceptance criteria, one test per criterion.

Every test records a ``PASS``/``FAIL`` line with its runtime; the lines are
printed in the terminal summary (see ``conftest.py``) and also to stdout.
"""
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from oracles import random_systems, scan_roots
from helpers import build
from salaser.cli import run_sweep
from salaser.dynamics import (StochasticRunConfig, TrajectoryState, integrate_adiabatic,
                              integrate_full_system, simulate_intensity_fluctuations,
                              simulate_phase_diffusion)
from salaser.model import design_system
from salaser.noise_spectra import (fano_spectrum, homodyne_spectrum, intensity_noise_spectrum,
                                   noise_coefficients, phase_diffusion_rate)
from salaser.stability import agreement_map, classify, numeric_jacobian
from salaser.steady_state import free_running_roots, solve

RESULTS: list[str] = []


@contextmanager
def criterion(number, title, budget):
    t0 = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        status = "PASS"
    except AssertionError as exc:
        detail = str(exc).strip().splitlines()[0][:100] if str(exc).strip() else ""
        raise
    finally:
        dt = time.perf_counter() - t0
        if status == "PASS" and dt > budget:
            status, detail = "FAIL", f"runtime over budget {budget:g} s"
        line = f"[{status}] criterion {number:2d}: {title} ({dt:.2f} s / {budget:g} s)"
        if detail:
            line += f" -- {detail}"
        RESULTS.append(line)
        print(line)
    assert dt <= budget, f"runtime {dt:.2f} s exceeds {budget:g} s"


def upper(s):
    return solve(s).branch("upper")


# --------------------------------------------------------------------------- 1


def test_criterion_01_fano_suppression():
    kappa, I = 1.0, 1e4
    # With beta = beta_p the pump ratio R_p/R equals A_p/A.
    loss_Ap = 1e-2 * (1 + I) * kappa / (1 - 1e-2)
    omega = np.linspace(0.0, 10.0 * kappa, 1001)
    with criterion(1, "sub-Poissonian Fano suppression", 1.0):
        s = design_system(beta=1e-4, beta_p=1e-4, n_tilde=1e8, loss_Ap=loss_Ap,
                          pump_statistic=1.0)
        p = upper(s)
        c = s.constants
        assert (p.I, p.I_p) == (pytest.approx(I), pytest.approx(I))
        assert (c.loss_Ap / c.beta_p) / (c.gain_A / c.beta) == pytest.approx(1e-2)
        v = fano_spectrum(s, p, omega).values
        target = omega**2 / (kappa**2 + omega**2)
        dev = np.max(np.abs(v - target))
        assert dev <= 1e-3, f"max |F - closed form| = {dev:.3e} > 1e-3"
        assert v[0] <= 2e-3, f"F(0) = {v[0]:.3e} > 2e-3"


# --------------------------------------------------------------------------- 2


def test_criterion_02_deep_saturation_photon_number():
    rng = np.random.default_rng(2)
    with criterion(2, "deep-saturation photon number", 1.0):
        for _ in range(200):
            kappa = 10 ** rng.uniform(-1, 1)
            beta, beta_p = 10 ** rng.uniform(-6, -3, 2)
            # n ~ (R - R_p)/kappa >= 0.1 R/kappa keeps both saturations above 1e3.
            R = 1e4 * kappa / min(beta, beta_p) * 10 ** rng.uniform(0.1, 2)
            Rp = R * rng.uniform(0, 0.9)
            b = solve(build(kappa, beta, beta_p, beta * R, beta_p * Rp))
            p = b.branch("upper")
            assert p.I >= 1e3 and p.I_p >= 1e3
            assert p.n_tilde == pytest.approx((R - Rp) / kappa, rel=1e-2)


# --------------------------------------------------------------------------- 3


def test_criterion_03_squeezing_floor():
    mu = 1e-2
    exact = mu**2 / (4 * (1 - mu + mu**2 / 4))
    with criterion(3, "squeezing floor", 1.0):
        s = design_system(beta=1e-6, beta_p=1e-6, n_tilde=1e12, mu=mu, pump_statistic=1.0,
                          loss_Ap=1e-9)
        sat = homodyne_spectrum(s, upper(s), "x", [0.0], regime="saturated").values[0]
        assert sat == pytest.approx(exact, rel=1e-6)
        # The general-regime value carries O(1/I) corrections amplified by
        # about 4/mu^2, so it only reaches 1e-6 once I ~ 1e12.
        deep = design_system(beta=1e-12, beta_p=1e-12, n_tilde=1e24, mu=mu,
                             pump_statistic=1.0)
        general = homodyne_spectrum(deep, upper(deep), "x", [0.0]).values[0]
        assert general == pytest.approx(exact, rel=1e-6)
        # mu^2/4 is within 1% of the floor value itself.
        assert abs(sat - mu**2 / 4) <= 1e-2 * sat


# --------------------------------------------------------------------------- 4


@pytest.mark.parametrize("ratio", [1e-3, 1e-5, 0.0])
def test_criterion_04_coefficient_limits(ratio):
    I = 1e6
    with criterion(4, f"coefficient limits (R_p/R = {ratio:g})", 1.0):
        for s_ in (0.0, 0.5, 1.0):
            loss_Ap = ratio * (1 + I) / (1 - ratio)
            s = design_system(beta=1e-6, beta_p=1e-6, n_tilde=1e12, loss_Ap=loss_Ap,
                              pump_statistic=s_)
            p = upper(s)
            assert p.I == pytest.approx(I) and p.I_p == pytest.approx(I)
            nc = noise_coefficients(s, p)
            assert abs(nc.D - s.kappa) <= 1e-3 * s.kappa
            assert abs(nc.D1 + s_ * s.kappa / 2) <= 1e-3 * s.kappa


# --------------------------------------------------------------------------- 5


def test_criterion_05_steady_state_oracle():
    rng = np.random.default_rng(5)
    kappa, beta, beta_p, A, Ap = random_systems(rng, 1000)
    with criterion(5, "steady states vs bisection grid scan (1000 sets)", 10.0):
        refs = []
        for lo in range(0, 1000, 250):
            sl = slice(lo, lo + 250)
            refs += scan_roots(A[sl], Ap[sl], beta[sl], beta_p[sl], kappa[sl])
        for i, ref in enumerate(refs):
            s = build(kappa[i], beta[i], beta_p[i], A[i], Ap[i])
            got = np.array(free_running_roots(s))
            assert got.size == ref.size, f"set {i}: {got.size} roots vs {ref.size} sign changes"
            np.testing.assert_allclose(got, ref, rtol=1e-8, err_msg=f"set {i}")
            assert solve(s).multiplicity == ref.size + 1


# --------------------------------------------------------------------------- 6


def test_criterion_06_decay_rate_vs_jacobian():
    rng = np.random.default_rng(6)
    with criterion(6, "closed-form D vs numeric Jacobian (100 stable points)", 5.0):
        seen = 0
        while seen < 100:
            kappa, beta, beta_p, A, Ap = (x[0] for x in random_systems(rng, 1))
            s = build(kappa, beta, beta_p, A, Ap)
            for p in solve(s).points:
                if p.n_tilde <= 0 or not classify(s, p).numerically_stable:
                    continue
                D = noise_coefficients(s, p).D
                amp, _ = numeric_jacobian(s, p)
                assert -amp.real == pytest.approx(D, rel=1e-3)
                seen += 1


# --------------------------------------------------------------------------- 7


def chain(r):
    """kappa/min(medium rates) = r, with slow/fast = r as well."""
    return design_system(beta=1e-3, beta_p=2e-3, n_tilde=1e4, loss_Ap=0.5,
                         fast=1 / r**2, slow=1 / r)


def adiabatic_error(r):
    s = chain(r)
    p = upper(s)
    init = TrajectoryState.from_point(s, p, field=math.sqrt(1.1 * p.n_tilde))
    full = integrate_full_system(s, init, 60.0, n_samples=2, require_steady=True)[-1].photons
    adi = abs(integrate_adiabatic(s, init.field, 60.0, n_samples=2)[-1][1]) ** 2
    assert adi == pytest.approx(p.n_tilde, rel=1e-6)
    return abs(full - adi) / adi


def test_criterion_07_adiabatic_elimination():
    with criterion(7, "adiabatic elimination validity", 60.0):
        errs = {r: adiabatic_error(r) for r in (1e-2, 1e-3, 1e-4)}
        print("relative |a|^2 error by rate ratio:", errs)
        assert errs[1e-3] <= 1e-2
        assert errs[1e-2] > errs[1e-3] > errs[1e-4]


# --------------------------------------------------------------------------- 8


def test_criterion_08_stochastic_psd():
    with criterion(8, "stochastic vs analytic PSD", 30.0):
        s = design_system(beta=1e-2, beta_p=1e-2, n_tilde=100.0, pump_statistic=0.0)
        p = upper(s)
        assert p.I == pytest.approx(1.0) and s.constants.loss_Ap == 0
        D = noise_coefficients(s, p).D
        est = simulate_intensity_fluctuations(s, p, StochasticRunConfig.for_rate(D, seed=42))
        ref = intensity_noise_spectrum(s, p, est.omega).values
        assert est.n_segments >= 50
        frac = float(np.mean(np.abs(est.values - ref) <= 3 * est.stderr))
        assert frac >= 0.95, f"{frac:.3f} of bins within 3 standard errors"


# --------------------------------------------------------------------------- 9


def test_criterion_09_phase_diffusion():
    with criterion(9, "phase diffusion Monte Carlo", 30.0):
        slopes = {}
        for coop in (0.0, 2.0):
            s = design_system(beta=1e-4, beta_p=1e-4, n_tilde=1e4, loss_Ap=coop)
            p = upper(s)
            rate = phase_diffusion_rate(s, p)
            est = simulate_phase_diffusion(s, p, StochasticRunConfig(9, 0.01 / rate,
                                                                     100.0 / rate, 200))
            assert est.slope == pytest.approx(rate, rel=0.05)
            slopes[coop] = (est.slope, p)
        factor = 1 + 2 * 2.0 / (1 + slopes[2.0][1].I_p)
        assert slopes[2.0][1].n_tilde == pytest.approx(slopes[0.0][1].n_tilde)
        assert slopes[2.0][0] / slopes[0.0][0] == pytest.approx(factor, rel=0.05)


# --------------------------------------------------------------------------- 10


def test_criterion_10_stability_audit():
    with criterion(10, "cooperativity criterion audit", 10.0):
        s = design_system(beta=1e-3, beta_p=1e-2, n_tilde=1e3)
        coops = np.geomspace(0.1, 40, 25)
        amap = agreement_map(s, coops)
        doc = json.loads(json.dumps(amap.to_dict()))
        assert doc["note"], "discrepancy note missing"
        assert doc["counts"]["disagree"] > 0
        # Each disagreement is the criterion and the Jacobian pointing opposite ways.
        for r in doc["rows"]:
            if r["agreement"] == "disagree":
                assert r["criterion_satisfied"] != r["numerically_stable"]
        rows = run_sweep(s, "cooperativity", coops)
        assert "disagree" in {r["agreement"] for r in rows}
        # Property: whenever any disagreement occurs, the note is attached.
        for beta_p in (2e-3, 5e-2, 1e-1):
            m = agreement_map(design_system(beta=1e-3, beta_p=beta_p, n_tilde=1e3), coops)
            assert m.counts["disagree"] == 0 or m.note
