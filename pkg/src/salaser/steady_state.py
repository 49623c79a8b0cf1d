"""Stationary solutions of the closed classical field equation.

Free-running operation reduces to a quadratic in the photon number after
clearing denominators; with an injected signal the condition becomes a
quintic in the field amplitude ``u = sqrt(n)``.  Both are solved completely
through their polynomial form and every root is then polished on the
original rational residual.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .errors import DegenerateQuadraticWarning, NoLockingSolution, WeakLockingWarning
from .model import LaserSystem, OperatingPoint, derive_constants, make_point

RESIDUAL_TOL = 1e-10
ROOT_RTOL = 1e-12


@dataclass(frozen=True)
class BranchSet:
    """Stationary points in ascending photon number.

    ``free_running`` holds the photon numbers obtained when the injected
    signal is ignored (empty for free-running solves).
    """

    points: tuple[OperatingPoint, ...]
    free_running: tuple[float, ...] = field(default=())

    @property
    def multiplicity(self) -> int:
        return len(self.points)

    @property
    def bistable(self) -> bool:
        lasing = {p.n_tilde for p in self.points if p.n_tilde > 0 and p.branch != "trivial"}
        return len(lasing) >= 2

    @property
    def n_values(self) -> np.ndarray:
        return np.array([p.n_tilde for p in self.points])

    def branch(self, name: str) -> OperatingPoint:
        for p in self.points:
            if p.branch == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class MediumState:
    """Stationary medium variables; coherences are complex."""

    sigma: complex
    sigma1: float
    sigma2: float
    pi: complex
    pi1: float
    pi2: float


def stationarity_residual(system: LaserSystem, n, mu=0.0):
    """``A/(1+beta n) - A_p/(1+beta_p n) - kappa (1 - mu)``, elementwise."""
    return system.gain(n) - system.kappa * (1 - mu)


def quadratic_coefficients(system: LaserSystem) -> tuple[float, float, float]:
    """Coefficients ``(c2, c1, c0)`` of the cleared free-running condition."""
    c = derive_constants(system)
    k = system.kappa
    c2 = k * c.beta * c.beta_p
    c1 = k * (c.beta + c.beta_p) - c.gain_A * c.beta_p + c.loss_Ap * c.beta
    c0 = k - c.gain_A + c.loss_Ap
    return c2, c1, c0


def _newton_polish(system, n, mu=0.0, steps=3):
    c = derive_constants(system)
    for _ in range(steps):
        f = stationarity_residual(system, n, mu)
        df = (-c.gain_A * c.beta / (1 + c.beta * n) ** 2
              + c.loss_Ap * c.beta_p / (1 + c.beta_p * n) ** 2)
        if df == 0 or not math.isfinite(df):
            break
        step = f / df
        # A step this large means a (near) double root; Newton is ill-posed there.
        if abs(step) > 1e-6 * n:
            break
        n = n - step
    return n


def free_running_roots(system: LaserSystem) -> list[float]:
    """Positive roots of the free-running stationarity condition, ascending."""
    c2, c1, c0 = quadratic_coefficients(system)
    scale = max(abs(c1), abs(c0), 1e-300)
    if c2 <= np.finfo(float).tiny * scale:
        warnings.warn("stationarity quadratic degenerated to a linear equation",
                      DegenerateQuadraticWarning, stacklevel=2)
        roots = [] if c1 == 0 else [-c0 / c1]
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc < 0:
            roots = []
        else:
            q = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1))
            roots = [q / c2] if q == 0 else [q / c2, c0 / q]
    roots = sorted(r for r in roots if math.isfinite(r) and r > 0)
    return [_newton_polish(system, r) for r in roots]


def solve_free_running(system: LaserSystem) -> BranchSet:
    """Trivial solution plus every positive root, ignoring any injected signal."""
    roots = free_running_roots(system)
    labels = ["upper"] if len(roots) == 1 else ["lower", "upper"]
    points = [make_point(system, 0.0, "trivial")]
    points += [make_point(system, n, lab) for n, lab in zip(roots, labels)]
    return BranchSet(tuple(points))


def _injected_polynomial(system):
    # kappa (u - s)(1 + beta u^2)(1 + beta_p u^2) - u [A (1 + beta_p u^2) - A_p (1 + beta u^2)]
    c = derive_constants(system)
    s = math.sqrt(system.cavity.n_in)
    left = P.polymul(P.polymul([-s * system.kappa, system.kappa], [1, 0, c.beta]),
                     [1, 0, c.beta_p])
    right = P.polymul([0, 1], [c.gain_A - c.loss_Ap, 0,
                               c.gain_A * c.beta_p - c.loss_Ap * c.beta])
    return P.polysub(left, right)


def _injected_residual(system, u):
    n = u * u
    return system.gain(n) - system.kappa * (1 - math.sqrt(system.cavity.n_in) / u)


def _polish_amplitude(system, u):
    f0 = _injected_residual(system, u)
    if f0 == 0:
        return u
    for delta in (1e-12, 1e-10, 1e-8, 1e-6, 1e-4):
        lo, hi = u * (1 - delta), u * (1 + delta)
        if np.sign(_injected_residual(system, lo)) != np.sign(_injected_residual(system, hi)):
            return brentq(lambda x: _injected_residual(system, x), lo, hi,
                          xtol=1e-300, rtol=ROOT_RTOL, maxiter=200)
    return None


def injected_roots(system: LaserSystem) -> list[float]:
    """Positive photon numbers solving the locked stationarity condition."""
    # Rescale u by the largest amplitude scale so the polynomial is well conditioned.
    n_max = system.active.pump_rate / system.kappa + system.cavity.n_in
    scale = math.sqrt(max(n_max, 1e-300))
    coeffs = _injected_polynomial(system) * scale ** np.arange(6)
    coeffs = coeffs / np.max(np.abs(coeffs))
    roots = scale * np.roots(np.trim_zeros(coeffs[::-1], "f"))
    found = []
    for r in roots:
        if r.real <= 0 or abs(r.imag) > 1e-6 * abs(r):
            continue
        u = _polish_amplitude(system, float(r.real))
        if u is None:
            continue
        n = u * u
        if all(abs(n - m) > 1e-9 * max(n, m) for m in found):
            found.append(n)
    return sorted(found)


def _label_injected(roots, free):
    reference = [0.0] + free
    names = ["trivial"] + (["upper"] if len(free) == 1 else ["lower", "upper"])[: len(free)]
    if len(roots) == len(reference):
        return names
    labels = []
    for n in roots:
        k = int(np.argmin([abs(math.sqrt(n) - math.sqrt(m)) for m in reference]))
        labels.append(names[k])
    return labels


def solve_injected(system: LaserSystem) -> BranchSet:
    """Stationary points with the injected signal kept exactly.

    Every point carries ``mu = sqrt(n_in / n)`` and the injected phase.
    Points with ``n_in * n < 1`` are flagged ``weak_locking`` and a
    :class:`WeakLockingWarning` is emitted.
    """
    if not system.injected:
        return solve_free_running(system)
    free = free_running_roots(system)
    roots = injected_roots(system)
    if not roots:
        raise NoLockingSolution("no positive root of the locked stationarity condition")
    n_in, phi = system.cavity.n_in, system.cavity.phi_in
    points = []
    for n, label in zip(roots, _label_injected(roots, free)):
        weak = n_in * n < 1
        if weak:
            warnings.warn(f"n_in * n = {n_in * n:.3g} < 1: phase locking is weak",
                          WeakLockingWarning, stacklevel=2)
        nearest = min([0.0] + free, key=lambda m: abs(m - n))
        points.append(make_point(system, n, label, mu=math.sqrt(n_in / n), phase=phi,
                                 weak_locking=weak, n_free=nearest))
    return BranchSet(tuple(points), tuple(free))


def solve(system: LaserSystem) -> BranchSet:
    return solve_injected(system) if system.injected else solve_free_running(system)


def point_residual(system: LaserSystem, point: OperatingPoint) -> float:
    """Stationarity residual at ``point`` (zero for the trivial free-running point)."""
    if point.n_tilde == 0:
        return 0.0
    return float(stationarity_residual(system, point.n_tilde, point.mu))


def full_system_steady_state(system: LaserSystem, point: OperatingPoint) -> MediumState:
    """Closed-form stationary medium variables at the field amplitude of ``point``.

    These are exact for the population equations and accurate to relative
    order Gamma_2/Gamma_1 (gamma_1/gamma_2) for the coherences.
    """
    c = derive_constants(system)
    act, pas = system.active, system.passive
    a = point.amplitude
    I, I_p = point.I, point.I_p
    return MediumState(
        sigma=c.beta * act.pump_rate * a / (2 * act.coupling * (1 + I)),
        sigma1=act.pump_rate / act.gamma1 * I / (1 + I),
        sigma2=act.pump_rate / act.gamma2 / (1 + I),
        pi=pas.pump_rate * c.beta_p * a / (2 * pas.coupling * (1 + I_p)),
        pi1=pas.pump_rate / pas.gamma1 / (1 + I_p),
        pi2=pas.pump_rate / pas.gamma2 * I_p / (1 + I_p),
    )
