"""Stability of stationary points, judged two independent ways.

The closed-form cooperativity criterion is evaluated verbatim and compared
with the eigenvalues of a finite-difference Jacobian of the classical drift.
For a free-running laser the drift is invariant under a global phase
rotation, so one eigenvalue is exactly neutral; that phase mode is reported
but excluded from the stability verdict.

With ``beta_p > beta`` the two routes disagree systematically: positivity of
the fluctuation decay rate requires ``A_p/kappa < (1+I_p)^2 I/(I_p-I)``
whereas the closed-form criterion states ``>``.  Reports carry both verdicts
and an explicit agreement field; nothing is reconciled silently.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotApplicable
from .model import LaserSystem, OperatingPoint, derive_constants
from .noise_spectra import decay_rate
from .steady_state import solve

log = logging.getLogger(__name__)

MARGINAL_TOL = 1e-9

DISCREPANCY_NOTE = (
    "For beta_p > beta the closed-form cooperativity criterion (A_p/kappa > rhs) and "
    "the linearized drift (stable iff D > 0, i.e. A_p/kappa < rhs) point in opposite "
    "directions. Both verdicts are reported per point; disagreements are recorded, "
    "not reconciled."
)


@dataclass(frozen=True)
class StabilityReport:
    point: OperatingPoint
    criterion_satisfied: bool | None
    criterion_rhs: float | None
    jacobian_eigenvalues: tuple[complex, complex]
    numerically_stable: bool
    marginal: bool
    decay_rate_D: float | None
    agreement: str
    note: str = ""


def cooperativity_criterion(system: LaserSystem, point: OperatingPoint) -> tuple[bool, float]:
    """Evaluate ``A_p/kappa > (1+I_p)^2 I / (I_p - I)``.

    Returns the verdict and the right-hand side.  When ``I_p < I`` the
    right-hand side is negative and the condition holds for any absorber.

    Raises
    ------
    NotApplicable
        At ``n = 0`` or when ``I_p == I`` (singular right-hand side).
    """
    if point.n_tilde <= 0:
        raise NotApplicable("cooperativity criterion needs a lasing point (n > 0)")
    I, I_p = point.I, point.I_p
    if I_p == I:
        raise NotApplicable("cooperativity criterion is singular at I_p == I")
    rhs = (1 + I_p) ** 2 * I / (I_p - I)
    return derive_constants(system).cooperativity > rhs, rhs


def drift(system: LaserSystem, x, y):
    """Classical drift of the field quadratures ``(Re a, Im a)``."""
    a = x + 1j * y
    g = system.gain(x * x + y * y)
    da = -0.5 * system.kappa * (a - system.cavity.a_in) + 0.5 * g * a
    return np.real(da), np.imag(da)


def jacobian(system: LaserSystem, point: OperatingPoint) -> np.ndarray:
    """Central-difference Jacobian of :func:`drift` at ``point``."""
    a0 = point.amplitude
    h = max(1e-6 * math.sqrt(point.n_tilde), 1e-9)
    J = np.empty((2, 2))
    for j, e in enumerate((1.0, 1j)):
        ap, am = a0 + h * e, a0 - h * e
        fp = np.array(drift(system, ap.real, ap.imag))
        fm = np.array(drift(system, am.real, am.imag))
        J[:, j] = (fp - fm) / (2 * h)
    return J


def numeric_jacobian(system: LaserSystem, point: OperatingPoint) -> tuple[complex, complex]:
    """Eigenvalues of the drift Jacobian ordered as (amplitude, phase).

    The amplitude eigenvalue belongs to the eigenvector best aligned with
    the radial direction of the stationary amplitude.  At ``n = 0`` the two
    directions are equivalent and the order is arbitrary.
    """
    J = jacobian(system, point)
    w, v = np.linalg.eig(J)
    if point.n_tilde == 0:
        return complex(w[0]), complex(w[1])
    phi = 0.0 if point.phase is None else point.phase
    radial = np.array([math.cos(phi), math.sin(phi)])
    k = int(np.argmax(np.abs(radial @ v)))
    return complex(w[k]), complex(w[1 - k])


def classify(system: LaserSystem, point: OperatingPoint) -> StabilityReport:
    kappa = system.kappa
    eig = numeric_jacobian(system, point)
    free_running = not system.injected
    notes = []
    if free_running and point.n_tilde > 0:
        # Phase rotation is a symmetry; its eigenvalue is zero by construction.
        decisive = [eig[0]]
        notes.append("phase mode neutral (rotation symmetry), excluded from verdict")
    else:
        decisive = list(eig)
    re = [z.real for z in decisive]
    marginal = any(abs(r) <= MARGINAL_TOL * kappa for r in re)
    stable = all(r < -MARGINAL_TOL * kappa for r in re)
    if marginal:
        notes.append("marginal eigenvalue")
        log.info("marginal eigenvalue at n=%g: %s", point.n_tilde, eig)

    D = decay_rate(system, point) if point.n_tilde > 0 else None
    try:
        satisfied, rhs = cooperativity_criterion(system, point)
    except NotApplicable as exc:
        satisfied, rhs, agreement = None, None, "not_applicable"
        notes.append(str(exc))
    else:
        agreement = "agree" if satisfied == stable else "disagree"
        if agreement == "disagree":
            log.info("criterion/Jacobian disagreement at n=%g (rhs=%g)", point.n_tilde, rhs)
    return StabilityReport(point, satisfied, rhs, eig, stable, marginal, D, agreement,
                           "; ".join(notes))


@dataclass(frozen=True)
class AgreementMap:
    """Per-point agreement between the cooperativity criterion and the Jacobian."""

    rows: tuple[dict, ...]
    note: str

    @property
    def counts(self) -> dict:
        out = {"agree": 0, "disagree": 0, "not_applicable": 0}
        for r in self.rows:
            out[r["agreement"]] += 1
        return out

    def to_dict(self) -> dict:
        return {"note": self.note, "counts": self.counts, "rows": list(self.rows)}


def with_cooperativity(system: LaserSystem, cooperativity: float) -> LaserSystem:
    """Copy of ``system`` with the absorber pump set so that A_p/kappa = ``cooperativity``."""
    from dataclasses import replace

    beta_p = system.passive.beta
    rp = cooperativity * system.kappa / beta_p
    return replace(system, passive=replace(system.passive, pump_rate=rp))


def agreement_map(system: LaserSystem, cooperativities) -> AgreementMap:
    """Classify every stationary point while sweeping A_p/kappa."""
    rows = []
    for coop in cooperativities:
        sys_k = with_cooperativity(system, float(coop))
        for p in solve(sys_k).points:
            rep = classify(sys_k, p)
            rows.append({
                "cooperativity": float(coop),
                "n_tilde": p.n_tilde,
                "branch": p.branch,
                "I": p.I,
                "I_p": p.I_p,
                "criterion_rhs": rep.criterion_rhs,
                "criterion_satisfied": rep.criterion_satisfied,
                "numerically_stable": rep.numerically_stable,
                "decay_rate_D": rep.decay_rate_D,
                "agreement": rep.agreement,
            })
    c = derive_constants(system)
    note = DISCREPANCY_NOTE if c.beta_p > c.beta else ""
    return AgreementMap(tuple(rows), note)
