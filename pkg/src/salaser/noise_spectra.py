"""Closed-form noise of the laser with saturable absorption.

Covers the delta-correlation strengths of the medium Langevin sources, the
adiabatic field-noise correlators, the photon-number relaxation rate ``D``
and source coefficient ``D1``, direct-detection (Fano) and balanced
homodyne photocurrent spectra, and the phase-diffusion rate.

Spectra are shot-noise normalized: the Fano spectrum by the mean
photocurrent ``kappa * n``, homodyne spectra by the local-oscillator power.
All frequencies are angular.  Negative source powers are physical in the
nonclassical regime and are returned as-is, never clamped.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSynchronized, RegimeWarning, WeakLockingWarning, ZeroIntensity
from .model import MU_SMALL, LaserSystem, OperatingPoint, check_regime, derive_constants

REGIMES = ("general", "saturated")
OBSERVABLES = ("fano", "homodyne_x", "homodyne_y", "photon_number", "source")


@dataclass(frozen=True)
class NoiseCoefficients:
    D: float
    D1: float
    regime: str = "general"
    synchronized: bool = False

    @property
    def nonclassical(self) -> bool:
        return self.D1 < 0


@dataclass(frozen=True)
class SpectrumSeries:
    omega: np.ndarray
    values: np.ndarray
    observable: str
    normalization: str
    flags: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if omega.shape != values.shape or omega.ndim != 1:
            raise ValueError("omega and values must be 1-d arrays of equal length")
        if omega.size > 1 and np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("spectral values must be finite")
        if self.observable not in OBSERVABLES:
            raise ValueError(f"unknown observable {self.observable!r}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "values", values)
        if not self.flags:
            object.__setattr__(self, "flags", tuple("" for _ in omega))


@dataclass(frozen=True)
class AdiabaticCorrelators:
    """Field-noise correlators after adiabatic elimination.

    ``phi_phi`` and ``phip_phip`` already include the ``a* a*`` prefactor.
    """

    phi_phi: float
    phi_phistar: float
    phip_phip: float
    phip_phipstar: float


@dataclass(frozen=True)
class MediumCorrelators:
    """Delta-correlation strengths of the medium Langevin sources.

    Active sources F (coherence), F1 (lower), F2 (upper level); passive
    sources G, G1, G2 likewise.  Complex entries are coherence-like.
    """

    FstarF: float
    FF: complex
    F1F: complex
    F2F2: float
    F1F1: float
    F2F1: float
    GstarG: float
    GG: complex
    G2G: complex
    G1G1: float
    G2G2: float
    G1G2: float


def _grid(omega):
    return np.atleast_1d(np.asarray(omega, dtype=float))


def _lorentz_metadata(system, point, **extra):
    c = derive_constants(system)
    meta = {
        "kappa": system.kappa, "beta": c.beta, "beta_p": c.beta_p,
        "A": c.gain_A, "A_p": c.loss_Ap, "s": system.active.pump_statistic,
        "n_tilde": point.n_tilde, "I": point.I, "I_p": point.I_p, "mu": point.mu,
    }
    meta.update(extra)
    return meta


def adiabatic_correlators(system: LaserSystem, point: OperatingPoint) -> AdiabaticCorrelators:
    c = derive_constants(system)
    s = system.active.pump_statistic
    n, I, I_p = point.n_tilde, point.I, point.I_p
    act = I / (1 + I) * c.gain_A / (1 + I) * (1 + s / 2)
    pas = I_p / (1 + I_p) * c.loss_Ap / (1 + I_p)
    return AdiabaticCorrelators(
        phi_phi=-n / 2 * act,
        phi_phistar=-act / 2 + c.gain_A / (2 * (1 + I)),
        phip_phip=-n / 2 * pas,
        phip_phipstar=-pas / 2 + c.loss_Ap / (2 * (1 + I_p)),
    )


def medium_correlators(system: LaserSystem, point: OperatingPoint) -> MediumCorrelators:
    from .steady_state import full_system_steady_state

    act, pas = system.active, system.passive
    m = full_system_steady_state(system, point)
    a = point.amplitude
    # g (a* sigma + a sigma*) and g_p (a* pi + a pi*)
    x = 2 * act.coupling * (a.conjugate() * m.sigma).real
    xp = 2 * pas.coupling * (a.conjugate() * m.pi).real
    s = act.pump_statistic
    return MediumCorrelators(
        FstarF=act.gamma1 * m.sigma2 + act.pump_rate,
        FF=2 * act.coupling * m.sigma * a,
        F1F=act.gamma1 * m.sigma,
        F2F2=act.gamma2 * m.sigma2 + act.pump_rate * (1 - s) - x,
        F1F1=act.gamma1 * m.sigma1 - x,
        F2F1=x,
        GstarG=pas.gamma2 * m.pi1 + pas.pump_rate,
        # Mirror image of the active F F strength (coherence times field).
        GG=2 * pas.coupling * m.pi * a,
        G2G=pas.gamma2 * m.pi,
        G1G1=pas.gamma1 * m.pi1 + pas.pump_rate - xp,
        G2G2=pas.gamma2 * m.pi2 - xp,
        G1G2=xp,
    )


def noise_coefficients(system: LaserSystem, point: OperatingPoint,
                       synchronized: bool | None = None,
                       regime: str = "general") -> NoiseCoefficients:
    """Photon-number decay rate ``D`` and source coefficient ``D1``.

    Parameters
    ----------
    synchronized : bool, optional
        Use the phase-locked forms, in which the cavity rate enters as
        ``kappa (1 - mu)``.  Defaults to ``point.mu > 0``.
    regime : {"general", "saturated"}
        ``"saturated"`` returns the deep-saturation limits
        ``D = kappa (1 - mu)`` and ``D1 = -(s/2) kappa (1 - mu)``.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    if synchronized is None:
        synchronized = point.mu > 0
    mu = point.mu if synchronized else 0.0
    k = system.kappa * (1 - mu)
    s = system.active.pump_statistic
    if regime == "saturated":
        return NoiseCoefficients(k, -s / 2 * k, regime, synchronized)
    c = derive_constants(system)
    I, I_p = point.I, point.I_p
    sat, sat_p = I / (1 + I), I_p / (1 + I_p)
    absorbed = c.loss_Ap / (1 + I_p)
    regular = (1 - s / 2 * I) / (1 + I)
    D = k * sat + absorbed * (sat - sat_p)
    D1 = k * regular + absorbed * (regular + 1 / (1 + I_p))
    return NoiseCoefficients(D, D1, regime, synchronized)


def decay_rate(system: LaserSystem, point: OperatingPoint) -> float:
    return noise_coefficients(system, point).D


def intensity_noise_spectrum(system: LaserSystem, point: OperatingPoint, omega,
                             regime: str = "general") -> SpectrumSeries:
    """Photon-number fluctuation spectrum ``2 n D1 / (D^2 + omega^2)``."""
    w = _grid(omega)
    nc = noise_coefficients(system, point, synchronized=False, regime=regime)
    values = 2 * point.n_tilde * nc.D1 / (nc.D**2 + w**2)
    flag = "nonclassical" if nc.nonclassical else ""
    return SpectrumSeries(w, values, "photon_number", "absolute", tuple(flag for _ in w),
                          _lorentz_metadata(system, point, D=nc.D, D1=nc.D1, regime=regime))


def fano_spectrum(system: LaserSystem, point: OperatingPoint, omega,
                  regime: str = "general") -> SpectrumSeries:
    """Direct-detection photocurrent noise normalized to shot noise.

    ``1 + 2 kappa D1 / (D^2 + omega^2)``; values below one are flagged
    ``nonclassical`` (sub-Poissonian).
    """
    if point.locked:
        raise ValueError("the Fano spectrum is defined for free-running points")
    check_regime(system)
    w = _grid(omega)
    nc = noise_coefficients(system, point, synchronized=False, regime=regime)
    values = 1 + 2 * system.kappa * nc.D1 / (nc.D**2 + w**2)
    flags = tuple("nonclassical" if v < 1 else "" for v in values)
    meta = _lorentz_metadata(system, point, D=nc.D, D1=nc.D1, regime=regime,
                             mean_photocurrent=system.kappa * point.n_tilde)
    return SpectrumSeries(w, values, "fano", "shot_noise", flags, meta)


def phase_diffusion_rate(system: LaserSystem, point: OperatingPoint) -> float:
    """Phase-diffusion coefficient ``(kappa/n)(1 + 2 (A_p/kappa) / (1 + I_p))``.

    The phase variance grows as ``rate * (t2 - t1)``.
    """
    if point.n_tilde <= 0:
        raise ZeroIntensity("phase diffusion diverges at n = 0")
    coop = derive_constants(system).cooperativity
    return system.kappa / point.n_tilde * (1 + 2 * coop / (1 + point.I_p))


def phase_variance(system: LaserSystem, point: OperatingPoint, elapsed) -> np.ndarray:
    return phase_diffusion_rate(system, point) * np.asarray(elapsed, dtype=float)


def phase_noise_projection(system: LaserSystem, point: OperatingPoint) -> float:
    """Phase-source strength projected from the adiabatic correlators.

    Uses the source ``-(i/n)(a* Phi - a Phi*)`` summed over both media, so
    ``<Phi_phi^2> = 2 (n <Phi Phi*> - Re a*a*<Phi Phi>) / n^2``.  Equals
    :func:`phase_diffusion_rate` at every stationary free-running point.
    """
    n = point.n_tilde
    if n <= 0:
        raise ZeroIntensity("phase diffusion diverges at n = 0")
    c = adiabatic_correlators(system, point)
    total = (n * c.phi_phistar - c.phi_phi) + (n * c.phip_phipstar - c.phip_phip)
    return 2 * total / n**2


@dataclass(frozen=True)
class QuadratureSources:
    x_power: float
    y_power: float

    @property
    def nonclassical_x(self) -> bool:
        return self.x_power < 0


def _require_locked(point):
    if not point.locked:
        raise NotSynchronized("quantity requires a phase-locked (injected) point")
    if point.mu > MU_SMALL:
        warnings.warn(f"mu = {point.mu:.3g} is not small; locked-regime formulas are "
                      "first order in mu", RegimeWarning, stacklevel=3)
    if point.weak_locking:
        warnings.warn("injected signal below the phase-locking threshold",
                      WeakLockingWarning, stacklevel=3)


def quadrature_source_spectra(system: LaserSystem, point: OperatingPoint,
                              regime: str = "general") -> QuadratureSources:
    """Spectral powers of the x and y quadrature Langevin sources."""
    _require_locked(point)
    nc = noise_coefficients(system, point, synchronized=True, regime=regime)
    k = system.kappa * (1 - point.mu)
    absorbed = 0.0 if regime == "saturated" else derive_constants(system).loss_Ap / (1 + point.I_p)
    return QuadratureSources(nc.D1 / 2, k / 2 + absorbed)


def homodyne_spectrum(system: LaserSystem, point: OperatingPoint, quadrature: str, omega,
                      regime: str = "general", vacuum_reference: float = 0.0) -> SpectrumSeries:
    """Balanced-homodyne photocurrent spectrum normalized to the LO power.

    x quadrature (LO phase = injected phase)::

        1 + 2 kappa D1 / ((D + kappa mu / 2)^2 + omega^2)

    y quadrature (LO phase shifted by pi/2): the y fluctuation relaxes at
    ``kappa mu / 2`` driven by a source of power ``P_y``; the same
    input-output map that turns the x source ``D1/2`` into the expression
    above gives::

        1 + 2 kappa (2 P_y - (kappa/2) vacuum_reference) / ((kappa mu / 2)^2 + omega^2)

    ``vacuum_reference`` (default 0) subtracts a vacuum-level share of the
    y source; with 0 the x and y channels are treated identically.
    """
    if quadrature not in ("x", "y"):
        raise ValueError("quadrature must be 'x' or 'y'")
    _require_locked(point)
    check_regime(system)
    w = _grid(omega)
    k, mu = system.kappa, point.mu
    nc = noise_coefficients(system, point, synchronized=True, regime=regime)
    if quadrature == "x":
        values = 1 + 2 * k * nc.D1 / ((nc.D + k * mu / 2) ** 2 + w**2)
        extra = {"source_power": nc.D1 / 2}
    else:
        p_y = quadrature_source_spectra(system, point, regime).y_power
        values = 1 + 2 * k * (2 * p_y - k / 2 * vacuum_reference) / ((k * mu / 2) ** 2 + w**2)
        extra = {"source_power": p_y, "vacuum_reference": vacuum_reference}
    flags = tuple("nonclassical" if v < 1 else "" for v in values)
    meta = _lorentz_metadata(system, point, D=nc.D, D1=nc.D1, regime=regime,
                             quadrature=quadrature, lo_phase=point.phase + (0 if quadrature == "x"
                                                                           else math.pi / 2),
                             **extra)
    return SpectrumSeries(w, values, f"homodyne_{quadrature}", "local_oscillator", flags, meta)
