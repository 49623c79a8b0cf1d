"""Physical parameters of a single-mode laser with a saturable absorbing cell.

All rates are stored in absolute units (inverse time).  The gain medium is a
two-level system pumped into its upper level at rate ``R`` with pump
regularity ``s`` (0 Poissonian, 1 strictly regular); the absorber is the
mirror-image two-level system pumped into its lower level with Poissonian
statistics.  Every derived symbol used by the rest of the package lives here:

=========  ===============================================
symbol     location
=========  ===============================================
kappa      ``CavityField.kappa``
beta       ``DerivedConstants.beta``
beta_p     ``DerivedConstants.beta_p``
A          ``DerivedConstants.gain_A``
A_p        ``DerivedConstants.loss_Ap``
R          ``ActiveMedium.pump_rate``
R_p        ``PassiveMedium.pump_rate``
s          ``ActiveMedium.pump_statistic``
n          ``OperatingPoint.n_tilde``
I          ``OperatingPoint.I``
I_p        ``OperatingPoint.I_p``
mu         ``OperatingPoint.mu``
phi_in     ``Injection.phi_in``
n_in       ``Injection.n_in``
omega      ``SpectrumSeries.omega``
=========  ===============================================
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

from .errors import ParameterError, RegimeWarning

#: Asymptotic inequalities (x << y) are treated as satisfied when x <= FACTOR * y.
REGIME_FACTOR = 0.1
ADIABATIC_FACTOR = 0.01
MU_SMALL = 0.1

TWO_PI = 2.0 * math.pi

BRANCHES = ("trivial", "lower", "upper")

SYMBOLS = {
    "kappa": "CavityField.kappa",
    "beta": "DerivedConstants.beta",
    "beta_p": "DerivedConstants.beta_p",
    "A": "DerivedConstants.gain_A",
    "A_p": "DerivedConstants.loss_Ap",
    "R": "ActiveMedium.pump_rate",
    "R_p": "PassiveMedium.pump_rate",
    "s": "ActiveMedium.pump_statistic",
    "n_tilde": "OperatingPoint.n_tilde",
    "I": "OperatingPoint.I",
    "I_p": "OperatingPoint.I_p",
    "mu": "OperatingPoint.mu",
    "phi_in": "Injection.phi_in",
    "n_in": "Injection.n_in",
    "omega": "SpectrumSeries.omega",
}


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


def _nonnegative(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise ParameterError(f"{name} must be a non-negative finite number, got {value!r}")


@dataclass(frozen=True)
class ActiveMedium:
    """Gain medium: decay rates, coupling, pump rate and pump regularity."""

    gamma1: float
    gamma2: float
    coupling: float
    pump_rate: float
    pump_statistic: float = 0.0

    def __post_init__(self):
        _positive("active.gamma1", self.gamma1)
        _positive("active.gamma2", self.gamma2)
        _positive("active.coupling", self.coupling)
        _nonnegative("active.pump_rate", self.pump_rate)
        s = self.pump_statistic
        if not (math.isfinite(s) and 0.0 <= s <= 1.0):
            raise ParameterError(f"active.pump_statistic must lie in [0, 1], got {s!r}")

    @property
    def gamma2_small(self) -> bool:
        return self.gamma2 <= REGIME_FACTOR * self.gamma1

    @property
    def beta(self) -> float:
        return 4.0 * self.coupling**2 / (self.gamma1 * self.gamma2)


@dataclass(frozen=True)
class PassiveMedium:
    """Absorbing medium, pumped into its lower level with Poissonian statistics."""

    gamma1: float
    gamma2: float
    coupling: float
    pump_rate: float

    def __post_init__(self):
        _positive("passive.gamma1", self.gamma1)
        _positive("passive.gamma2", self.gamma2)
        _positive("passive.coupling", self.coupling)
        _nonnegative("passive.pump_rate", self.pump_rate)

    @property
    def gamma1_small(self) -> bool:
        return self.gamma1 <= REGIME_FACTOR * self.gamma2

    @property
    def beta(self) -> float:
        return 4.0 * self.coupling**2 / (self.gamma1 * self.gamma2)


@dataclass(frozen=True)
class Injection:
    """Weak coherent signal injected through the output mirror."""

    n_in: float
    phi_in: float = 0.0

    def __post_init__(self):
        _nonnegative("injection.n_in", self.n_in)
        if not (math.isfinite(self.phi_in) and 0.0 <= self.phi_in < TWO_PI):
            raise ParameterError(f"injection.phi_in must lie in [0, 2pi), got {self.phi_in!r}")

    @property
    def amplitude(self) -> complex:
        return math.sqrt(self.n_in) * complex(math.cos(self.phi_in), math.sin(self.phi_in))


@dataclass(frozen=True)
class CavityField:
    kappa: float
    injection: Injection | None = None

    def __post_init__(self):
        _positive("cavity.kappa", self.kappa)

    @property
    def n_in(self) -> float:
        return 0.0 if self.injection is None else self.injection.n_in

    @property
    def phi_in(self) -> float:
        return 0.0 if self.injection is None else self.injection.phi_in

    @property
    def a_in(self) -> complex:
        return 0j if self.injection is None else self.injection.amplitude


@dataclass(frozen=True)
class DerivedConstants:
    beta: float
    beta_p: float
    gain_A: float
    loss_Ap: float
    cooperativity: float


@dataclass(frozen=True)
class LaserSystem:
    active: ActiveMedium
    passive: PassiveMedium
    cavity: CavityField

    @property
    def kappa(self) -> float:
        return self.cavity.kappa

    @property
    def adiabatic_valid(self) -> bool:
        slowest_medium = min(self.active.gamma1, self.active.gamma2,
                             self.passive.gamma1, self.passive.gamma2)
        return self.kappa <= ADIABATIC_FACTOR * slowest_medium

    @property
    def adiabatic_ratio(self) -> float:
        """kappa / min(Gamma_1, Gamma_2, gamma_1, gamma_2)."""
        return self.kappa / min(self.active.gamma1, self.active.gamma2,
                                self.passive.gamma1, self.passive.gamma2)

    @property
    def stiffness_ratio(self) -> float:
        """max(Gamma_1, Gamma_2, gamma_1, gamma_2) / kappa."""
        return max(self.active.gamma1, self.active.gamma2,
                   self.passive.gamma1, self.passive.gamma2) / self.kappa

    @property
    def constants(self) -> DerivedConstants:
        return derive_constants(self)

    @property
    def injected(self) -> bool:
        return self.cavity.n_in > 0

    def gain(self, n):
        """Net saturated round-trip rate ``A/(1+beta n) - A_p/(1+beta_p n)``.

        Works elementwise on numpy arrays.
        """
        c = derive_constants(self)
        return c.gain_A / (1 + c.beta * n) - c.loss_Ap / (1 + c.beta_p * n)

    def with_injection(self, n_in: float, phi_in: float = 0.0) -> LaserSystem:
        injection = Injection(n_in, phi_in) if n_in > 0 else None
        return replace(self, cavity=replace(self.cavity, injection=injection))

    def normalized(self) -> LaserSystem:
        """Rescale time so that kappa = 1.

        All rates (and the rate-like couplings) are divided by kappa; the
        saturation photon numbers 1/beta, 1/beta_p are unchanged.
        """
        k = self.kappa
        a, p = self.active, self.passive
        return LaserSystem(
            ActiveMedium(a.gamma1 / k, a.gamma2 / k, a.coupling / k, a.pump_rate / k,
                         a.pump_statistic),
            PassiveMedium(p.gamma1 / k, p.gamma2 / k, p.coupling / k, p.pump_rate / k),
            CavityField(1.0, self.cavity.injection),
        )


@dataclass(frozen=True)
class OperatingPoint:
    """A stationary solution of the closed classical field equation.

    ``phase`` is ``None`` for free-running points, whose phase is arbitrary.
    """

    n_tilde: float
    I: float
    I_p: float
    mu: float = 0.0
    branch: str = "upper"
    phase: float | None = None
    weak_locking: bool = False
    n_free: float | None = field(default=None, compare=False)

    def __post_init__(self):
        _nonnegative("n_tilde", self.n_tilde)
        _nonnegative("mu", self.mu)
        if self.branch not in BRANCHES:
            raise ParameterError(f"branch must be one of {BRANCHES}, got {self.branch!r}")

    @property
    def locked(self) -> bool:
        return self.phase is not None and self.mu > 0

    @property
    def amplitude(self) -> complex:
        phi = 0.0 if self.phase is None else self.phase
        return math.sqrt(self.n_tilde) * complex(math.cos(phi), math.sin(phi))


def derive_constants(system: LaserSystem) -> DerivedConstants:
    beta = system.active.beta
    beta_p = system.passive.beta
    gain_A = beta * system.active.pump_rate
    loss_Ap = beta_p * system.passive.pump_rate
    return DerivedConstants(beta, beta_p, gain_A, loss_Ap, loss_Ap / system.kappa)


def make_point(system: LaserSystem, n_tilde: float, branch: str = "upper",
               mu: float = 0.0, phase: float | None = None, **kwargs) -> OperatingPoint:
    """Build an :class:`OperatingPoint` with saturation parameters filled in."""
    c = derive_constants(system)
    return OperatingPoint(n_tilde, c.beta * n_tilde, c.beta_p * n_tilde, mu, branch, phase,
                          **kwargs)


def saturation_parameters(point: OperatingPoint) -> tuple[float, float]:
    return point.I, point.I_p


def check_regime(system: LaserSystem, *, adiabatic=True, pump_hierarchy=True, stacklevel=3):
    """Warn about asymptotic conditions that ``system`` does not meet."""
    if pump_hierarchy and not system.active.gamma2_small:
        warnings.warn("gain medium violates Gamma_2 << Gamma_1", RegimeWarning,
                      stacklevel=stacklevel)
    if pump_hierarchy and not system.passive.gamma1_small:
        warnings.warn("absorber violates gamma_1 << gamma_2", RegimeWarning,
                      stacklevel=stacklevel)
    if adiabatic and not system.adiabatic_valid:
        warnings.warn(f"adiabatic elimination questionable: kappa/min(rates) = "
                      f"{system.adiabatic_ratio:.3g}", RegimeWarning, stacklevel=stacklevel)


def design_system(kappa: float = 1.0, *, beta: float, beta_p: float, n_tilde: float,
                  loss_Ap: float = 0.0, pump_statistic: float = 0.0, mu: float = 0.0,
                  phi_in: float = 0.0, fast: float | None = None,
                  slow: float | None = None) -> LaserSystem:
    """Construct a system whose stationary photon number is ``n_tilde``.

    The gain pump rate is chosen so that ``n_tilde`` solves the stationarity
    condition ``kappa (1 - mu) = A/(1+I) - A_p/(1+I_p)``; when ``mu > 0`` the
    injected photon number is set to ``mu**2 * n_tilde``.  The fast medium
    rates (Gamma_1, gamma_2) default to ``1e4 kappa`` and the slow ones
    (Gamma_2, gamma_1) to ``1e2 kappa``.

    Parameters
    ----------
    beta, beta_p : float
        Inverse saturation photon numbers of the gain and absorbing media.
    loss_Ap : float
        Linear absorption rate A_p; the absorber pump is ``loss_Ap / beta_p``.
    """
    fast = 1e4 * kappa if fast is None else fast
    slow = 1e2 * kappa if slow is None else slow
    I, I_p = beta * n_tilde, beta_p * n_tilde
    gain_A = (1 + I) * (kappa * (1 - mu) + loss_Ap / (1 + I_p))
    g = math.sqrt(beta * fast * slow / 4)
    g_p = math.sqrt(beta_p * fast * slow / 4)
    injection = Injection(mu**2 * n_tilde, phi_in) if mu > 0 else None
    return LaserSystem(
        ActiveMedium(fast, slow, g, gain_A / beta, pump_statistic),
        PassiveMedium(slow, fast, g_p, loss_Ap / beta_p),
        CavityField(kappa, injection),
    )
