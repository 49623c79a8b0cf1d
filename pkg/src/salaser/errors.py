"""Exception and warning types raised by the library."""


class LaserModelError(Exception):
    """Base class for every error raised by :mod:`salaser`."""


class ParameterError(LaserModelError, ValueError):
    """A physical parameter violates its admissible range."""


class NumericalError(LaserModelError):
    """A solver or integrator could not produce a trustworthy answer."""


class NoLockingSolution(NumericalError):
    """The injected-signal stationarity condition has no positive root."""


class NotApplicable(LaserModelError, ValueError):
    """A closed-form criterion is singular or undefined at the given point."""


class NotSynchronized(LaserModelError, ValueError):
    """A phase-locked quantity was requested for a free-running point."""


class ZeroIntensity(LaserModelError, ValueError):
    """A quantity diverges at zero intracavity photon number."""


class NonclassicalNoise(NumericalError):
    """A noise source with negative spectral power cannot be sampled classically."""


class IntegrationError(NumericalError):
    """Time integration failed."""


class StiffnessFailure(IntegrationError):
    """The adaptive integrator shrank its step below the admissible floor."""


class NonConvergence(IntegrationError):
    """The trajectory did not reach a steady state before ``t_end``."""


class RegimeWarning(UserWarning):
    """An asymptotic validity condition of the model is not met."""


class WeakLockingWarning(UserWarning):
    """The injected signal is too weak to lock the lasing phase (n_in * n < 1)."""


class DegenerateQuadraticWarning(UserWarning):
    """The leading coefficient of the stationarity quadratic underflowed."""
