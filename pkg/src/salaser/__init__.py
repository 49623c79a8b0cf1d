"""Single-mode laser with a regularly pumped gain medium and a saturable absorber.

Steady states, stability, photocurrent noise spectra, phase diffusion and
time-domain cross-checks.
"""
__version__ = "0.1.0"

from .errors import (IntegrationError, LaserModelError, NoLockingSolution, NonclassicalNoise,
                     NonConvergence, NotApplicable, NotSynchronized, NumericalError,
                     ParameterError, RegimeWarning, StiffnessFailure, WeakLockingWarning,
                     ZeroIntensity)
from .model import (ActiveMedium, CavityField, DerivedConstants, Injection, LaserSystem,
                    OperatingPoint, PassiveMedium, derive_constants, design_system, make_point)
from .noise_spectra import (SpectrumSeries, fano_spectrum, homodyne_spectrum,
                            noise_coefficients, phase_diffusion_rate)
from .stability import StabilityReport, agreement_map, classify, cooperativity_criterion
from .steady_state import BranchSet, solve, solve_free_running, solve_injected

__all__ = [
    "ActiveMedium", "BranchSet", "CavityField", "DerivedConstants", "Injection",
    "IntegrationError", "LaserModelError", "LaserSystem", "NoLockingSolution",
    "NonConvergence", "NonclassicalNoise", "NotApplicable", "NotSynchronized",
    "NumericalError", "OperatingPoint", "ParameterError", "PassiveMedium", "RegimeWarning",
    "SpectrumSeries", "StabilityReport", "StiffnessFailure", "WeakLockingWarning",
    "ZeroIntensity", "agreement_map", "classify", "cooperativity_criterion",
    "derive_constants", "design_system", "fano_spectrum", "homodyne_spectrum",
    "make_point", "noise_coefficients", "phase_diffusion_rate", "solve",
    "solve_free_running", "solve_injected",
]
