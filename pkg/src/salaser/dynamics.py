"""Time-domain engines.

* Deterministic integration of the full mean-field system (field plus both
  two-level media) and of the closed adiabatic field equation.
* Seeded stochastic simulation of the linearized photon-number and phase
  fluctuations, with averaged-periodogram spectral estimation.

Only classically representable noise is sampled.  The nonlinear Langevin
field equation has correlators that can be negative (sub-Poissonian pump),
which no classical random process reproduces; that regime is covered by the
closed forms in :mod:`salaser.noise_spectra` and requests to sample it raise
:class:`~salaser.errors.NonclassicalNoise`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.signal import get_window, lfilter, spectrogram

from .errors import (IntegrationError, NonclassicalNoise, NonConvergence, NotApplicable,
                     StiffnessFailure, ZeroIntensity)
from .model import LaserSystem, OperatingPoint, check_regime
from .noise_spectra import noise_coefficients, phase_diffusion_rate
from .steady_state import full_system_steady_state

#: Above this max(rate)/kappa the "auto" method switches to an implicit scheme.
EXPLICIT_STIFFNESS_LIMIT = 2e3


@dataclass(frozen=True)
class TrajectoryState:
    time: float
    field: complex
    active: tuple[complex, float, float]
    passive: tuple[complex, float, float]

    @property
    def photons(self) -> float:
        return abs(self.field) ** 2

    def to_vector(self) -> np.ndarray:
        a, (s, s1, s2), (p, p1, p2) = self.field, self.active, self.passive
        return np.array([a.real, a.imag, s.real, s.imag, s1, s2, p.real, p.imag, p1, p2])

    @classmethod
    def from_vector(cls, t, y) -> TrajectoryState:
        return cls(float(t), complex(y[0], y[1]),
                   (complex(y[2], y[3]), float(y[4]), float(y[5])),
                   (complex(y[6], y[7]), float(y[8]), float(y[9])))

    @classmethod
    def from_point(cls, system: LaserSystem, point: OperatingPoint,
                   field: complex | None = None) -> TrajectoryState:
        """Media at their closed-form stationary values for ``point``.

        ``field`` overrides the amplitude (the media stay at ``point``).
        """
        m = full_system_steady_state(system, point)
        a = point.amplitude if field is None else complex(field)
        return cls(0.0, a, (m.sigma, m.sigma1, m.sigma2), (m.pi, m.pi1, m.pi2))


def full_rhs(system: LaserSystem):
    """Right-hand side of the noise-free field + media equations.

    State ``[Re a, Im a, Re sigma, Im sigma, sigma1, sigma2, Re pi, Im pi, pi1, pi2]``.
    The absorber coherence enters the field equation with a negative sign so
    that population transfer lower -> upper in the absorber removes energy
    from the field; this is what makes the adiabatic limit an absorber.
    """
    act, pas, cav = system.active, system.passive, system.cavity
    G1, G2, g, R = act.gamma1, act.gamma2, act.coupling, act.pump_rate
    y1, y2, gp, Rp = pas.gamma1, pas.gamma2, pas.coupling, pas.pump_rate
    k, a_in = cav.kappa, cav.a_in

    def rhs(t, y):
        a = y[0] + 1j * y[1]
        sig = y[2] + 1j * y[3]
        pi = y[6] + 1j * y[7]
        s1, s2, p1, p2 = y[4], y[5], y[8], y[9]
        xs = 2 * g * (sig.conjugate() * a).real
        xp = 2 * gp * (pi.conjugate() * a).real
        da = -0.5 * k * (a - a_in) + g * sig - gp * pi
        dsig = -0.5 * G1 * sig + g * (s2 - s1) * a
        dpi = -0.5 * y2 * pi + gp * (p1 - p2) * a
        return np.array([
            da.real, da.imag, dsig.real, dsig.imag,
            -G1 * s1 + xs,
            R - G2 * s2 - xs,
            dpi.real, dpi.imag,
            Rp - y1 * p1 - xp,
            -y2 * p2 + xp,
        ])

    return rhs


def full_residual(system: LaserSystem, state: TrajectoryState) -> float:
    """Largest right-hand side, each scaled by its own relaxation rate and magnitude."""
    act, pas = system.active, system.passive
    y = state.to_vector()
    f = full_rhs(system)(state.time, y)
    rates = np.array([system.kappa] * 2 + [act.gamma1] * 3 + [act.gamma2]
                     + [pas.gamma2] * 2 + [pas.gamma1] + [pas.gamma2])
    mag = np.abs(y)
    pairs = [(0, 1), (2, 3), (6, 7)]
    for i, j in pairs:
        mag[i] = mag[j] = math.hypot(y[i], y[j])
    floor = 1e-12 * max(np.max(mag), 1.0)
    return float(np.max(np.abs(f) / (rates * np.maximum(mag, floor))))


def _method(system, method):
    if method != "auto":
        return method
    return "DOP853" if system.stiffness_ratio <= EXPLICIT_STIFFNESS_LIMIT else "Radau"


def _integrate(fun, y0, t_end, method, rtol, atol, n_samples, stiffness, jac=None):
    kwargs = {"jac": jac} if jac is not None and method in ("Radau", "BDF", "LSODA") else {}
    sol = solve_ivp(fun, (0.0, t_end), y0, method=method, rtol=rtol, atol=atol,
                    dense_output=True, **kwargs)
    if sol.status < 0:
        raise StiffnessFailure(f"{sol.message} (stiffness ratio max(rate)/kappa = "
                               f"{stiffness:.3g})")
    # The first step is a trial guess and the last one is clipped to t_end;
    # neither says anything about the step the dynamics require.
    steps = np.diff(sol.t)[1:-1]
    if steps.size and np.min(steps) < 1e-12 * t_end:
        raise StiffnessFailure(f"step below 1e-12 t_end (stiffness ratio {stiffness:.3g})")
    t_eval = np.linspace(0.0, t_end, n_samples)
    y = sol.sol(t_eval)
    y[:, 0] = y0
    return _Samples(t_eval, y)


@dataclass(frozen=True)
class _Samples:
    t: np.ndarray
    y: np.ndarray


def integrate_full_system(system: LaserSystem, initial: TrajectoryState, t_end: float, *,
                          rtol: float = 1e-8, atol: float = 1e-10, n_samples: int = 201,
                          method: str = "auto", require_steady: bool = False,
                          steady_tol: float = 1e-6) -> list[TrajectoryState]:
    """Integrate the noise-free field and media equations up to ``t_end``.

    ``method="auto"`` uses an explicit 8th-order Runge-Kutta pair while the
    medium/cavity rate ratio stays moderate and the implicit Radau IIA
    scheme beyond it.

    Raises
    ------
    StiffnessFailure
        The integrator could not advance.
    NonConvergence
        ``require_steady`` is set and the final scaled residual exceeds
        ``steady_tol``.
    IntegrationError
        A population went negative beyond round-off.
    """
    meth = _method(system, method)
    sol = _integrate(full_rhs(system), initial.to_vector(), t_end, meth, rtol, atol,
                     n_samples, system.stiffness_ratio)
    states = [TrajectoryState.from_vector(t, sol.y[:, i]) for i, t in enumerate(sol.t)]
    pops = sol.y[[4, 5, 8, 9]]
    scale = max(np.max(np.abs(pops)), 1e-300)
    if np.min(pops) < -1e-9 * scale:
        raise IntegrationError("population became negative during integration")
    if require_steady:
        res = full_residual(system, states[-1])
        if res > steady_tol:
            raise NonConvergence(f"scaled residual {res:.3g} > {steady_tol:g} at t_end={t_end:g}")
    return states


def adiabatic_rhs(system: LaserSystem):
    k, a_in = system.kappa, system.cavity.a_in

    def rhs(t, y):
        a = y[0] + 1j * y[1]
        da = -0.5 * k * (a - a_in) + 0.5 * system.gain(y[0] ** 2 + y[1] ** 2) * a
        return np.array([da.real, da.imag])

    return rhs


def integrate_adiabatic(system: LaserSystem, a0: complex, t_end: float, *,
                        rtol: float = 1e-8, atol: float = 1e-10, n_samples: int = 201,
                        method: str = "DOP853") -> list[tuple[float, complex]]:
    """Integrate the closed classical field equation from ``a0``."""
    check_regime(system, pump_hierarchy=False)
    sol = _integrate(adiabatic_rhs(system), [complex(a0).real, complex(a0).imag], t_end,
                     method, rtol, atol, n_samples, 1.0)
    return [(float(t), complex(sol.y[0, i], sol.y[1, i])) for i, t in enumerate(sol.t)]


# --------------------------------------------------------------------------- stochastic


@dataclass(frozen=True)
class StochasticRunConfig:
    seed: int
    dt: float
    duration: float
    n_realizations: int = 1
    burn_in: float = 0.0
    segments: int = 50

    def __post_init__(self):
        if not (self.dt > 0 and self.duration > self.dt):
            raise ValueError("need 0 < dt < duration")
        if self.n_realizations < 1 or self.segments < 1:
            raise ValueError("n_realizations and segments must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")

    @classmethod
    def for_rate(cls, rate: float, *, seed: int = 0, segments: int = 50,
                 segment_time: float = 200.0, steps_per_time: float = 100.0,
                 n_realizations: int = 1) -> StochasticRunConfig:
        """Config resolving a relaxation ``rate``: segments of ``segment_time/rate``."""
        dt = 1.0 / (steps_per_time * rate)
        seg = segment_time / rate
        return cls(seed, dt, seg * (segments + 1) / 2, n_realizations, 10.0 / rate, segments)

    def check_resolution(self, fastest: float, slowest: float):
        """Enforce ``dt <= 0.1/fastest`` and ``duration >= 100/slowest``."""
        if self.dt > 0.1 / fastest:
            raise ValueError(f"dt={self.dt:g} exceeds 0.1/{fastest:g}")
        if self.duration < 100.0 / slowest:
            raise ValueError(f"duration={self.duration:g} below 100/{slowest:g}")


@dataclass(frozen=True)
class PsdEstimate:
    omega: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    method: str
    n_segments: int = 0


def ou_step_moments(x0, rate: float, power: float, dt: float):
    """Conditional mean and variance of ``dx = -rate x dt + dW`` after ``dt``.

    ``power`` is the white-noise strength, ``<dW(t) dW(t')> = power delta(t - t')``.
    """
    decay = math.exp(-rate * dt)
    var = -power * math.expm1(-2 * rate * dt) / (2 * rate)
    return np.asarray(x0) * decay, var


def _child_rngs(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def simulate_ou(rate: float, power: float, dt: float, n_steps: int, rng,
                stationary_start: bool = True) -> np.ndarray:
    """Exact discretization of a stationary Ornstein-Uhlenbeck path."""
    decay, var = ou_step_moments(1.0, rate, power, dt)
    noise = rng.standard_normal(n_steps) * math.sqrt(var)
    x0 = rng.standard_normal() * math.sqrt(power / (2 * rate)) if stationary_start else 0.0
    path, _ = lfilter([1.0], [1.0, -decay], noise, zi=[decay * x0])
    return path


def _welch_correlation(window, step):
    """Correlation of periodograms of white noise for segments ``step`` apart."""
    w = np.asarray(window)
    c = np.sum(w[step:] * w[:-step]) if step < w.size else 0.0
    return (c / np.sum(w * w)) ** 2


def averaged_periodogram(paths, dt: float, nperseg: int, omega_max: float | None = None):
    """Two-sided PSD in angular frequency from half-overlapping Hann segments.

    Returns ``(omega, psd, stderr, n_segments)``; the standard error accounts
    for the correlation between overlapping segments.
    """
    fs = 1.0 / dt
    per_seg = []
    for x in paths:
        f, _, sxx = spectrogram(x, fs=fs, window="hann", nperseg=nperseg,
                                noverlap=nperseg // 2, detrend=False, scaling="density",
                                mode="psd")
        per_seg.append(sxx)
    sxx = np.concatenate(per_seg, axis=1)
    # One-sided density -> two-sided; DC (and Nyquist) bins are not doubled.
    factor = np.full(f.shape, 0.5)
    factor[0] = 1.0
    if nperseg % 2 == 0:
        factor[-1] = 1.0
    sxx = sxx * factor[:, None]
    omega = 2 * np.pi * f
    keep = np.ones_like(omega, dtype=bool) if omega_max is None else omega <= omega_max
    k = sxx.shape[1]
    psd = sxx.mean(axis=1)
    rho = _welch_correlation(get_window("hann", nperseg), nperseg // 2)
    spread = sxx.std(axis=1, ddof=1) if k > 1 else np.abs(psd)
    stderr = spread / math.sqrt(k) * math.sqrt(1 + 2 * rho)
    return omega[keep], psd[keep], stderr[keep], k


def simulate_intensity_fluctuations(system: LaserSystem, point: OperatingPoint,
                                    config: StochasticRunConfig,
                                    omega_max: float | None = None) -> PsdEstimate:
    """Sample the linearized photon-number fluctuation and estimate its PSD.

    The fluctuation relaxes at ``D`` and is driven by white noise of
    strength ``2 n D1``; the exact conditional-Gaussian update is used, so
    the only discretization effect is aliasing, which is kept out of the
    reported band (``omega <= min(omega_max, 0.1 pi/dt)``, default
    ``omega_max = 50 D``).
    """
    nc = noise_coefficients(system, point, synchronized=False)
    if point.n_tilde <= 0 or nc.D <= 0:
        raise NotApplicable("intensity fluctuations need a stable lasing point (D > 0)")
    power = 2 * point.n_tilde * nc.D1
    if power < 0:
        raise NonclassicalNoise(f"source power 2 n D1 = {power:.3g} < 0 cannot be sampled "
                                "classically; use the closed-form spectrum")
    n_total = int(round(config.duration / config.dt))
    nperseg = int(2 * n_total // (config.segments + 1))
    if nperseg * config.dt < 20.0 / nc.D:
        raise ValueError("segments shorter than 20/D; increase duration")
    burn = int(round(config.burn_in / config.dt))
    paths = []
    for rng in _child_rngs(config.seed, config.n_realizations):
        x = simulate_ou(nc.D, power, config.dt, burn + n_total, rng) if power > 0 \
            else np.zeros(burn + n_total)
        paths.append(x[burn:])
    w_cap = 0.1 * math.pi / config.dt
    w_max = min(50.0 * nc.D if omega_max is None else omega_max, w_cap)
    omega, psd, se, k = averaged_periodogram(paths, config.dt, nperseg, w_max)
    return PsdEstimate(omega, psd, se, "averaged periodogram, Hann, 50% overlap", k)


@dataclass(frozen=True)
class PhaseDiffusionEstimate:
    slope: float
    slope_stderr: float
    curvature: float
    curvature_stderr: float
    rate: float
    lags: np.ndarray
    msd: np.ndarray


def simulate_phase_diffusion(system: LaserSystem, point: OperatingPoint,
                             config: StochasticRunConfig, n_lags: int = 25) -> PhaseDiffusionEstimate:
    """Monte Carlo of the free-running phase random walk.

    Each realization's mean squared phase displacement (averaged over time
    origins) is fitted through the origin; the reported slope is the mean of
    the per-realization slopes and its standard error their spread over
    ``sqrt(n_realizations)``.  A quadratic term is fitted alongside as a
    linearity check.
    """
    if point.n_tilde <= 0:
        raise ZeroIntensity("phase diffusion diverges at n = 0")
    rate = phase_diffusion_rate(system, point)
    n_steps = int(round(config.duration / config.dt))
    max_lag = max(n_steps // 10, 2)
    lags = np.unique(np.geomspace(1, max_lag, n_lags).astype(int))
    t = lags * config.dt
    design = np.column_stack([t, t * t])
    slopes, curvs, msds = [], [], []
    for rng in _child_rngs(config.seed, config.n_realizations):
        phi = np.concatenate([[0.0], np.cumsum(rng.standard_normal(n_steps))])
        phi *= math.sqrt(rate * config.dt)
        msd = np.array([np.mean((phi[k:] - phi[:-k]) ** 2) for k in lags])
        slopes.append(t @ msd / (t @ t))
        curvs.append(np.linalg.lstsq(design, msd, rcond=None)[0][1])
        msds.append(msd)
    n = config.n_realizations
    slopes, curvs = np.array(slopes), np.array(curvs)
    sd = slopes.std(ddof=1) / math.sqrt(n) if n > 1 else float("inf")
    cd = curvs.std(ddof=1) / math.sqrt(n) if n > 1 else float("inf")
    return PhaseDiffusionEstimate(float(slopes.mean()), float(sd), float(curvs.mean()),
                                  float(cd), rate, t, np.mean(msds, axis=0))
