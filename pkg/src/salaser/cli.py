"""Command-line front end.

Subcommands: steady | stability | spectrum | phase | dynamics | sweep | validate.

Parameter files are INI-style (sections ``active``, ``passive``, ``cavity``,
``injection`` or a single ``design``; optional ``spectrum``, ``stochastic``,
``dynamics``, ``sweep``) or the same structure as JSON (``.json``).  All
frequencies are angular (rad per unit time), never Hz.

Exit codes: 0 ok, 2 configuration error, 3 numerical error, 4 validation
failure.  Errors are also written to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (StochasticRunConfig, TrajectoryState, integrate_adiabatic,
                       integrate_full_system, simulate_intensity_fluctuations,
                       simulate_phase_diffusion)
from .errors import LaserModelError, NumericalError, ParameterError
from .model import LaserSystem, derive_constants, make_point
from .noise_spectra import (fano_spectrum, homodyne_spectrum, noise_coefficients,
                            phase_diffusion_rate)
from .serialize import (ConfigError, config_hash, read_config, system_from_config,
                        system_header, to_record, write_csv)
from .stability import agreement_map, classify
from .steady_state import point_residual, solve

CONFIG_DIR_ENV = "SALASER_CONFIG_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4


# --------------------------------------------------------------------------- helpers


def resolve_config(path: str) -> Path:
    p = Path(path)
    if not p.is_absolute() and not p.exists() and os.environ.get(CONFIG_DIR_ENV):
        candidate = Path(os.environ[CONFIG_DIR_ENV]) / p
        if candidate.exists():
            return candidate
    return p


def _float(cfg, section, key, default):
    raw = cfg.get(section, {}).get(key, default)
    try:
        x = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key}: expected a number, got {raw!r}",
                          f"{section}.{key}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{section}.{key}: must be finite", f"{section}.{key}")
    return x


def _int(cfg, section, key, default):
    x = _float(cfg, section, key, default)
    if x != int(x):
        raise ConfigError(f"{section}.{key}: expected an integer", f"{section}.{key}")
    return int(x)


def grid(lo: float, hi: float, count: int, spacing: str = "linear") -> np.ndarray:
    if count < 2:
        raise ConfigError("grid count must be >= 2")
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    if spacing == "log":
        if lo <= 0:
            raise ConfigError("log spacing requires min > 0")
        return np.geomspace(lo, hi, count)
    raise ConfigError(f"unknown spacing {spacing!r}")


def omega_grid(cfg) -> np.ndarray:
    sec = "spectrum"
    return grid(_float(cfg, sec, "omega_min", 0.0), _float(cfg, sec, "omega_max", 10.0),
                _int(cfg, sec, "count", 101), cfg.get(sec, {}).get("spacing", "linear"))


def stochastic_config(cfg, rate: float, seed: int | None) -> StochasticRunConfig:
    sec = cfg.get("stochastic", {})
    base = StochasticRunConfig.for_rate(rate, seed=0)
    return StochasticRunConfig(
        seed=int(seed if seed is not None else _int(cfg, "stochastic", "seed", 0)),
        dt=_float(cfg, "stochastic", "dt", base.dt),
        duration=_float(cfg, "stochastic", "duration", base.duration),
        n_realizations=_int(cfg, "stochastic", "n_realizations", 1 if "n_realizations"
                            not in sec else sec["n_realizations"]),
        burn_in=_float(cfg, "stochastic", "burn_in", base.burn_in),
        segments=_int(cfg, "stochastic", "segments", 50),
    )


class Context:
    def __init__(self, args):
        self.args = args
        path = resolve_config(args.config)
        self.cfg = read_config(path)
        system = system_from_config(self.cfg)
        self.system: LaserSystem = system.normalized() if args.normalize else system
        self.seed = args.seed

    def header(self, **extra) -> dict:
        h = {"salaser_version": __version__, "config_sha256": config_hash(self.cfg),
             "command": self.args.command, "normalized": bool(self.args.normalize)}
        if self.seed is not None:
            h["seed"] = self.seed
        h.update(system_header(self.system))
        h.update(extra)
        return h

    def emit(self, rows: list[dict], **extra):
        header = self.header(**extra)
        if self.args.format == "json":
            text = json.dumps(to_record({"meta": header, "rows": rows}), sort_keys=True,
                              indent=1) + "\n"
        else:
            text = write_csv([to_record(r) for r in rows], header)
        if self.args.output:
            Path(self.args.output).write_text(text)
        else:
            sys.stdout.write(text)


def point_row(system, point) -> dict:
    rep = classify(system, point)
    return {
        "branch": point.branch, "n_tilde": point.n_tilde, "I": point.I, "I_p": point.I_p,
        "mu": point.mu, "phase": point.phase, "residual": point_residual(system, point),
        "decay_rate_D": rep.decay_rate_D, "numerically_stable": rep.numerically_stable,
        "criterion_satisfied": rep.criterion_satisfied, "criterion_rhs": rep.criterion_rhs,
        "agreement": rep.agreement,
    }


def _select(branches, name):
    if name == "auto":
        lasing = [p for p in branches.points if p.n_tilde > 0 and p.branch != "trivial"]
        if not lasing:
            raise ConfigError("no lasing point to analyse")
        return lasing[-1]
    try:
        return branches.branch(name)
    except KeyError:
        raise ConfigError(f"no {name!r} branch for these parameters", "branch") from None


# --------------------------------------------------------------------------- commands


def cmd_steady(ctx: Context) -> int:
    b = solve(ctx.system)
    ctx.emit([point_row(ctx.system, p) for p in b.points], multiplicity=b.multiplicity,
             bistable=b.bistable)
    return EXIT_OK


def cmd_stability(ctx: Context) -> int:
    rows = []
    for p in solve(ctx.system).points:
        rep = classify(ctx.system, p)
        lam_amp, lam_phase = rep.jacobian_eigenvalues
        rows.append({
            "branch": p.branch, "n_tilde": p.n_tilde, "I": p.I, "I_p": p.I_p,
            "criterion_satisfied": rep.criterion_satisfied, "criterion_rhs": rep.criterion_rhs,
            "eig_amplitude_re": lam_amp.real, "eig_amplitude_im": lam_amp.imag,
            "eig_phase_re": lam_phase.real, "eig_phase_im": lam_phase.imag,
            "numerically_stable": rep.numerically_stable, "marginal": rep.marginal,
            "decay_rate_D": rep.decay_rate_D, "agreement": rep.agreement, "note": rep.note,
        })
    ctx.emit(rows)
    return EXIT_OK


def cmd_spectrum(ctx: Context) -> int:
    args = ctx.args
    point = _select(solve(ctx.system), args.branch)
    omega = omega_grid(ctx.cfg)
    regime = ctx.cfg.get("spectrum", {}).get("regime", "general")
    if args.kind == "fano":
        series = fano_spectrum(ctx.system, point, omega, regime=regime)
    else:
        series = homodyne_spectrum(ctx.system, point, args.quadrature, omega, regime=regime)
    rows = [{"omega": w, "value": v, "flags": f}
            for w, v, f in zip(series.omega, series.values, series.flags)]
    meta = {f"meta.{k}": v for k, v in series.metadata.items()}
    ctx.emit(rows, observable=series.observable, normalization=series.normalization, **meta)
    if args.gnuplot:
        lines = [f"# omega value  ({series.observable}, angular frequency)"]
        lines += [f"{w!r} {v!r}" for w, v in zip(series.omega.tolist(), series.values.tolist())]
        Path(args.gnuplot).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_phase(ctx: Context) -> int:
    rows = []
    for p in solve(ctx.system).points:
        if p.n_tilde <= 0 or p.locked:
            continue
        row = {"branch": p.branch, "n_tilde": p.n_tilde,
               "phase_diffusion_rate": phase_diffusion_rate(ctx.system, p)}
        if ctx.args.monte_carlo:
            rate = row["phase_diffusion_rate"]
            cfg = stochastic_config(ctx.cfg, rate, ctx.seed)
            if "stochastic" not in ctx.cfg:
                cfg = StochasticRunConfig(cfg.seed, 1.0 / rate / 100, 100.0 / rate, 200)
            est = simulate_phase_diffusion(ctx.system, p, cfg)
            row.update(mc_slope=est.slope, mc_slope_stderr=est.slope_stderr,
                       mc_curvature=est.curvature, mc_curvature_stderr=est.curvature_stderr)
        rows.append(row)
    ctx.emit(rows)
    return EXIT_OK


def cmd_dynamics(ctx: Context) -> int:
    system, cfg = ctx.system, ctx.cfg
    sec = cfg.get("dynamics", {})
    t_end = _float(cfg, "dynamics", "t_end", 50.0 / system.kappa)
    n_samples = _int(cfg, "dynamics", "n_samples", 201)
    start = sec.get("initial", "perturbed")
    b = solve(system)
    if start == "threshold":
        trivial = b.points[0]
        a0 = complex(1e-3 * math.sqrt(max(b.points[-1].n_tilde, 1.0)))
        init = TrajectoryState.from_point(system, trivial, field=a0)
    elif start == "perturbed":
        p = _select(b, "auto")
        a0 = p.amplitude * math.sqrt(1 + _float(cfg, "dynamics", "perturbation", 0.1))
        init = TrajectoryState.from_point(system, p, field=a0)
    else:
        raise ConfigError(f"dynamics.initial must be 'perturbed' or 'threshold', got {start!r}",
                          "dynamics.initial")
    full = integrate_full_system(system, init, t_end, n_samples=n_samples,
                                 method=sec.get("method", "auto"))
    adiabatic = integrate_adiabatic(system, init.field, t_end, n_samples=n_samples)
    rows = []
    for st, (_, a) in zip(full, adiabatic):
        rows.append({"time": st.time, "re_a": st.field.real, "im_a": st.field.imag,
                     "photons": st.photons, "sigma1": st.active[1], "sigma2": st.active[2],
                     "pi1": st.passive[1], "pi2": st.passive[2],
                     "adiabatic_photons": abs(a) ** 2})
    ctx.emit(rows, t_end=t_end)
    return EXIT_OK


# sweep ----------------------------------------------------------------------


def apply_parameter(system: LaserSystem, path: str, value: float) -> LaserSystem:
    """Copy of ``system`` with one parameter replaced.

    ``path`` is ``section.field`` (``active``, ``passive``, ``cavity``,
    ``injection``) or the derived ``cooperativity`` (A_p/kappa, set through
    the absorber pump rate).
    """
    if path == "cooperativity":
        from .stability import with_cooperativity

        return with_cooperativity(system, value)
    section, _, name = path.partition(".")
    try:
        if section in ("active", "passive"):
            medium = getattr(system, section)
            if not hasattr(medium, name):
                raise AttributeError(name)
            return replace(system, **{section: replace(medium, **{name: value})})
        if section == "cavity" and name == "kappa":
            return replace(system, cavity=replace(system.cavity, kappa=value))
        if section == "injection" and name in ("n_in", "phi_in"):
            n_in = value if name == "n_in" else system.cavity.n_in
            phi = value if name == "phi_in" else system.cavity.phi_in
            return system.with_injection(n_in, phi)
    except AttributeError:
        pass
    raise ConfigError(f"unknown sweep parameter {path!r}", "sweep.parameter")


def sweep_values(cfg: dict) -> tuple[str, np.ndarray]:
    sec = cfg.get("sweep")
    if not sec or "parameter" not in sec:
        raise ConfigError("missing [sweep] parameter", "sweep.parameter")
    if "values" in sec:
        raw = sec["values"]
        items = raw if isinstance(raw, list) else [v for v in str(raw).split(",") if v.strip()]
        try:
            values = np.array([float(v) for v in items])
        except ValueError:
            raise ConfigError("sweep.values must be numbers", "sweep.values") from None
    else:
        values = grid(_float(cfg, "sweep", "min", float("nan")),
                      _float(cfg, "sweep", "max", float("nan")),
                      _int(cfg, "sweep", "count", 0), sec.get("spacing", "linear"))
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ConfigError("sweep grid must be non-empty and finite", "sweep.values")
    return sec["parameter"], values


def sweep_point(system: LaserSystem, path: str, value: float) -> list[dict]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sys_v = apply_parameter(system, path, value)
        rows = []
        for p in solve(sys_v).points:
            row = {"parameter": path, "value": value, **point_row(sys_v, p)}
            if p.n_tilde > 0:
                nc = noise_coefficients(sys_v, p)
                row["D1"] = nc.D1
                if p.locked:
                    row["homodyne_x_0"] = float(homodyne_spectrum(sys_v, p, "x", [0.0]).values[0])
                else:
                    row["fano_0"] = float(fano_spectrum(sys_v, p, [0.0]).values[0])
            rows.append(row)
    return rows


def run_sweep(system: LaserSystem, path: str, values, jobs: int = 1) -> list[dict]:
    values = [float(v) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(sweep_point, [system] * len(values), [path] * len(values),
                                   values))
    else:
        chunks = [sweep_point(system, path, v) for v in values]
    return [row for chunk in chunks for row in chunk]


def cmd_sweep(ctx: Context) -> int:
    path, values = sweep_values(ctx.cfg)
    apply_parameter(ctx.system, path, float(values[0]))
    rows = run_sweep(ctx.system, path, values, ctx.args.jobs)
    extra = {}
    c = derive_constants(ctx.system)
    if path == "cooperativity" and c.beta_p > c.beta:
        from .stability import DISCREPANCY_NOTE

        extra["note"] = DISCREPANCY_NOTE
    ctx.emit(rows, **extra)
    return EXIT_OK


# validate -------------------------------------------------------------------


def cmd_validate(ctx: Context) -> int:
    from .validation import run_validation

    checks = run_validation(ctx.system, seed=0 if ctx.seed is None else ctx.seed)
    ctx.emit([c.as_row() for c in checks])
    return EXIT_VALIDATION if any(c.status == "fail" for c in checks) else EXIT_OK


COMMANDS = {
    "steady": cmd_steady,
    "stability": cmd_stability,
    "spectrum": cmd_spectrum,
    "phase": cmd_phase,
    "dynamics": cmd_dynamics,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="parameter file (.ini/.cfg or .json)")
    common.add_argument("--output", help="write results here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--normalize", action="store_true",
                        help="rescale time so that kappa = 1")

    parser = argparse.ArgumentParser(prog="salaser", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady", parents=[common], help="stationary points")
    sub.add_parser("stability", parents=[common], help="stability reports")
    sp = sub.add_parser("spectrum", parents=[common], help="photocurrent noise spectra")
    sp.add_argument("kind", choices=("fano", "homodyne"))
    sp.add_argument("--quadrature", choices=("x", "y"), default="x")
    sp.add_argument("--branch", default="auto", choices=("auto", "trivial", "lower", "upper"))
    sp.add_argument("--gnuplot", metavar="PATH", help="also write a two-column data file")
    ph = sub.add_parser("phase", parents=[common], help="phase diffusion")
    ph.add_argument("--monte-carlo", action="store_true")
    sub.add_parser("dynamics", parents=[common], help="time integration")
    sub.add_parser("sweep", parents=[common], help="parameter sweep")
    sub.add_parser("validate", parents=[common], help="cross-check suite")
    return parser


def _fail(code, exc, field=None):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if field:
        payload["field"] = field
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        return _fail(EXIT_CONFIG, ConfigError("--jobs must be >= 1"), "jobs")
    try:
        ctx = Context(args)
        return COMMANDS[args.command](ctx)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc, exc.field)
    except ParameterError as exc:
        return _fail(EXIT_CONFIG, exc, str(exc).split(" ", 1)[0])
    except (NumericalError, LaserModelError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERIC, exc)


if __name__ == "__main__":
    sys.exit(main())
