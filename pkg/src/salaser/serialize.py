"""JSON / CSV encoding of result records and loading of parameter files."""
from __future__ import annotations

import configparser
import csv
import dataclasses
import hashlib
import io
import json
import math
import types
import typing
from pathlib import Path

import numpy as np

from .model import ActiveMedium, CavityField, Injection, LaserSystem, PassiveMedium, design_system


class ConfigError(ValueError):
    """Malformed or incomplete configuration file."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


# --------------------------------------------------------------------------- records


def to_record(obj):
    """Recursively convert dataclasses, complex numbers and arrays to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_record(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_record(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_record(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_record(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _decode(hint, value):
    if value is None:
        return None
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        return _decode(args[0], value) if len(args) == 1 else value
    if hint is complex:
        return complex(value["re"], value["im"]) if isinstance(value, dict) else complex(value)
    if hint is float:
        return float(value)
    if hint is np.ndarray:
        return np.asarray(value, dtype=float)
    if origin is tuple:
        args = typing.get_args(hint)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(args[0], v) for v in value)
        return tuple(_decode(a, v) for a, v in zip(args, value))
    if dataclasses.is_dataclass(hint):
        return from_record(hint, value)
    return value


def from_record(cls, data: dict):
    """Inverse of :func:`to_record` for the dataclass ``cls``."""
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in data:
            kwargs[f.name] = _decode(hints[f.name], data[f.name])
    return cls(**kwargs)


def dumps(obj, **kw) -> str:
    return json.dumps(to_record(obj), sort_keys=True, **kw)


# --------------------------------------------------------------------------- CSV


def format_value(v) -> str:
    """Shortest round-trip text for numbers; empty for None."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{float(v.real)!r}{float(v.imag):+}j"
    return str(v)


def write_csv(rows: list[dict], header: dict | None = None) -> str:
    """CSV text with ``# key=value`` comment lines followed by the table body."""
    buf = io.StringIO()
    for k, v in (header or {}).items():
        buf.write(f"# {k}={format_value(v)}\n")
    if rows:
        columns = list(rows[0])
        for r in rows[1:]:
            columns += [c for c in r if c not in columns]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def csv_body(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


# --------------------------------------------------------------------------- config files


SECTIONS = {
    "active": ("gamma1", "gamma2", "coupling", "pump_rate", "pump_statistic"),
    "passive": ("gamma1", "gamma2", "coupling", "pump_rate"),
    "cavity": ("kappa",),
    "injection": ("n_in", "phi_in"),
    "design": ("kappa", "beta", "beta_p", "n_tilde", "loss_Ap", "pump_statistic", "mu",
               "phi_in", "fast", "slow"),
}
OPTIONAL = {("active", "pump_statistic"), ("injection", "phi_in")}


def read_config(path) -> dict:
    """Load a sectioned key-value (INI) or JSON parameter file into nested dicts."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("top level of a JSON config must be an object")
        return {str(k): dict(v) for k, v in data.items()}
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"invalid config syntax: {exc}") from exc
    return {s: dict(parser[s]) for s in parser.sections()}


def _number(section, key, raw):
    try:
        x = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key}: expected a number, got {raw!r}",
                          f"{section}.{key}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{section}.{key}: must be finite", f"{section}.{key}")
    return x


def _section(cfg, name, required=True):
    raw = cfg.get(name)
    if raw is None:
        if required:
            raise ConfigError(f"missing section [{name}]", name)
        return None
    allowed = SECTIONS[name]
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}", name)
    out = {}
    for key in allowed:
        if key in raw:
            out[key] = _number(name, key, raw[key])
        elif required and (name, key) not in OPTIONAL and name != "design":
            raise ConfigError(f"missing {name}.{key}", f"{name}.{key}")
    return out


def system_from_config(cfg: dict) -> LaserSystem:
    """Build a :class:`LaserSystem` from a parsed config.

    Either explicit ``[active]``, ``[passive]``, ``[cavity]`` (optional
    ``[injection]``) sections, or a single ``[design]`` section (see
    :func:`salaser.model.design_system`).
    """
    from .errors import ParameterError

    try:
        if "design" in cfg:
            d = _section(cfg, "design")
            for key in ("beta", "beta_p", "n_tilde"):
                if key not in d:
                    raise ConfigError(f"missing design.{key}", f"design.{key}")
            return design_system(**d)
        a = _section(cfg, "active")
        p = _section(cfg, "passive")
        c = _section(cfg, "cavity")
        inj = _section(cfg, "injection", required=False)
        injection = Injection(**inj) if inj and inj.get("n_in", 0) > 0 else None
        return LaserSystem(ActiveMedium(**a), PassiveMedium(**p),
                           CavityField(c["kappa"], injection))
    except ParameterError as exc:
        field = str(exc).split(" ", 1)[0]
        raise ConfigError(str(exc), field) from exc
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def system_header(system: LaserSystem) -> dict:
    a, p, c = system.active, system.passive, system.cavity
    out = {f"active.{k}": getattr(a, k) for k in SECTIONS["active"]}
    out.update({f"passive.{k}": getattr(p, k) for k in SECTIONS["passive"]})
    out["cavity.kappa"] = c.kappa
    if c.injection is not None:
        out["injection.n_in"] = c.injection.n_in
        out["injection.phi_in"] = c.injection.phi_in
    return out
