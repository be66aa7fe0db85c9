"""Run configuration: a sectioned ``key = value`` text format.

Grammar (UTF-8, ``#`` or ``;`` comments, section and key names are case
sensitive, unknown sections or keys are errors)::

    [task]        name, detuning (bare|sideband), steady (ideal|self-consistent), output
    [params]      any SystemParams field, e.g. kappa = 0.1
    [perturbation] delta_omega, delta_gamma, delta_chi_1, delta_chi_2
    [sweep]       parameter, start, stop, count, scale (linear|log)
    [grid]        centre (number or "auto"), half_width, points
    [sensing]     scheme (splitting|shifting), chi_values (comma list)
    [validate]    kappas (comma list), at_ep (true|false)
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigError
from .params import Perturbation, SystemParams

TASKS = ("derive", "steady", "eigen-sweep", "ep", "sens-sweep", "spectra", "validate")
PARAM_FIELDS = tuple(f.name for f in fields(SystemParams) if f.name != "perturbation")
PERTURBATION_FIELDS = tuple(f.name for f in fields(Perturbation))
# "chi" sets both parametric drives at once
SWEEPABLE = PARAM_FIELDS + PERTURBATION_FIELDS + ("chi",)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class GridSpec:
    centre: float | None = None
    half_width: float = 0.1
    points: int = 2001


@dataclass(frozen=True)
class SensingSpec:
    scheme: str = "splitting"
    chi_values: tuple[float, ...] = (0.0,)


@dataclass(frozen=True)
class ValidateSpec:
    kappas: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0)
    at_ep: bool = True


@dataclass(frozen=True)
class RunConfig:
    task: str = "ep"
    params: SystemParams = field(default_factory=SystemParams)
    sweep: SweepSpec | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    sensing: SensingSpec = field(default_factory=SensingSpec)
    validate: ValidateSpec = field(default_factory=ValidateSpec)
    detuning: str = "bare"
    steady: str = "ideal"
    output: str | None = None

    def to_text(self) -> str:
        return dump(self)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def apply_value(params: SystemParams, name: str, value: float) -> SystemParams:
    """Return ``params`` with one sweepable quantity set."""
    if name == "chi":
        return params.with_chi(value)
    if name in PERTURBATION_FIELDS:
        return replace(params, perturbation=replace(params.perturbation, **{name: value}))
    if name in PARAM_FIELDS:
        return replace(params, **{name: value})
    raise ConfigError("sweep.parameter", f"{name!r} is not a sweepable parameter")


def _float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected a number, got {raw!r}") from None


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected an integer, got {raw!r}") from None


def _floats(section: str, key: str, raw: str) -> tuple[float, ...]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{section}.{key}", "expected a comma-separated list of numbers")
    return tuple(_float(section, key, s) for s in items)


def _bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{section}.{key}", f"expected true/false, got {raw!r}")


def _choice(section: str, key: str, raw: str, allowed) -> str:
    if raw not in allowed:
        raise ConfigError(f"{section}.{key}", f"expected one of {list(allowed)}, got {raw!r}")
    return raw


_ALLOWED = {
    "task": {"name", "detuning", "steady", "output"},
    "params": set(PARAM_FIELDS),
    "perturbation": set(PERTURBATION_FIELDS),
    "sweep": {"parameter", "start", "stop", "count", "scale"},
    "grid": {"centre", "half_width", "points"},
    "sensing": {"scheme", "chi_values"},
    "validate": {"kappas", "at_ep"},
}


def parse(text: str, task: str | None = None) -> RunConfig:
    """Parse config text; ``task`` (e.g. from the command line) overrides [task] name."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    for section in cp.sections():
        if section not in _ALLOWED:
            raise ConfigError(section, "unknown section")
        for key in cp[section]:
            if key not in _ALLOWED[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
    sec = {name: dict(cp[name]) if cp.has_section(name) else {} for name in _ALLOWED}

    t = sec["task"]
    name = task or t.get("name", "ep")
    _choice("task", "name", name, TASKS)
    detuning = _choice("task", "detuning", t.get("detuning", "bare"), ("bare", "sideband"))
    steady = _choice("task", "steady", t.get("steady", "ideal"), ("ideal", "self-consistent"))

    pert = Perturbation(**{k: _float("perturbation", k, v) for k, v in sec["perturbation"].items()})
    params = SystemParams(**{k: _float("params", k, v) for k, v in sec["params"].items()}, perturbation=pert)

    sweep = None
    if sec["sweep"]:
        s = sec["sweep"]
        missing = {"parameter", "start", "stop", "count"} - set(s)
        if missing:
            raise ConfigError(f"sweep.{sorted(missing)[0]}", "required key missing")
        sweep = SweepSpec(
            parameter=s["parameter"],
            start=_float("sweep", "start", s["start"]),
            stop=_float("sweep", "stop", s["stop"]),
            count=_int("sweep", "count", s["count"]),
            scale=_choice("sweep", "scale", s.get("scale", "linear"), ("linear", "log")),
        )
        check_sweep(sweep)

    g = sec["grid"]
    centre_raw = g.get("centre", "auto")
    grid = GridSpec(
        centre=None if centre_raw == "auto" else _float("grid", "centre", centre_raw),
        half_width=_float("grid", "half_width", g.get("half_width", "0.1")),
        points=_int("grid", "points", g.get("points", "2001")),
    )
    if grid.points < 2 or not grid.half_width > 0:
        raise ConfigError("grid", "need points >= 2 and half_width > 0")

    sn = sec["sensing"]
    sensing = SensingSpec(
        scheme=_choice("sensing", "scheme", sn.get("scheme", "splitting"), ("splitting", "shifting")),
        chi_values=_floats("sensing", "chi_values", sn["chi_values"]) if "chi_values" in sn else (0.0,),
    )
    v = sec["validate"]
    validate = ValidateSpec(
        kappas=_floats("validate", "kappas", v["kappas"]) if "kappas" in v else ValidateSpec().kappas,
        at_ep=_bool("validate", "at_ep", v["at_ep"]) if "at_ep" in v else True,
    )
    return RunConfig(task=name, params=params, sweep=sweep, grid=grid, sensing=sensing, validate=validate,
                     detuning=detuning, steady=steady, output=t.get("output"))


def check_sweep(sweep: SweepSpec) -> None:
    if sweep.parameter not in SWEEPABLE:
        raise ConfigError("sweep.parameter", f"{sweep.parameter!r} is not a SystemParams/Perturbation field")
    if sweep.count < 2:
        raise ConfigError("sweep.count", "need at least 2 points")
    if sweep.start == sweep.stop:
        raise ConfigError("sweep.stop", "start and stop must differ")
    if sweep.scale == "log" and not sweep.start * sweep.stop > 0:
        raise ConfigError("sweep.scale", "log sweeps need non-zero start and stop of the same sign")


def load(path: str, task: str | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(path, exc.strerror or str(exc)) from None
    return parse(text, task)


def dump(cfg: RunConfig) -> str:
    lines = ["[task]", f"name = {cfg.task}", f"detuning = {cfg.detuning}", f"steady = {cfg.steady}"]
    if cfg.output is not None:
        lines.append(f"output = {cfg.output}")
    lines += ["", "[params]"]
    lines += [f"{k} = {getattr(cfg.params, k)!r}" for k in PARAM_FIELDS]
    lines += ["", "[perturbation]"]
    lines += [f"{k} = {getattr(cfg.params.perturbation, k)!r}" for k in PERTURBATION_FIELDS]
    if cfg.sweep is not None:
        s = cfg.sweep
        lines += ["", "[sweep]", f"parameter = {s.parameter}", f"start = {s.start!r}", f"stop = {s.stop!r}",
                  f"count = {s.count}", f"scale = {s.scale}"]
    g = cfg.grid
    lines += ["", "[grid]", f"centre = {'auto' if g.centre is None else repr(g.centre)}",
              f"half_width = {g.half_width!r}", f"points = {g.points}"]
    lines += ["", "[sensing]", f"scheme = {cfg.sensing.scheme}",
              "chi_values = " + ", ".join(repr(c) for c in cfg.sensing.chi_values)]
    lines += ["", "[validate]", "kappas = " + ", ".join(repr(k) for k in cfg.validate.kappas),
              f"at_ep = {'true' if cfg.validate.at_ep else 'false'}"]
    return "\n".join(lines) + "\n"
