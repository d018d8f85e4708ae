"""Scenario config files (JSON) and tabular output (CSV / JSON)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ModelInvalid
from .evolution import Kernel, PropagatorOptions, TimeSeries
from .ladder import LadderModel

KNOWN_FIELDS = {"n", "energies", "E0", "omegas", "phis", "couplings", "initial_level",
                "time", "kernel", "normalize_initial", "output"}


class ConfigError(ValueError):
    """Invalid scenario file; the message names the line or the field."""


def _real(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{name}': expected a number, got {json.dumps(value)}")
    if not math.isfinite(value):
        raise ConfigError(f"field '{name}': must be finite")
    return float(value)


def _reals(value, name):
    if not isinstance(value, list):
        raise ConfigError(f"field '{name}': expected a list of numbers")
    return tuple(_real(v, f"{name}[{i}]") for i, v in enumerate(value))


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{name}': expected an integer, got {json.dumps(value)}")
    return value


def _bool(value, name):
    if not isinstance(value, bool):
        raise ConfigError(f"field '{name}': expected true or false")
    return value


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    steps: int

    def points(self) -> np.ndarray:
        """``steps`` evenly spaced points from start to stop inclusive."""
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str | None = None
    include_propagator: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    couplings: tuple[float, ...]
    time: TimeGrid
    energies: tuple[float, ...] | None = None
    E0: float | None = None
    omegas: tuple[float, ...] | None = None
    phis: tuple[float, ...] | None = None
    initial_level: int = 0
    kernel: str = "auto"
    normalize_initial: bool = False
    output: OutputSpec = OutputSpec()

    def level_energies(self) -> tuple[float, ...]:
        if self.energies is not None:
            return self.energies
        e0 = 0.0 if self.E0 is None else self.E0
        return tuple((e0 + np.concatenate(([0.0], np.cumsum(self.omegas)))).tolist())

    def drive_frequencies(self) -> tuple[float, ...]:
        if self.omegas is not None:
            return self.omegas
        return tuple(np.diff(self.energies).tolist())

    def model(self) -> LadderModel:
        phis = self.phis if self.phis is not None else (0.0,) * (self.n - 1)
        try:
            return LadderModel(self.level_energies(), self.drive_frequencies(), phis, self.couplings)
        except ModelInvalid as exc:
            raise ConfigError(str(exc)) from exc

    def options(self) -> PropagatorOptions:
        return PropagatorOptions(Kernel.parse(self.kernel), self.normalize_initial)

    def to_dict(self) -> dict:
        out = {"n": self.n}
        if self.energies is not None:
            out["energies"] = list(self.energies)
        if self.E0 is not None:
            out["E0"] = self.E0
        if self.omegas is not None:
            out["omegas"] = list(self.omegas)
        if self.phis is not None:
            out["phis"] = list(self.phis)
        out["couplings"] = list(self.couplings)
        out["initial_level"] = self.initial_level
        out["time"] = {"start": self.time.start, "stop": self.time.stop, "steps": self.time.steps}
        out["kernel"] = self.kernel
        out["normalize_initial"] = self.normalize_initial
        out["output"] = {"format": self.output.format, "path": self.output.path,
                         "include_propagator": self.output.include_propagator}
        return out

    def with_overrides(self, kernel=None, normalize_initial=None, out_path=None) -> "ScenarioConfig":
        cfg = self
        if kernel is not None:
            cfg = replace(cfg, kernel=Kernel.parse(kernel).value)
        if normalize_initial:
            cfg = replace(cfg, normalize_initial=True)
        if out_path is not None:
            cfg = replace(cfg, output=replace(cfg.output, path=out_path))
        return cfg


def parse_config(data: dict) -> ScenarioConfig:
    """Validate a decoded config mapping."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(data) - KNOWN_FIELDS)
    if unknown:
        raise ConfigError(f"field '{unknown[0]}': unknown field")
    for required in ("n", "couplings", "time"):
        if required not in data:
            raise ConfigError(f"field '{required}': missing")

    n = _int(data["n"], "n")
    if n < 2:
        raise ConfigError("field 'n': need at least 2 levels")
    couplings = _reals(data["couplings"], "couplings")
    if len(couplings) != n - 1:
        raise ConfigError(f"field 'couplings': expected {n - 1} values for n={n}, got {len(couplings)}")
    if any(g < 0 for g in couplings):
        raise ConfigError("field 'couplings': values must be >= 0")

    energies = _reals(data["energies"], "energies") if "energies" in data else None
    omegas = _reals(data["omegas"], "omegas") if "omegas" in data else None
    E0 = _real(data["E0"], "E0") if "E0" in data else None
    if energies is None and omegas is None:
        raise ConfigError("field 'energies': give either 'energies' or 'omegas' (with optional 'E0')")
    if energies is not None and E0 is not None:
        raise ConfigError("field 'E0': not allowed together with 'energies'")
    if energies is not None and len(energies) != n:
        raise ConfigError(f"field 'energies': expected {n} values, got {len(energies)}")
    if omegas is not None and len(omegas) != n - 1:
        raise ConfigError(f"field 'omegas': expected {n - 1} values, got {len(omegas)}")

    phis = _reals(data["phis"], "phis") if "phis" in data else None
    if phis is not None and len(phis) != n - 1:
        raise ConfigError(f"field 'phis': expected {n - 1} values, got {len(phis)}")

    initial = _int(data.get("initial_level", 0), "initial_level")
    if not 0 <= initial < n:
        raise ConfigError(f"field 'initial_level': must lie in 0..{n - 1}")

    tdata = data["time"]
    if not isinstance(tdata, dict):
        raise ConfigError("field 'time': expected an object with start, stop, steps")
    for key in tdata:
        if key not in ("start", "stop", "steps"):
            raise ConfigError(f"field 'time.{key}': unknown field")
    for key in ("start", "stop", "steps"):
        if key not in tdata:
            raise ConfigError(f"field 'time.{key}': missing")
    grid = TimeGrid(_real(tdata["start"], "time.start"), _real(tdata["stop"], "time.stop"),
                    _int(tdata["steps"], "time.steps"))
    if grid.steps < 1:
        raise ConfigError("field 'time.steps': must be >= 1")
    if grid.start < 0 or grid.stop < grid.start:
        raise ConfigError("field 'time': need stop >= start >= 0")
    if grid.steps == 1 and grid.stop != grid.start:
        raise ConfigError("field 'time.steps': a single point needs start == stop")

    kernel = data.get("kernel", "auto")
    try:
        kernel = Kernel.parse(kernel).value
    except ValueError as exc:
        raise ConfigError(f"field 'kernel': {exc}") from None
    normalize = _bool(data.get("normalize_initial", False), "normalize_initial")

    odata = data.get("output", {})
    if not isinstance(odata, dict):
        raise ConfigError("field 'output': expected an object")
    for key in odata:
        if key not in ("format", "path", "include_propagator"):
            raise ConfigError(f"field 'output.{key}': unknown field")
    fmt = odata.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("field 'output.format': must be 'csv' or 'json'")
    path = odata.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("field 'output.path': expected a string")
    output = OutputSpec(fmt, path, _bool(odata.get("include_propagator", False),
                                         "output.include_propagator"))

    return ScenarioConfig(n=n, couplings=couplings, time=grid, energies=energies, E0=E0,
                          omegas=omegas, phis=phis, initial_level=initial, kernel=kernel,
                          normalize_initial=normalize, output=output)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


# --- output -----------------------------------------------------------------


def _num(x) -> str:
    return format(float(x), ".17g")


def csv_header(n: int, include_propagator: bool) -> list[str]:
    cols = ["t"] + [f"p{k}" for k in range(n)]
    if include_propagator:
        for j in range(n):
            for k in range(n):
                cols += [f"reU{j}{k}", f"imU{j}{k}"]
    return cols


def render_csv(ts: TimeSeries, include_propagator: bool = False) -> str:
    n = ts.populations.shape[1]
    lines = [",".join(csv_header(n, include_propagator))]
    for i, t in enumerate(ts.times):
        row = [_num(t)] + [_num(p) for p in ts.populations[i]]
        if include_propagator:
            for z in ts.propagators[i].ravel():
                row += [_num(z.real), _num(z.imag)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def render_json(ts: TimeSeries, config: ScenarioConfig, include_propagator: bool = False) -> str:
    rows = []
    for i, t in enumerate(ts.times):
        row = {"t": float(t), "populations": [float(p) for p in ts.populations[i]]}
        if include_propagator:
            row["propagator"] = [[float(z.real), float(z.imag)] for z in ts.propagators[i].ravel()]
        rows.append(row)
    doc = {"meta": {"n": int(ts.populations.shape[1]), "kernel": ts.kernel.value,
                    "config": config.to_dict()},
           "rows": rows}
    return json.dumps(doc, indent=1) + "\n"
