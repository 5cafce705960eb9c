"""JSON run configuration for the command-line tools.

Example::

    {
      "solitons": [{"a": 1.0}, {"a": 2.0, "b": 0.0}],
      "grid": {"x_min": -5, "x_max": 5, "points": 101},
      "time": {"re": 0.5, "im": 0.0},
      "output": {"path": "kernel.csv", "format": "csv"},
      "kernel": {"split": false},
      "evolve": {"packet": {"center": -3, "width": 1, "momentum": 2}, "times": [0.25, 0.5]},
      "verify": {"corrupt": 1.0}
    }

A packet ``{"bound_state": n}`` starts from the n-th bound state instead.
Parities are not configurable: mode 1 is cosh, mode 2 sinh, and so on.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SolitonError
from .propagator import QuadratureRule, TimeParam
from .soliton_core import SolitonParams

FORMATS = ("csv", "json")


class ConfigError(SolitonError, ValueError):
    """Invalid configuration; ``where`` names the offending field or source position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _value(val: Any, where: str, *, positive=False, integer=False):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(where, f"expected a number, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(where, "must be finite")
    if integer and int(val) != val:
        raise ConfigError(where, f"expected an integer, got {val!r}")
    if positive and val <= 0:
        raise ConfigError(where, f"must be > 0, got {val!r}")
    return int(val) if integer else float(val)


def _number(obj: dict, key: str, where: str, default: Any = ..., **kw):
    if key not in obj:
        if default is ...:
            raise ConfigError(f"{where}.{key}", "missing required field")
        return default
    return _value(obj[key], f"{where}.{key}", **kw)


def _section(obj: dict, key: str, where: str, required=False) -> dict | None:
    if key not in obj:
        if required:
            raise ConfigError(f"{where}{key}", "missing required section")
        return None
    sec = obj[key]
    if not isinstance(sec, dict):
        raise ConfigError(f"{where}{key}", f"expected an object, got {type(sec).__name__}")
    return sec


@dataclass(frozen=True)
class SolitonSpec:
    a: float
    b: float = 0.0


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)

    @classmethod
    def parse(cls, obj: dict, where: str) -> "Grid":
        g = cls(_number(obj, "x_min", where), _number(obj, "x_max", where), _number(obj, "points", where, integer=True))
        if g.x_max <= g.x_min:
            raise ConfigError(f"{where}.x_max", "must exceed x_min")
        if g.points < 2:
            raise ConfigError(f"{where}.points", "need at least 2 points")
        return g


@dataclass(frozen=True)
class TimeSpec:
    re: float
    im: float = 0.0

    def param(self) -> TimeParam:
        return TimeParam(complex(self.re, self.im))


@dataclass(frozen=True)
class Output:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class KernelOptions:
    split: bool = False
    y_grid: Grid | None = None


@dataclass(frozen=True)
class Packet:
    """Gaussian initial condition, or bound state ``bound_state`` (1-based) when that is set."""

    center: float = 0.0
    width: float = 1.0
    momentum: float = 0.0
    bound_state: int | None = None


@dataclass(frozen=True)
class EvolveOptions:
    packet: Packet = Packet()
    times: tuple[float, ...] = ()
    quadrature: QuadratureRule = QuadratureRule()


@dataclass(frozen=True)
class VerifyOptions:
    corrupt: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    solitons: tuple[SolitonSpec, ...]
    grid: Grid
    time: TimeSpec | None = None
    output: Output = Output()
    kernel: KernelOptions = KernelOptions()
    evolve: EvolveOptions = EvolveOptions()
    verify: VerifyOptions = VerifyOptions()
    params: SolitonParams = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            params = SolitonParams.from_wavenumbers([s.a for s in self.solitons], [s.b for s in self.solitons])
        except SolitonError as exc:
            raise ConfigError("solitons", str(exc)) from None
        object.__setattr__(self, "params", params)

    # -- parsing -----------------------------------------------------------------

    @classmethod
    def from_dict(cls, obj: Any) -> "RunConfig":
        if not isinstance(obj, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        sols = obj.get("solitons", [])
        if not isinstance(sols, list):
            raise ConfigError("solitons", "expected a list")
        solitons = []
        for i, s in enumerate(sols):
            where = f"solitons[{i}]"
            if not isinstance(s, dict):
                raise ConfigError(where, "expected an object with fields a, b")
            solitons.append(SolitonSpec(_number(s, "a", where, positive=True), _number(s, "b", where, 0.0)))

        grid = Grid.parse(_section(obj, "grid", "", required=True), "grid")

        time = None
        if (sec := _section(obj, "time", "")) is not None:
            time = TimeSpec(_number(sec, "re", "time", 0.0), _number(sec, "im", "time", 0.0))
            try:
                time.param()
            except SolitonError as exc:
                raise ConfigError("time", str(exc)) from None

        output = Output()
        if (sec := _section(obj, "output", "")) is not None:
            path = sec.get("path")
            if path is not None and not isinstance(path, str):
                raise ConfigError("output.path", "expected a string")
            fmt = sec.get("format", "csv")
            if fmt not in FORMATS:
                raise ConfigError("output.format", f"expected one of {FORMATS}, got {fmt!r}")
            output = Output(path, fmt)

        kernel = KernelOptions()
        if (sec := _section(obj, "kernel", "")) is not None:
            split = sec.get("split", False)
            if not isinstance(split, bool):
                raise ConfigError("kernel.split", "expected true or false")
            yg = _section(sec, "y_grid", "kernel.")
            kernel = KernelOptions(split, Grid.parse(yg, "kernel.y_grid") if yg is not None else None)

        evolve = EvolveOptions()
        if (sec := _section(obj, "evolve", "")) is not None:
            pk = _section(sec, "packet", "evolve.") or {}
            packet = Packet(
                _number(pk, "center", "evolve.packet", 0.0),
                _number(pk, "width", "evolve.packet", 1.0, positive=True),
                _number(pk, "momentum", "evolve.packet", 0.0),
                _number(pk, "bound_state", "evolve.packet", None, positive=True, integer=True),
            )
            times = sec.get("times", [])
            if not isinstance(times, list):
                raise ConfigError("evolve.times", "expected a list of positive numbers")
            times = tuple(_value(v, f"evolve.times[{i}]", positive=True) for i, v in enumerate(times))
            q = _section(sec, "quadrature", "evolve.") or {}
            try:
                panel = q.get("panel")
                rule = QuadratureRule(
                    q.get("kind", "gauss-legendre"),
                    _number(q, "order", "evolve.quadrature", 16, integer=True),
                    None if panel is None else _number(q, "panel", "evolve.quadrature", positive=True),
                )
            except (ValueError, TypeError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError("evolve.quadrature", str(exc)) from None
            evolve = EvolveOptions(packet, times, rule)

        verify = VerifyOptions()
        if (sec := _section(obj, "verify", "")) is not None:
            verify = VerifyOptions(_number(sec, "corrupt", "verify", 1.0))

        cfg = cls(tuple(solitons), grid, time, output, kernel, evolve, verify)
        n = cfg.evolve.packet.bound_state
        if n is not None and n > cfg.params.N:
            raise ConfigError("evolve.packet.bound_state", f"no bound state {n} with N = {cfg.params.N}")
        return cfg

    @classmethod
    def from_json(cls, text: str, source: str = "<config>") -> "RunConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
        return cls.from_dict(obj)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(str(path), exc.strerror or str(exc)) from None
        return cls.from_json(text, str(path))

    # -- serialization -------------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "solitons": [asdict(s) for s in self.solitons],
            "grid": asdict(self.grid),
            "output": asdict(self.output),
            "kernel": {"split": self.kernel.split},
            "evolve": {
                "packet": asdict(self.evolve.packet),
                "times": list(self.evolve.times),
                "quadrature": asdict(self.evolve.quadrature),
            },
            "verify": asdict(self.verify),
        }
        if self.kernel.y_grid is not None:
            d["kernel"]["y_grid"] = asdict(self.kernel.y_grid)
        if self.evolve.packet.bound_state is None:
            del d["evolve"]["packet"]["bound_state"]
        if self.evolve.quadrature.panel is None:
            del d["evolve"]["quadrature"]["panel"]
        if self.time is not None:
            d["time"] = asdict(self.time)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
