"""Experiment descriptions: presets and the TOML config file format.

Config files are flat TOML::

    name = "fig2"
    n_states = 3
    omega = [0.0, 0.0, 0.0]
    kappa_n = [0.0375, 0.025, 0.05]
    alpha_n = [-1, 0, 1]
    kappa = 1.0
    schedule = [[200.0, "H"], [200.0, "NH"]]
    repeat = false
    a0 = [[0.5773502691896258, 0.0], [0.0, -0.5773502691896258], [-0.5773502691896258, 0.0]]
    t_max = 400.0
    dt = 0.01

Optional keys: ``sample_stride`` (default 100), ``buffer`` (lattice sites
beyond the ballistic front, default 50) and ``detuning_pattern`` (used by
the detuning sweep).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import tomli_w

from .errors import ParseError, UnknownPreset, ValidationError
from .model import CouplingSchedule, InitialExcitation, Segment, SystemConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class Experiment:
    name: str
    config: SystemConfig
    schedule: CouplingSchedule
    a0: InitialExcitation
    t_max: float
    dt: float = 0.01
    sample_stride: int = 100
    buffer: int = 50
    detuning_pattern: Optional[tuple[float, ...]] = None

    def with_overrides(self, dt: float | None = None, t_max: float | None = None) -> "Experiment":
        changes = {}
        if dt is not None:
            # keep the sampling interval in time units
            changes["dt"] = float(dt)
            changes["sample_stride"] = max(1, int(round(self.sample_stride * self.dt / dt)))
        if t_max is not None:
            changes["t_max"] = float(t_max)
        return replace(self, **changes) if changes else self

    @property
    def flip_time(self) -> Optional[float]:
        """T for a plain flip protocol [(T, H), (T, NH)], else None."""
        segs = self.schedule.segments
        if (
            not self.schedule.repeat
            and len(segs) == 2
            and segs[0].coupling.f == 1
            and segs[1].coupling.f == 1j
            and math.isclose(segs[0].duration, segs[1].duration, rel_tol=1e-12)
        ):
            return segs[0].duration
        return None


_SQ3 = 1.0 / math.sqrt(3.0)
_FIG2 = SystemConfig(omega=(0.0, 0.0, 0.0), kappa_n=(0.0375, 0.025, 0.05), alpha_n=(-1, 0, 1), kappa=1.0)
_A0 = InitialExcitation((complex(_SQ3, 0.0), complex(0.0, -_SQ3), complex(-_SQ3, 0.0)))

PRESETS: dict[str, Experiment] = {
    "fig2": Experiment("fig2", _FIG2, CouplingSchedule.flip(200.0), _A0, t_max=400.0),
    "fig3a": Experiment("fig3a", _FIG2.replace(omega=(0.0, 0.5, -0.5)), CouplingSchedule.flip(200.0), _A0, 400.0),
    "fig3b": Experiment("fig3b", _FIG2.replace(omega=(0.0, 0.05, -0.025)), CouplingSchedule.flip(200.0), _A0, 400.0),
    "fig4": Experiment("fig4", _FIG2.replace(omega=(0.0, 0.05, -0.025)), CouplingSchedule.alternating(8.0), _A0, 400.0),
}


def get_preset(name: str) -> Experiment:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


_REQUIRED = ("n_states", "omega", "kappa_n", "alpha_n", "schedule", "a0")
_OPTIONAL = ("name", "kappa", "repeat", "t_max", "dt", "sample_stride", "buffer", "detuning_pattern")


def _number_list(data: dict, key: str, n: int, kind=float) -> tuple:
    value = data[key]
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"field '{key}': expected a list of {n} numbers, got {value!r}")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"field '{key}[{i}]': expected a number, got {v!r}")
        if kind is int and int(v) != v:
            raise ParseError(f"field '{key}[{i}]': expected an integer, got {v!r}")
        out.append(kind(v))
    return tuple(out)


def _number(data: dict, key: str, default=None, kind=float):
    if key not in data:
        if default is None:
            raise ParseError(f"field '{key}' is required")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"field '{key}': expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ParseError(f"field '{key}': expected an integer, got {v!r}")
    return kind(v)


def experiment_from_dict(data: dict, default_name: str = "custom") -> Experiment:
    unknown = set(data) - set(_REQUIRED) - set(_OPTIONAL)
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in _REQUIRED:
        if key not in data:
            raise ParseError(f"field '{key}' is required")
    n = _number(data, "n_states", kind=int)
    if n < 1:
        raise ParseError(f"field 'n_states': must be >= 1, got {n}")
    config = SystemConfig(
        omega=_number_list(data, "omega", n),
        kappa_n=_number_list(data, "kappa_n", n),
        alpha_n=_number_list(data, "alpha_n", n, int),
        kappa=_number(data, "kappa", 1.0),
    )

    raw = data["schedule"]
    if not isinstance(raw, list) or not raw:
        raise ParseError("field 'schedule': expected a non-empty list of [duration, \"H\"|\"NH\"] pairs")
    segments = []
    for i, item in enumerate(raw):
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], str)
                and isinstance(item[0], (int, float)) and not isinstance(item[0], bool)):
            raise ParseError(f"field 'schedule[{i}]': expected [duration, \"H\"|\"NH\"], got {item!r}")
        try:
            segments.append(Segment(float(item[0]), item[1]))
        except ValidationError as exc:
            raise ParseError(f"field 'schedule[{i}]': {exc}") from None
    repeat = data.get("repeat", False)
    if not isinstance(repeat, bool):
        raise ParseError(f"field 'repeat': expected true or false, got {repeat!r}")
    schedule = CouplingSchedule(tuple(segments), repeat=repeat)

    raw_a0 = data["a0"]
    if not isinstance(raw_a0, list) or len(raw_a0) != n:
        raise ParseError(f"field 'a0': expected {n} [re, im] pairs")
    a0 = []
    for i, pair in enumerate(raw_a0):
        if not (isinstance(pair, list) and len(pair) == 2
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise ParseError(f"field 'a0[{i}]': expected [re, im], got {pair!r}")
        a0.append(complex(float(pair[0]), float(pair[1])))

    if "t_max" in data:
        t_max = _number(data, "t_max")
    elif repeat:
        raise ParseError("field 't_max' is required for a repeating schedule")
    else:
        t_max = schedule.period
    pattern = None
    if "detuning_pattern" in data:
        pattern = _number_list(data, "detuning_pattern", n)
    name = data.get("name", default_name)
    if not isinstance(name, str):
        raise ParseError(f"field 'name': expected a string, got {name!r}")
    return Experiment(
        name=name,
        config=config,
        schedule=schedule,
        a0=InitialExcitation(tuple(a0)),
        t_max=t_max,
        dt=_number(data, "dt", 0.01),
        sample_stride=_number(data, "sample_stride", 100, int),
        buffer=_number(data, "buffer", 50, int),
        detuning_pattern=pattern,
    )


def load_experiment(path: str | Path) -> Experiment:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    try:
        return experiment_from_dict(data, default_name=path.stem)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def experiment_to_dict(exp: Experiment) -> dict:
    c = exp.config
    data = {
        "name": exp.name,
        "n_states": c.n_states,
        "omega": list(c.omega),
        "kappa_n": list(c.kappa_n),
        "alpha_n": list(c.alpha_n),
        "kappa": c.kappa,
        "schedule": [[s.duration, s.coupling.value] for s in exp.schedule.segments],
        "repeat": exp.schedule.repeat,
        "a0": [[z.real, z.imag] for z in exp.a0.a0],
        "t_max": exp.t_max,
        "dt": exp.dt,
        "sample_stride": exp.sample_stride,
        "buffer": exp.buffer,
    }
    if exp.detuning_pattern is not None:
        data["detuning_pattern"] = list(exp.detuning_pattern)
    return data


def dump_experiment(exp: Experiment) -> str:
    return tomli_w.dumps(experiment_to_dict(exp))
