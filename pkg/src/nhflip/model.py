"""Problem instance, coupling schedules and initial excitations.

Units: the lattice hopping ``kappa`` sets the scale. Frequencies and rates are
given in units of kappa and times in units of 1/kappa; the presets use
``kappa = 1``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateSite,
    EmbeddingViolation,
    NonPositiveHopping,
    ScheduleMisaligned,
    TimeBeyondSchedule,
    ValidationError,
)

WEAK_COUPLING_THRESHOLD = 0.2


class WeakCouplingWarning(UserWarning):
    """max(kappa_n / kappa) is large enough to doubt the markovian reduction."""


@dataclass(frozen=True)
class SystemConfig:
    """N discrete states side-coupled to a 1D tight-binding lattice."""

    omega: tuple[float, ...]
    kappa_n: tuple[float, ...]
    alpha_n: tuple[int, ...]
    kappa: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(float(x) for x in self.omega))
        object.__setattr__(self, "kappa_n", tuple(float(x) for x in self.kappa_n))
        sites = []
        for a in self.alpha_n:
            if int(a) != a:
                raise ValidationError(f"lattice site {a!r} is not an integer")
            sites.append(int(a))
        object.__setattr__(self, "alpha_n", tuple(sites))
        object.__setattr__(self, "kappa", float(self.kappa))
        n = len(self.omega)
        if n == 0:
            raise ValidationError("at least one discrete state is required")
        if len(self.kappa_n) != n or len(self.alpha_n) != n:
            raise ValidationError(
                f"omega, kappa_n and alpha_n must have equal length "
                f"(got {n}, {len(self.kappa_n)}, {len(self.alpha_n)})"
            )

    @property
    def n_states(self) -> int:
        return len(self.omega)

    @property
    def max_site(self) -> int:
        return max(abs(a) for a in self.alpha_n)

    def replace(self, **changes) -> "SystemConfig":
        fields = dict(omega=self.omega, kappa_n=self.kappa_n, alpha_n=self.alpha_n, kappa=self.kappa)
        fields.update(changes)
        return SystemConfig(**fields)


@dataclass(frozen=True)
class ValidatedConfig:
    config: SystemConfig
    weak_coupling_ratio: float
    warnings: tuple[str, ...] = ()


def validate_config(config: SystemConfig, warn: bool = True) -> ValidatedConfig:
    """Check the invariants of ``config`` and annotate it with max(kappa_n/kappa).

    Raises the specific :class:`ValidationError` subclass for the first
    violated invariant. A :class:`WeakCouplingWarning` is issued (not raised)
    when the coupling ratio exceeds 0.2.
    """
    if not config.kappa > 0:
        raise NonPositiveHopping(f"lattice hopping kappa must be > 0, got {config.kappa}")
    if any(k < 0 for k in config.kappa_n):
        raise NonPositiveHopping(f"couplings kappa_n must be >= 0, got {config.kappa_n}")
    if not any(k > 0 for k in config.kappa_n):
        raise NonPositiveHopping("at least one kappa_n must be > 0")
    for n, w in enumerate(config.omega):
        if not abs(w) < 2.0 * config.kappa:
            raise EmbeddingViolation(
                f"omega[{n}] = {w} is not embedded in the band |omega| < 2 kappa = {2 * config.kappa}"
            )
    seen: dict[int, int] = {}
    for n, a in enumerate(config.alpha_n):
        if a in seen:
            raise DuplicateSite(f"states {seen[a]} and {n} both attach to site {a}")
        seen[a] = n

    ratio = max(config.kappa_n) / config.kappa
    notes = []
    if ratio > WEAK_COUPLING_THRESHOLD:
        msg = (
            f"max(kappa_n/kappa) = {ratio:.3g} exceeds {WEAK_COUPLING_THRESHOLD}; "
            "the markovian reduced model may be inaccurate"
        )
        notes.append(msg)
        if warn:
            warnings.warn(msg, WeakCouplingWarning, stacklevel=2)
    return ValidatedConfig(config=config, weak_coupling_ratio=ratio, warnings=tuple(notes))


class Coupling(str, enum.Enum):
    HERMITIAN = "H"
    NON_HERMITIAN = "NH"

    @property
    def f(self) -> complex:
        return 1.0 + 0.0j if self is Coupling.HERMITIAN else 1.0j

    @classmethod
    def parse(cls, value) -> "Coupling":
        if isinstance(value, Coupling):
            return value
        key = str(value).strip().upper()
        aliases = {"H": cls.HERMITIAN, "HERMITIAN": cls.HERMITIAN,
                   "NH": cls.NON_HERMITIAN, "NON_HERMITIAN": cls.NON_HERMITIAN}
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(f"unknown coupling kind {value!r}; use 'H' or 'NH'") from None


@dataclass(frozen=True)
class Segment:
    duration: float
    coupling: Coupling

    def __post_init__(self):
        object.__setattr__(self, "duration", float(self.duration))
        object.__setattr__(self, "coupling", Coupling.parse(self.coupling))
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ValidationError(f"segment duration must be finite and > 0, got {self.duration}")


@dataclass(frozen=True)
class CouplingSchedule:
    """Piecewise-constant coupling prefactor f(t) taking values 1 or i.

    A segment owns its left endpoint: at a boundary t the value is that of
    the segment that starts at t. With ``repeat`` the segment list is
    continued periodically with period equal to the summed durations.
    """

    segments: tuple[Segment, ...]
    repeat: bool = False
    _starts: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        if not segs:
            raise ValidationError("a schedule needs at least one segment")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "repeat", bool(self.repeat))
        object.__setattr__(self, "_starts", tuple(np.cumsum([0.0] + [s.duration for s in segs[:-1]])))

    @classmethod
    def hermitian(cls, duration: float) -> "CouplingSchedule":
        return cls((Segment(duration, Coupling.HERMITIAN),))

    @classmethod
    def flip(cls, T: float) -> "CouplingSchedule":
        """Hermitian on [0, T), non-Hermitian on [T, 2T]."""
        return cls((Segment(T, Coupling.HERMITIAN), Segment(T, Coupling.NON_HERMITIAN)))

    @classmethod
    def alternating(cls, T: float) -> "CouplingSchedule":
        """Switch between f=1 and f=i every T, forever."""
        return cls((Segment(T, Coupling.HERMITIAN), Segment(T, Coupling.NON_HERMITIAN)), repeat=True)

    @property
    def period(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def first_flip(self) -> float | None:
        """Start time of the first non-Hermitian segment, if any."""
        for start, seg in zip(self._starts, self.segments):
            if seg.coupling is Coupling.NON_HERMITIAN:
                return float(start)
        return None

    def segment_index(self, t: float) -> int:
        if t < 0:
            raise ValidationError(f"schedule evaluated at negative time {t}")
        period = self.period
        if self.repeat:
            t = math.fmod(t, period)
        elif t > period:
            raise TimeBeyondSchedule(f"t = {t} exceeds schedule duration {period}")
        idx = int(np.searchsorted(self._starts, t, side="right")) - 1
        return min(max(idx, 0), len(self.segments) - 1)

    def __call__(self, t: float) -> complex:
        return self.segments[self.segment_index(t)].coupling.f

    def step_values(self, dt: float, n_steps: int) -> np.ndarray:
        """f for each RK4 step ``[k dt, (k+1) dt)``, k < n_steps.

        Every segment must span an integer number of steps so that f never
        changes inside a step.
        """
        counts = []
        for s in self.segments:
            k = round(s.duration / dt)
            if k < 1 or abs(k * dt - s.duration) > 1e-9 * max(1.0, s.duration):
                raise ScheduleMisaligned(
                    f"segment duration {s.duration} is not an integer multiple of dt = {dt}"
                )
            counts.append(k)
        one_pass = np.concatenate([np.full(k, s.coupling.f, dtype=complex) for k, s in zip(counts, self.segments)])
        if self.repeat:
            reps = -(-n_steps // len(one_pass))
            return np.tile(one_pass, reps)[:n_steps]
        if n_steps > len(one_pass):
            raise TimeBeyondSchedule(
                f"{n_steps} steps of dt = {dt} run past the schedule duration {self.period}"
            )
        return one_pass[:n_steps]


def schedule_eval(schedule: CouplingSchedule, t: float) -> complex:
    return schedule(t)


@dataclass(frozen=True)
class InitialExcitation:
    """Discrete-state amplitudes at t = 0; the continuum starts empty."""

    a0: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "a0", tuple(complex(x) for x in self.a0))
        if not self.a0:
            raise ValidationError("initial excitation is empty")

    @classmethod
    def of(cls, values: Iterable[complex]) -> "InitialExcitation":
        return cls(tuple(values))

    def array(self) -> np.ndarray:
        return np.array(self.a0, dtype=complex)

    def check(self, config: SystemConfig) -> None:
        if len(self.a0) != config.n_states:
            raise ValidationError(
                f"a0 has {len(self.a0)} amplitudes but the config has {config.n_states} states"
            )


def n_steps_for(t_max: float, dt: float) -> int:
    n = round(t_max / dt)
    if n < 1 or abs(n * dt - t_max) > 1e-9 * max(1.0, t_max):
        raise ScheduleMisaligned(f"t_max = {t_max} is not an integer multiple of dt = {dt}")
    return int(n)


def as_complex_vector(values: Sequence[complex] | np.ndarray, n: int, name: str = "amplitudes") -> np.ndarray:
    arr = np.asarray(values, dtype=complex).reshape(-1)
    if arr.shape != (n,):
        raise ValidationError(f"{name} must have {n} entries, got {arr.size}")
    return arr
