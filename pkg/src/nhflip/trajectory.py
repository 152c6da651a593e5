"""Sampled trajectories and the fixed-step RK4 driver shared by both simulators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError


@dataclass
class Trajectory:
    """Time samples of the discrete-state amplitudes.

    ``amplitudes`` holds c_n(t) for the full model (``picture="schrodinger"``)
    and a_n(t) for the reduced model (``picture="interaction"``); the two are
    related by c_n = a_n exp(-i omega_n t). ``continuum_population`` is the
    lattice population sum |b_alpha|^2 and is only present for the full model.
    """

    t: np.ndarray
    amplitudes: np.ndarray
    omega: np.ndarray
    picture: str
    continuum_population: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)
    final_state: object = None

    def __post_init__(self):
        if self.t.ndim != 1 or self.amplitudes.shape[0] != self.t.size:
            raise ValidationError("sample times and amplitudes disagree in length")
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise ValidationError("sample times must be strictly increasing")

    @property
    def n_states(self) -> int:
        return self.amplitudes.shape[1]

    def interaction_amplitudes(self) -> np.ndarray:
        if self.picture == "interaction":
            return self.amplitudes
        return self.amplitudes * np.exp(1j * np.outer(self.t, self.omega))

    def schrodinger_amplitudes(self) -> np.ndarray:
        if self.picture == "schrodinger":
            return self.amplitudes
        return self.amplitudes * np.exp(-1j * np.outer(self.t, self.omega))

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        i = int(np.argmin(np.abs(self.t - t)))
        if abs(self.t[i] - t) > tol * max(1.0, abs(t)):
            raise KeyError(t)
        return i


def rk4_run(
    rhs: Callable[[np.ndarray, float, complex], np.ndarray],
    y0: np.ndarray,
    dt: float,
    f_steps: np.ndarray,
    sample_stride: int,
    observe: Callable[[np.ndarray], tuple],
    on_step: Optional[Callable[[int, np.ndarray], None]] = None,
) -> tuple[np.ndarray, list, np.ndarray]:
    """Classical RK4 with constant ``dt``; f is frozen within each step.

    Samples are taken at step 0, every ``sample_stride`` steps, and at the
    last step. ``observe(y)`` returns the per-sample record.
    """
    if sample_stride < 1:
        raise ValidationError("sample_stride must be >= 1")
    n_steps = len(f_steps)
    y = np.array(y0, dtype=complex)
    times, records = [], []
    half = 0.5 * dt
    for k in range(n_steps):
        if k % sample_stride == 0:
            times.append(k * dt)
            records.append(observe(y))
        t = k * dt
        f = f_steps[k]
        k1 = rhs(y, t, f)
        k2 = rhs(y + half * k1, t + half, f)
        k3 = rhs(y + half * k2, t + half, f)
        k4 = rhs(y + dt * k3, t + dt, f)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if on_step is not None:
            on_step(k + 1, y)
    times.append(n_steps * dt)
    records.append(observe(y))
    return np.array(times), records, y
