"""Markovian reduced model for the interaction-picture amplitudes a_n.

    da_n/dt = -f(t)^2 sum_m Delta_nm a_m exp[i (omega_n - omega_m) t]

Only f^2 enters, so switching f from 1 to i replaces Delta by -Delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import StepTooLarge, ValidationError
from ..model import CouplingSchedule, as_complex_vector, n_steps_for
from ..trajectory import Trajectory, rk4_run
from .delta import CouplingMatrix
from .eigen import eigen_analysis

MAX_STEP = 0.05
RWA_FACTOR = 100.0
FROZEN_THRESHOLD = 0.1


@dataclass
class ReducedState:
    a: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)

    def schrodinger(self, omega) -> np.ndarray:
        """c_n = a_n exp(-i omega_n t)."""
        return self.a * np.exp(-1j * np.asarray(omega) * self.t)


class ReducedModel:
    def __init__(self, delta, omega):
        self.delta = np.asarray(getattr(delta, "delta", delta), dtype=complex)
        self.omega = np.asarray(omega, dtype=float)
        n = self.delta.shape[0]
        if self.omega.shape != (n,):
            raise ValidationError(f"omega must have {n} entries, got {self.omega.size}")
        self.detuning = np.subtract.outer(self.omega, self.omega)
        self.degenerate = not np.any(self.detuning)

    def __call__(self, a: np.ndarray, t: float, f: complex) -> np.ndarray:
        f2 = f * f
        if self.degenerate:
            return -f2 * (self.delta @ a)
        return -f2 * ((self.delta * np.exp(1j * self.detuning * t)) @ a)


def reduced_rhs(state: ReducedState, t: float, delta, omega, schedule: CouplingSchedule) -> np.ndarray:
    model = ReducedModel(delta, omega)
    return model(as_complex_vector(state.a, model.delta.shape[0], "a"), t, schedule(t))


def integrate_reduced(
    a0,
    delta,
    omega,
    schedule: CouplingSchedule,
    t_max: float,
    dt: float = 0.01,
    sample_stride: int = 100,
) -> Trajectory:
    """RK4 trajectory of the reduced model (interaction picture)."""
    model = ReducedModel(delta, omega)
    n = model.delta.shape[0]
    y0 = as_complex_vector(a0, n, "a0")
    rate = max(np.linalg.norm(model.delta, 2), np.max(np.abs(model.detuning)))
    if dt * rate > MAX_STEP:
        raise StepTooLarge(f"dt * (fastest rate) = {dt * rate:.3g} exceeds {MAX_STEP}")
    n_steps = n_steps_for(t_max, dt)
    f_steps = schedule.step_values(dt, n_steps)
    times, records, y_end = rk4_run(model, y0, dt, f_steps, sample_stride, lambda y: y.copy())
    return Trajectory(
        t=times,
        amplitudes=np.array(records),
        omega=model.omega.copy(),
        picture="interaction",
        metadata={
            "model": "reduced",
            "dt": dt,
            "sample_stride": sample_stride,
            "provenance": getattr(delta, "provenance", "array"),
        },
        final_state=ReducedState(y_end, n_steps * dt),
    )


@dataclass(frozen=True)
class ProtocolReport:
    degenerate: bool
    rwa_ok: bool
    frozen_ok: bool
    max_abs_eigenvalue: float
    min_detuning: float
    max_detuning: float


def protocol_conditions(
    delta: CouplingMatrix,
    omega,
    T: float,
    rwa_factor: float = RWA_FACTOR,
    frozen_threshold: float = FROZEN_THRESHOLD,
) -> ProtocolReport:
    """Which reversal regime a configuration is in.

    degenerate: all omega_n equal. rwa_ok: the smallest detuning exceeds
    ``rwa_factor`` times the largest |lambda| of Delta. frozen_ok: both
    T max|lambda| and T max|omega_n - omega_m| are below ``frozen_threshold``.
    """
    omega = np.asarray(omega, dtype=float)
    lam_max = max((abs(m.value) for m in eigen_analysis(delta)), default=0.0)
    det = np.abs(np.subtract.outer(omega, omega))
    off = det[~np.eye(omega.size, dtype=bool)]
    min_det = float(off.min()) if off.size else float("inf")
    max_det = float(off.max()) if off.size else 0.0
    return ProtocolReport(
        degenerate=bool(max_det == 0.0),
        rwa_ok=bool(min_det > rwa_factor * lam_max),
        frozen_ok=bool(T * lam_max < frozen_threshold and T * max_det < frozen_threshold),
        max_abs_eigenvalue=float(lam_max),
        min_detuning=min_det,
        max_detuning=max_det,
    )
