"""Populations, fidelity and the echo / growth / freezing verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TrajectoryTooShort, ValidationError, ZeroInitialState
from .trajectory import Trajectory


def fidelity(a0, a_t) -> float:
    """|sum_n a_n(0) conj(a_n(t))| / sum_n |a_n(0)|^2.

    Normalised by the initial population only, so values above one occur
    when the discrete subsystem gains population.
    """
    a0 = np.asarray(a0, dtype=complex)
    a_t = np.asarray(a_t, dtype=complex)
    if a0.shape != a_t.shape:
        raise ValidationError(f"shape mismatch {a0.shape} vs {a_t.shape}")
    norm = float(np.vdot(a0, a0).real)
    if norm == 0.0:
        raise ZeroInitialState("fidelity undefined for a zero initial state")
    return abs(np.vdot(a_t, a0)) / norm


def fidelity_series(a0, amplitudes: np.ndarray) -> np.ndarray:
    a0 = np.asarray(a0, dtype=complex)
    norm = float(np.vdot(a0, a0).real)
    if norm == 0.0:
        raise ZeroInitialState("fidelity undefined for a zero initial state")
    return np.abs(np.asarray(amplitudes).conj() @ a0) / norm


@dataclass(frozen=True)
class PopulationRecord:
    P_n: np.ndarray
    P_c: Optional[float]
    P_tot: float


def populations(state) -> PopulationRecord:
    """Squared moduli of a FullState (``c``, ``b``) or ReducedState (``a``)."""
    if hasattr(state, "b"):
        p_n = np.abs(np.asarray(state.c)) ** 2
        p_c = float(np.sum(np.abs(np.asarray(state.b)) ** 2))
        return PopulationRecord(p_n, p_c, float(p_n.sum() + p_c))
    amps = np.asarray(getattr(state, "a", state))
    p_n = np.abs(amps) ** 2
    return PopulationRecord(p_n, None, float(p_n.sum()))


@dataclass
class ObservableSeries:
    t: np.ndarray
    P_n: np.ndarray  # (samples, N)
    P_c: Optional[np.ndarray]
    P_tot: np.ndarray
    F: np.ndarray


def observable_series(traj: Trajectory, a0=None) -> ObservableSeries:
    """Populations and fidelity along a trajectory (fidelity against ``a0``,
    default the first sample, using interaction-picture amplitudes)."""
    a = traj.interaction_amplitudes()
    p_n = np.abs(traj.amplitudes) ** 2
    p_c = traj.continuum_population
    p_tot = p_n.sum(axis=1) + (p_c if p_c is not None else 0.0)
    ref = a[0] if a0 is None else np.asarray(a0, dtype=complex)
    return ObservableSeries(t=traj.t, P_n=p_n, P_c=p_c, P_tot=p_tot, F=fidelity_series(ref, a))


@dataclass(frozen=True)
class EchoReport:
    F_at_2T: float
    t_of_peak: float
    F_peak: float


def echo_report(traj: Trajectory, T: float) -> EchoReport:
    """Fidelity at t = 2T and where it peaks in [T, 2T]."""
    if traj.t[-1] < 2 * T - 1e-9 * max(1.0, T):
        raise TrajectoryTooShort(f"trajectory ends at {traj.t[-1]}, echo needs 2T = {2 * T}")
    try:
        i_end = traj.index_of(2 * T)
    except KeyError:
        raise TrajectoryTooShort(f"t = 2T = {2 * T} is not a sample time") from None
    F = observable_series(traj).F
    window = np.flatnonzero((traj.t >= T - 1e-9 * max(1.0, T)) & (np.arange(traj.t.size) <= i_end))
    j = window[np.argmax(F[window])]
    return EchoReport(F_at_2T=float(F[i_end]), t_of_peak=float(traj.t[j]), F_peak=float(F[j]))


def _moving_average(t: np.ndarray, y: np.ndarray, window: float) -> np.ndarray:
    if window <= 0 or t.size < 2:
        return y
    stride = t[1] - t[0]
    n = max(1, int(round(window / stride)))
    if n >= y.size:
        return y[[0, -1]] if y.size > 1 else y
    return np.convolve(y, np.ones(n) / n, mode="valid")


def secular_growth_check(t, p_c, t_flip: float, window: float = 0.0, slack: float = 1e-9) -> bool:
    """True when P_c keeps growing after ``t_flip``.

    The series after ``t_flip`` is smoothed by a sliding mean of length
    ``window`` (time units; 0 uses the raw samples) and must be
    non-decreasing within ``slack``; P_c at the end must exceed P_c(t_flip).
    """
    t = np.asarray(t, dtype=float)
    p_c = np.asarray(p_c, dtype=float)
    after = t >= t_flip - 1e-9 * max(1.0, abs(t_flip))
    if after.sum() < 2 or t[-1] <= t_flip:
        raise TrajectoryTooShort(f"P_c series does not extend past t_flip = {t_flip}")
    t_a, p_a = t[after], p_c[after]
    smooth = _moving_average(t_a, p_a, window)
    monotone = bool(np.all(np.diff(smooth) >= -slack))
    return monotone and bool(p_a[-1] > p_a[0])


def frozen_deviation(traj: Trajectory, horizon: float) -> float:
    """max_n max_{t <= horizon} |P_n(t) - P_n(0)|."""
    if traj.t[-1] < horizon - 1e-9 * max(1.0, horizon):
        raise TrajectoryTooShort(f"trajectory ends at {traj.t[-1]} before horizon {horizon}")
    p = np.abs(traj.amplitudes[traj.t <= horizon + 1e-9 * max(1.0, horizon)]) ** 2
    return float(np.max(np.abs(p - p[0])))


def max_population_gap(a: Trajectory, b: Trajectory) -> float:
    """max over shared samples and states of |P_n^a - P_n^b|."""
    if a.t.shape != b.t.shape or not np.allclose(a.t, b.t, rtol=0, atol=1e-9):
        raise ValidationError("trajectories are not sampled at the same times")
    return float(np.max(np.abs(np.abs(a.amplitudes) ** 2 - np.abs(b.amplitudes) ** 2)))
