"""Experiment pipeline: simulate both models, derive verdicts, write artifacts."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .effective import (
    CouplingMatrix,
    ProtocolReport,
    delta_analytic_lattice,
    eigen_analysis,
    integrate_reduced,
    protocol_conditions,
)
from .effective.eigen import Eigenmode
from .errors import ValidationError
from .experiment import Experiment, experiment_to_dict, dump_experiment, get_preset, load_experiment
from .export import fmt, line_plot, write_csv, write_key_values, write_matrix_csv, write_series_csv
from .lattice import FullState, integrate_full, lattice_size_for
from .model import CouplingSchedule, ValidatedConfig, validate_config
from .observables import (
    echo_report,
    frozen_deviation,
    max_population_gap,
    observable_series,
    secular_growth_check,
)
from .trajectory import Trajectory

log = logging.getLogger(__name__)

ECHO_TOLERANCE = 0.02
FROZEN_TOLERANCE = 0.1
SWEEP_PARAMETERS = ("T", "detuning_scale", "coupling_scale")


@dataclass
class ExperimentResult:
    experiment: Experiment
    validated: ValidatedConfig
    delta: CouplingMatrix
    modes: list[Eigenmode]
    conditions: ProtocolReport
    M: int | None
    full: Trajectory | None
    reduced: Trajectory | None
    verdict: dict


def simulate_full(exp: Experiment) -> Trajectory:
    M = lattice_size_for(exp.t_max, exp.config, exp.buffer)
    initial = FullState.from_excitation(exp.a0.array(), M)
    return integrate_full(initial, exp.config, exp.schedule, exp.t_max, exp.dt, exp.sample_stride)


def run_experiment(exp: Experiment, models: Sequence[str] = ("full", "reduced")) -> ExperimentResult:
    validated = validate_config(exp.config)
    exp.a0.check(exp.config)
    unknown = set(models) - {"full", "reduced"}
    if unknown or not models:
        raise ValidationError(f"models must be drawn from 'full' and 'reduced', got {list(models)}")
    delta = delta_analytic_lattice(exp.config)
    modes = eigen_analysis(delta)
    T = exp.flip_time
    conditions = protocol_conditions(delta, exp.config.omega, T if T is not None else exp.schedule.segments[0].duration)

    full = simulate_full(exp) if "full" in models else None
    reduced = None
    if "reduced" in models:
        reduced = integrate_reduced(exp.a0.array(), delta, exp.config.omega, exp.schedule, exp.t_max, exp.dt, exp.sample_stride)
    verdict = build_verdict(exp, validated, modes, conditions, full, reduced)
    return ExperimentResult(exp, validated, delta, modes, conditions, full.metadata["M"] if full else None, full, reduced, verdict)


def build_verdict(exp, validated, modes, conditions, full, reduced) -> dict:
    v: dict = {
        "experiment": exp.name,
        "n_states": exp.config.n_states,
        "t_max": exp.t_max,
        "dt": exp.dt,
        "weak_coupling_ratio": validated.weak_coupling_ratio,
        "degenerate": conditions.degenerate,
        "rwa_ok": conditions.rwa_ok,
        "frozen_ok": conditions.frozen_ok,
        "max_abs_eigenvalue": conditions.max_abs_eigenvalue,
        "bound_states": sum(m.bound_state for m in modes),
    }
    T = exp.flip_time
    t_flip = exp.schedule.first_flip
    if full is not None:
        v["M"] = full.metadata["M"]
        v["hermitian_drift"] = full.metadata["hermitian_drift"]
        v["edge_population"] = full.metadata["edge_population"]
    a0 = exp.a0.array()
    for label, traj in (("full", full), ("reduced", reduced)):
        if traj is None:
            continue
        if T is not None and exp.t_max >= 2 * T - 1e-9:
            rep = echo_report(traj, T)
            F = observable_series(traj, a0).F
            after = (traj.t > T + 1e-9) & (traj.t <= 2 * T + 1e-9)
            v[f"F_at_2T_{label}"] = rep.F_at_2T
            v[f"t_of_peak_{label}"] = rep.t_of_peak
            v[f"max_F_after_flip_{label}"] = float(F[after].max())
            v[f"echo_ok_{label}"] = abs(rep.F_at_2T - 1.0) <= ECHO_TOLERANCE
        v[f"frozen_deviation_{label}"] = frozen_deviation(traj, exp.t_max)
        if exp.schedule.repeat:
            v[f"frozen_{label}"] = v[f"frozen_deviation_{label}"] <= FROZEN_TOLERANCE
    if full is not None and t_flip is not None and t_flip < exp.t_max:
        window = exp.schedule.period if exp.schedule.repeat else 0.0
        p_c = full.continuum_population
        v["secular_growth"] = secular_growth_check(full.t, p_c, t_flip, window=window)
        v["P_c_growth"] = float(p_c[-1] - p_c[full.index_of(t_flip)])
    if full is not None and reduced is not None:
        v["reduced_full_max_gap"] = max_population_gap(full, reduced)
    return v


def eigen_report(modes: Iterable[Eigenmode]) -> dict:
    out = {}
    for i, m in enumerate(modes, start=1):
        out[f"lambda_{i}_re"] = m.value.real
        out[f"lambda_{i}_im"] = m.value.imag
        out[f"lambda_{i}_bound"] = m.bound_state
    return out


def write_outputs(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    exp = result.experiment
    a0 = exp.a0.array()
    written = []

    def mark(name):
        p = out / name
        written.append(p)
        return p

    fs = rs = None
    if result.full is not None:
        fs = observable_series(result.full, a0)
        write_series_csv(mark("full.csv"), fs)
    if result.reduced is not None:
        rs = observable_series(result.reduced, a0)
        write_series_csv(mark("reduced.csv"), rs)
    ref = fs or rs
    fid_header, fid_cols = ["t"], [ref.t]
    if fs is not None:
        fid_header.append("F_full")
        fid_cols.append(fs.F)
    if rs is not None:
        fid_header.append("F_reduced")
        fid_cols.append(rs.F)
    write_csv(mark("fidelity.csv"), fid_header, fid_cols)
    write_matrix_csv(mark("delta.csv"), result.delta.delta)
    write_key_values(mark("eigen.txt"), eigen_report(result.modes))
    write_key_values(mark("verdict.txt"), result.verdict)

    n = exp.config.n_states
    pops = {}
    if fs is not None:
        pops.update({f"P_{i + 1}": fs.P_n[:, i] for i in range(n)})
    if rs is not None:
        pops.update({f"P_{i + 1} (reduced)": rs.P_n[:, i] for i in range(n)})
    line_plot(mark("populations.svg"), ref.t, pops, f"{exp.name}: discrete populations", "kappa t", "population")
    if fs is not None:
        line_plot(mark("continuum.svg"), fs.t, {"P_c": fs.P_c, "P_tot": fs.P_tot},
                  f"{exp.name}: continuum and total population", "kappa t", "population")
    fid = {label: col for label, col in zip(fid_header[1:], fid_cols[1:])}
    line_plot(mark("fidelity.svg"), ref.t, fid, f"{exp.name}: fidelity", "kappa t", "F")

    mark("config.toml").write_text(dump_experiment(exp))
    manifest = {
        "tool": "nhflip",
        "version": __version__,
        "experiment": exp.name,
        "config": experiment_to_dict(exp),
        "dt": exp.dt,
        "M": result.M,
        "files": sorted(p.name for p in written) + ["manifest.json"],
    }
    mark("manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return written


def run_preset(name: str, out_dir, dt: float | None = None, t_max: float | None = None) -> ExperimentResult:
    exp = get_preset(name).with_overrides(dt=dt, t_max=t_max)
    result = run_experiment(exp)
    write_outputs(result, out_dir)
    return result


def run_config(config_file, out_dir, dt: float | None = None, t_max: float | None = None) -> ExperimentResult:
    exp = load_experiment(config_file).with_overrides(dt=dt, t_max=t_max)
    result = run_experiment(exp)
    write_outputs(result, out_dir)
    return result


def _default_pattern(n: int) -> tuple[float, ...]:
    # 0, +1, -1, +2, -2, ...
    return tuple(float((k + 1) // 2 * (1 if k % 2 else -1)) for k in range(n))


def detuning_pattern(exp: Experiment) -> tuple[float, ...]:
    if exp.detuning_pattern is not None:
        return exp.detuning_pattern
    omega = np.array(exp.config.omega)
    peak = np.max(np.abs(omega))
    if peak > 0:
        return tuple(omega / peak)
    return _default_pattern(exp.config.n_states)


def apply_parameter(exp: Experiment, parameter: str, value: float) -> Experiment:
    """Copy of ``exp`` with one sweep parameter set to ``value``."""
    value = float(value)
    if parameter == "T":
        if exp.schedule.repeat:
            kinds = [s.coupling for s in exp.schedule.segments]
            sched = CouplingSchedule(tuple((value, k) for k in kinds), repeat=True)
            return replace(exp, name=f"{exp.name}[T={value:g}]", schedule=sched)
        if exp.flip_time is None:
            raise ValidationError("sweeping T requires a [(T, H), (T, NH)] flip schedule or a repeating schedule")
        return replace(exp, name=f"{exp.name}[T={value:g}]", schedule=CouplingSchedule.flip(value), t_max=2 * value)
    if parameter == "detuning_scale":
        omega = tuple(value * p for p in detuning_pattern(exp))
        return replace(exp, name=f"{exp.name}[detuning_scale={value:g}]", config=exp.config.replace(omega=omega))
    if parameter == "coupling_scale":
        kn = tuple(value * k for k in exp.config.kappa_n)
        return replace(exp, name=f"{exp.name}[coupling_scale={value:g}]", config=exp.config.replace(kappa_n=kn))
    raise ValidationError(f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")


def _sweep_row(args) -> dict:
    exp, parameter, value, model, row_dir = args
    result = run_experiment(exp, models=(model,))
    v = result.verdict
    row = {"parameter": parameter, "value": float(value)}
    if exp.schedule.repeat or exp.flip_time is None:
        row["metric"] = "frozen_deviation"
        row["result"] = v[f"frozen_deviation_{model}"]
    else:
        row["metric"] = "F_at_2T"
        row["result"] = v[f"F_at_2T_{model}"]
    if row_dir is not None:
        Path(row_dir).mkdir(parents=True, exist_ok=True)
        write_key_values(Path(row_dir) / "verdict.txt", v)
    return row


def sweep(
    exp: Experiment,
    parameter: str,
    values: Sequence[float],
    out_dir=None,
    workers: int = 1,
    model: str = "full",
) -> list[dict]:
    """One independent run per value; rows keep the order of ``values``."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValidationError(f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
    if model not in ("full", "reduced"):
        raise ValidationError(f"model must be 'full' or 'reduced', got {model!r}")
    out = Path(out_dir) if out_dir is not None else None
    jobs = []
    for i, value in enumerate(values):
        variant = apply_parameter(exp, parameter, value)
        validate_config(variant.config, warn=False)
        row_dir = out / f"row_{i:03d}" if out is not None else None
        jobs.append((variant, parameter, value, model, row_dir))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep_summary.csv", "w", newline="\n") as fh:
            fh.write("parameter,value,metric,result\n")
            for r in rows:
                fh.write(f"{r['parameter']},{fmt(r['value'])},{r['metric']},{fmt(r['result'])}\n")
    return rows
