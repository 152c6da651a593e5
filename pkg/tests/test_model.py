import math
import warnings

import pytest
from hypothesis import given, strategies as st

from nhflip.errors import (
    DuplicateSite,
    EmbeddingViolation,
    NonPositiveHopping,
    ScheduleMisaligned,
    TimeBeyondSchedule,
    ValidationError,
)
from nhflip.model import (
    Coupling,
    CouplingSchedule,
    InitialExcitation,
    Segment,
    SystemConfig,
    WeakCouplingWarning,
    n_steps_for,
    schedule_eval,
    validate_config,
)

FIG2 = SystemConfig(omega=(0, 0, 0), kappa_n=(0.0375, 0.025, 0.05), alpha_n=(-1, 0, 1))


def test_fig2_config_is_valid():
    v = validate_config(FIG2)
    assert v.config is FIG2
    assert v.weak_coupling_ratio == pytest.approx(0.05)
    assert v.warnings == ()


def test_embedding_violation():
    with pytest.raises(EmbeddingViolation):
        validate_config(SystemConfig(omega=(2.5,), kappa_n=(0.05,), alpha_n=(0,)))
    with pytest.raises(EmbeddingViolation):
        validate_config(SystemConfig(omega=(-2.0,), kappa_n=(0.05,), alpha_n=(0,)))


def test_duplicate_site():
    with pytest.raises(DuplicateSite):
        validate_config(SystemConfig(omega=(0, 0), kappa_n=(0.05, 0.05), alpha_n=(0, 0)))


@pytest.mark.parametrize("kappa, kn", [(0.0, (0.05,)), (-1.0, (0.05,)), (1.0, (0.0,)), (1.0, (-0.1,))])
def test_non_positive_hopping(kappa, kn):
    with pytest.raises(NonPositiveHopping):
        validate_config(SystemConfig(omega=(0,), kappa_n=kn, alpha_n=(0,), kappa=kappa))


def test_weak_coupling_warning_is_not_an_error():
    cfg = SystemConfig(omega=(0,), kappa_n=(0.3,), alpha_n=(0,))
    with pytest.warns(WeakCouplingWarning):
        v = validate_config(cfg)
    assert v.weak_coupling_ratio == pytest.approx(0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        validate_config(cfg, warn=False)


def test_mismatched_lengths():
    with pytest.raises(ValidationError):
        SystemConfig(omega=(0, 0), kappa_n=(0.1,), alpha_n=(0, 1))
    with pytest.raises(ValidationError):
        SystemConfig(omega=(0,), kappa_n=(0.1,), alpha_n=(0.5,))


def test_flip_schedule_values():
    s = CouplingSchedule((Segment(200.0, "H"), Segment(200.0, "NH")))
    assert schedule_eval(s, 100.0) == 1
    assert schedule_eval(s, 300.0) == 1j
    # a segment owns its left endpoint
    assert schedule_eval(s, 0.0) == 1
    assert schedule_eval(s, 200.0) == 1j
    assert schedule_eval(s, 400.0) == 1j
    with pytest.raises(TimeBeyondSchedule):
        schedule_eval(s, 400.5)
    with pytest.raises(ValidationError):
        schedule_eval(s, -1.0)


def test_periodic_schedule_values():
    s = CouplingSchedule((Segment(8.0, "H"), Segment(8.0, "NH")), repeat=True)
    assert s.period == 16.0
    assert schedule_eval(s, 20.0) == 1  # 20 mod 16 = 4 lies in the Hermitian segment
    assert schedule_eval(s, 28.0) == 1j
    assert schedule_eval(s, 16.0) == 1
    assert schedule_eval(s, 1e6 + 8.0) == 1j


durations = st.lists(st.tuples(st.floats(0.1, 50.0), st.sampled_from(["H", "NH"])), min_size=1, max_size=6)


@given(durations, st.booleans(), st.floats(0.0, 1.0))
def test_f_squared_is_plus_or_minus_one(segs, repeat, frac):
    s = CouplingSchedule(tuple(Segment(d, k) for d, k in segs), repeat=repeat)
    t = frac * s.period * (3 if repeat else 1)
    f = s(t)
    assert f * f in (1, -1)
    assert s(t) == f  # repeated evaluation is identical


@given(durations, st.floats(0.0, 200.0))
def test_periodic_schedules_are_periodic(segs, t):
    s = CouplingSchedule(tuple(Segment(d, k) for d, k in segs), repeat=True)
    # compare away from segment boundaries, where rounding of t + period could cross one
    starts = [0.0]
    for d, _ in segs:
        starts.append(starts[-1] + d)
    phase = math.fmod(t, s.period)
    if min(abs(phase - b) for b in starts) > 1e-6:
        assert s(t + s.period) == s(t)


def test_step_values_alignment():
    s = CouplingSchedule.flip(2.0)
    f = s.step_values(0.5, 8)
    assert list(f) == [1, 1, 1, 1, 1j, 1j, 1j, 1j]
    with pytest.raises(ScheduleMisaligned):
        CouplingSchedule.flip(2.0).step_values(0.3, 10)
    with pytest.raises(TimeBeyondSchedule):
        s.step_values(0.5, 9)
    periodic = CouplingSchedule.alternating(1.0).step_values(0.5, 7)
    assert list(periodic) == [1, 1, 1j, 1j, 1, 1, 1j]


def test_n_steps_for():
    assert n_steps_for(400.0, 0.01) == 40000
    with pytest.raises(ScheduleMisaligned):
        n_steps_for(1.0, 0.3)


def test_coupling_parse():
    assert Coupling.parse("nh") is Coupling.NON_HERMITIAN
    assert Coupling.parse("hermitian").f == 1
    with pytest.raises(ValidationError):
        Coupling.parse("X")
    with pytest.raises(ValidationError):
        Segment(0.0, "H")


def test_initial_excitation():
    a = InitialExcitation.of([1, -1j])
    assert a.array().dtype == complex
    with pytest.raises(ValidationError):
        a.check(FIG2)
