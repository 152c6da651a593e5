import numpy as np
import pytest

from nhflip.errors import ScheduleMisaligned, StepTooLarge, ValidationError
from nhflip.lattice import FullState, LatticeModel, full_rhs, integrate_full, lattice_size_for
from nhflip.model import CouplingSchedule, SystemConfig

FIG2 = SystemConfig(omega=(0, 0, 0), kappa_n=(0.0375, 0.025, 0.05), alpha_n=(-1, 0, 1))


@pytest.mark.parametrize(
    "t_max, sites, expected",
    [(400.0, (-1, 0, 1), 1703), (0.5, (0,), 103), (64.0, (-1, 0, 1), 359)],
)
def test_lattice_size_for(t_max, sites, expected):
    cfg = SystemConfig(omega=(0,) * len(sites), kappa_n=(0.05,) * len(sites), alpha_n=sites)
    assert lattice_size_for(t_max, cfg, buffer=50) == expected


def test_lattice_size_rejects_nonpositive_time():
    with pytest.raises(ValidationError):
        lattice_size_for(0.0, FIG2)


def test_full_state_layout():
    s = FullState.from_excitation([1, 2, 3], 7)
    assert s.M == 7 and s.half_width == 3
    assert list(s.sites) == [-3, -2, -1, 0, 1, 2, 3]
    with pytest.raises(ValidationError):
        FullState.from_excitation([1], 6)
    with pytest.raises(ValidationError):
        LatticeModel(FIG2, 3)  # site +-1 would sit on the wall


def test_rhs_of_zero_state_is_zero():
    d = full_rhs(FullState.from_excitation([0, 0, 0], 11), 0.0, FIG2, CouplingSchedule.flip(1.0))
    assert np.all(d.c == 0) and np.all(d.b == 0)


def test_rhs_decoupled_state():
    cfg = SystemConfig(omega=(0.3,), kappa_n=(0.0,), alpha_n=(0,))
    # validate_config would reject an all-zero coupling; the RHS itself does not validate
    d = full_rhs(FullState.from_excitation([1.0], 11), 0.0, cfg, CouplingSchedule.hermitian(1.0))
    assert d.c[0] == pytest.approx(-0.3j)
    assert np.all(d.b == 0)


def test_rhs_direct_substitution():
    cfg = SystemConfig(omega=(0.0,), kappa_n=(0.05,), alpha_n=(2,))
    s = FullState.from_excitation([1.0], 11)
    s.b[s.half_width + 3] = 0.5  # b_3
    d = full_rhs(s, 0.0, cfg, CouplingSchedule.hermitian(1.0))
    assert d.c[0] == 0
    expected = np.zeros(11, complex)
    expected[s.half_width + 2] = 1j * 0.05 + 1j * 0.5  # coupling plus hopping from b_3
    expected[s.half_width + 4] = 1j * 0.5
    np.testing.assert_allclose(d.b, expected, atol=0)
    # after the flip the coupling terms pick up f = i
    d_nh = full_rhs(FullState.from_excitation([1.0], 11), 1.5, cfg, CouplingSchedule.flip(1.0))
    assert d_nh.b[s.half_width + 2] == pytest.approx(1j * 1j * 0.05)


def test_decoupled_state_exact_phase():
    cfg = SystemConfig(omega=(0.3,), kappa_n=(0.0,), alpha_n=(0,))
    model = LatticeModel(cfg, 11)
    # integrate_full validates the config, so drive the same RHS through the RK4 driver directly
    from nhflip.trajectory import rk4_run

    f = CouplingSchedule.hermitian(10.0).step_values(0.01, 1000)
    y0 = FullState.from_excitation([1.0], 11).pack()
    _, _, y = rk4_run(model, y0, 0.01, f, 100, lambda y: None)
    assert abs(y[0] - np.exp(-0.3j * 10)) < 1e-8


def test_decoupled_state_through_integrator():
    # one coupled state far away keeps the config valid; the probe state is uncoupled
    cfg = SystemConfig(omega=(0.3, 0.0), kappa_n=(0.0, 0.05), alpha_n=(0, 5))
    init = FullState.from_excitation([1.0, 0.0], lattice_size_for(10.0, cfg))
    traj = integrate_full(init, cfg, CouplingSchedule.hermitian(10.0), 10.0)
    assert abs(traj.final_state.c[0] - np.exp(-0.3j * 10)) < 1e-8


def test_guards():
    init = FullState.from_excitation([1, 0, 0], 51)
    with pytest.raises(StepTooLarge):
        integrate_full(init, FIG2, CouplingSchedule.flip(1.0), 2.0, dt=0.1)
    with pytest.raises(ScheduleMisaligned):
        integrate_full(init, FIG2, CouplingSchedule.flip(1.005), 2.0, dt=0.01)


def test_short_hermitian_run_conserves_population():
    init = FullState.from_excitation(np.array([1, -1j, -1]) / np.sqrt(3), lattice_size_for(20.0, FIG2))
    traj = integrate_full(init, FIG2, CouplingSchedule.hermitian(20.0), 20.0, sample_stride=10)
    p_tot = (np.abs(traj.amplitudes) ** 2).sum(axis=1) + traj.continuum_population
    assert np.max(np.abs(p_tot - 1)) < 1e-9
    assert traj.metadata["hermitian_drift"] < 1e-9
    assert np.all(np.diff(traj.t) > 0)


def test_mirror_symmetry():
    cfg = SystemConfig(omega=(0.1, 0.1), kappa_n=(0.2, 0.2), alpha_n=(-2, 2))
    init = FullState.from_excitation([0.6, 0.6], 61)
    traj = integrate_full(init, cfg, CouplingSchedule.flip(5.0), 10.0, sample_stride=50)
    end = traj.final_state
    np.testing.assert_allclose(end.b, end.b[::-1], atol=1e-14)
    np.testing.assert_allclose(traj.amplitudes[:, 0], traj.amplitudes[:, 1], atol=1e-14)


def test_linearity(rng):
    cfg = SystemConfig(omega=(0.2, -0.4), kappa_n=(0.3, 0.1), alpha_n=(0, 3))
    M = 61
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    y = rng.normal(size=2) + 1j * rng.normal(size=2)
    sched = CouplingSchedule.flip(5.0)

    def run(a):
        return integrate_full(FullState.from_excitation(a, M), cfg, sched, 10.0).final_state

    sx, sy, sxy = run(x), run(y), run(x + 2j * y)
    np.testing.assert_allclose(sxy.c, sx.c + 2j * sy.c, atol=1e-12)
    np.testing.assert_allclose(sxy.b, sx.b + 2j * sy.b, atol=1e-12)


def test_fig2_lattice_size_keeps_edges_empty(preset_result):
    full = preset_result("fig2").full
    assert full.metadata["M"] == 1703
    assert full.metadata["edge_population"] < 1e-10
    assert full.metadata["edge_ok"]
