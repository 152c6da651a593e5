import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhflip.effective import delta_analytic_lattice, eigen_analysis, eigvals_qr, hessenberg
from nhflip.errors import QRNonConvergence, ValidationError
from nhflip.lattice import FullState, integrate_full
from nhflip.model import CouplingSchedule, SystemConfig


def _sorted(z):
    z = np.asarray(z)
    return z[np.lexsort((z.imag, z.real))]


def test_diagonal_matrix():
    lam = eigvals_qr(np.diag([3.0, -1.0 + 2j, 0.5]))
    np.testing.assert_allclose(_sorted(lam), _sorted([3.0, -1.0 + 2j, 0.5]), atol=1e-14)


def test_hessenberg_is_similar():
    a = np.random.default_rng(1).normal(size=(6, 6)) + 1j * np.random.default_rng(2).normal(size=(6, 6))
    h = hessenberg(a)
    assert np.allclose(np.tril(h, -2), 0)
    np.testing.assert_allclose(np.trace(h), np.trace(a), atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(h), np.linalg.norm(a), rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**31 - 1))
def test_matches_numpy_and_det_residual(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    lam = eigvals_qr(a)
    ref = np.linalg.eigvals(a)
    # match each reference eigenvalue to its nearest computed one
    for x in ref:
        assert np.min(np.abs(lam - x)) <= 1e-8 * max(1.0, np.linalg.norm(a))
    norm = np.linalg.norm(a, 2)
    for x in lam:
        assert abs(np.linalg.det(a - x * np.eye(n))) <= 1e-8 * norm**n


def test_similarity_invariance(rng):
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    s = rng.normal(size=(5, 5)) + 2 * np.eye(5)
    b = s @ a @ np.linalg.inv(s)
    np.testing.assert_allclose(_sorted(eigvals_qr(a)), _sorted(eigvals_qr(b)), atol=1e-6)


def test_dark_state_is_flagged_bound():
    cfg = SystemConfig(omega=(0.0, 0.0), kappa_n=(0.1, 0.1), alpha_n=(-1, 1))
    modes = eigen_analysis(delta_analytic_lattice(cfg))
    assert abs(modes[0].value) < 1e-14 and modes[0].bound_state
    assert modes[1].value == pytest.approx(0.01, rel=1e-12) and not modes[1].bound_state


def test_dark_state_survives_in_full_lattice():
    # the zero mode (1, 1) keeps its population on the lattice; the bright mode (1, -1) decays at rate 2 kappa^2
    cfg = SystemConfig(omega=(0.0, 0.0), kappa_n=(0.1, 0.1), alpha_n=(-1, 1))
    t = 400.0
    out = {}
    for label, a0 in (("dark", [1, 1]), ("bright", [1, -1])):
        a0 = np.array(a0, dtype=complex) / np.sqrt(2)
        traj = integrate_full(
            FullState.from_excitation(a0, 1011), cfg, CouplingSchedule.hermitian(t), t, sample_stride=1000
        )
        out[label] = np.sum(np.abs(traj.amplitudes[-1]) ** 2)
    assert out["dark"] > 0.95
    assert out["bright"] < 1e-3


def test_fig2_modes_all_decay():
    from nhflip.experiment import get_preset

    modes = eigen_analysis(delta_analytic_lattice(get_preset("fig2").config))
    assert all(m.value.real > 0 and not m.bound_state for m in modes)
    assert max(abs(m.value) for m in modes) == pytest.approx(1.928e-3, rel=1e-3)


def test_non_convergence_raises():
    a = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=complex)
    with pytest.raises(QRNonConvergence):
        eigvals_qr(a, max_sweeps_per_eig=0)


def test_size_limit():
    with pytest.raises(ValidationError):
        eigvals_qr(np.eye(65))
    with pytest.raises(ValidationError):
        eigvals_qr(np.ones((2, 3)))
