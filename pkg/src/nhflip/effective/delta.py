"""The markovian coupling matrix Delta, built three independent ways.

* ``delta_analytic_lattice``: closed form for the tight-binding continuum.
* ``delta_pv_quadrature``: pi S(w_m) - i PV int S(w) / (w - w_m) dw.
* ``delta_from_kernel``: the one-sided Laplace transform of the memory
  kernel, int_0^inf Phi(tau) e^{i w_m tau} d tau, regularised by e^{-eps tau}.

Column m is always evaluated at w_m, so Delta is neither Hermitian nor
symmetric in general; that asymmetry is kept as is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import BandEdgeSingularity, ExtrapolationUnstable, ValidationError
from ..model import SystemConfig, validate_config
from .spectral import KernelSeries, SpectralCorrelation, band_integral

EDGE_GUARD = 1e-6
PV_RADII = (1e-2, 1e-3, 1e-4)
KERNEL_EPS = (0.05, 0.025, 0.0125, 0.00625)


@dataclass(frozen=True)
class CouplingMatrix:
    delta: np.ndarray
    provenance: str

    def __post_init__(self):
        d = np.array(self.delta, dtype=complex)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError(f"coupling matrix must be square, got shape {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "delta", d)

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    def eigenvalues(self) -> np.ndarray:
        from .eigen import eigvals_qr

        return eigvals_qr(self.delta)

    def decay_rates_ok(self, eps: float = 1e-8) -> bool:
        """True when every eigenvalue has Re(lambda) >= -eps."""
        return bool(np.all(self.eigenvalues().real >= -eps))


def _check_interior(omega: np.ndarray, band: tuple[float, float], margin: float = 0.0) -> None:
    lo, hi = band
    width = hi - lo
    for m, w in enumerate(omega):
        if w - lo <= max(margin, EDGE_GUARD * width / 4) or hi - w <= max(margin, EDGE_GUARD * width / 4):
            raise BandEdgeSingularity(f"omega[{m}] = {w} is too close to the band edge of {band}")


def delta_analytic_lattice(config: SystemConfig) -> CouplingMatrix:
    """Closed-form Delta for states side-coupled to the tight-binding lattice.

    Delta_nm = kappa_n kappa_m i^d [sqrt(4k^2 - w_m^2) + i w_m]^d / ((2k)^d sqrt(4k^2 - w_m^2)),
    with d = |alpha_n - alpha_m| and k the lattice hopping.
    """
    validate_config(config, warn=False)
    k = config.kappa
    omega = np.array(config.omega)
    if np.any(2.0 * k - np.abs(omega) < EDGE_GUARD * k):
        raise BandEdgeSingularity(f"some |omega_m| lies within {EDGE_GUARD} kappa of the band edge")
    kn = np.array(config.kappa_n)
    d = np.abs(np.subtract.outer(np.array(config.alpha_n), np.array(config.alpha_n)))
    root = np.sqrt(4.0 * k * k - omega**2 + 0j)
    ratio = (1j * (root + 1j * omega) / (2.0 * k))[None, :]
    delta = np.outer(kn, kn) * ratio**d / root[None, :]
    return CouplingMatrix(delta, "analytic")


def _excised_integral(spectral: SpectralCorrelation, w_m: float, r: float) -> np.ndarray:
    lo, hi = spectral.band

    def weight(w):
        return 1.0 / (w - w_m)

    return band_integral(spectral, weight, lo, w_m - r) + band_integral(spectral, weight, w_m + r, hi)


def principal_value(spectral: SpectralCorrelation, w_m: float, radii: Sequence[float] = PV_RADII) -> np.ndarray:
    """PV int S(w) / (w - w_m) dw via symmetric excision and extrapolation.

    Removing (w_m - r, w_m + r) misses 2 S'(w_m) r + O(r^3): only odd powers
    of r appear, so the excised values are fitted by PV + a r + b r^3 + ...
    and the constant term is returned. ``radii`` are fractions of the band width.
    """
    width = spectral.band[1] - spectral.band[0]
    r = np.array(radii, dtype=float) * width
    values = np.stack([_excised_integral(spectral, w_m, ri) for ri in r])
    vander = np.stack([r ** (2 * j - 1) if j else np.ones_like(r) for j in range(len(r))], axis=1)
    coeffs = np.linalg.solve(vander, values.reshape(len(r), -1))
    return coeffs[0].reshape(values.shape[1:])


def delta_pv_quadrature(
    spectral: SpectralCorrelation, omega: Sequence[float], radii: Sequence[float] = PV_RADII
) -> CouplingMatrix:
    omega = np.asarray(omega, dtype=float)
    if omega.size != spectral.n_states:
        raise ValidationError(f"expected {spectral.n_states} frequencies, got {omega.size}")
    width = spectral.band[1] - spectral.band[0]
    _check_interior(omega, spectral.band, margin=max(radii) * width)
    delta = np.empty((spectral.n_states, spectral.n_states), dtype=complex)
    for m, w_m in enumerate(omega):
        pv = principal_value(spectral, w_m, radii)
        delta[:, m] = np.pi * spectral(w_m)[:, m] - 1j * pv[:, m]
    return CouplingMatrix(delta, "pv_quadrature")


def richardson_to_zero(h: Sequence[float], values: Sequence[np.ndarray]) -> np.ndarray:
    """Polynomial (Neville) extrapolation of ``values(h)`` to h = 0."""
    h = np.asarray(h, dtype=float)
    table = [np.array(v, dtype=complex) for v in values]
    n = len(h)
    for k in range(1, n):
        for i in range(n - k):
            table[i] = (h[i] * table[i + 1] - h[i + k] * table[i]) / (h[i] - h[i + k])
    return table[0]


def regularized_kernel_transform(
    series: KernelSeries,
    omega: np.ndarray,
    eps: Sequence[float],
    decay: float = 30.0,
    nodes: int = 16,
) -> list[np.ndarray]:
    """int_0^inf Phi_nm(tau) e^{(i w_m - eps) tau} d tau for each eps.

    Composite Gauss-Legendre in tau up to decay / min(eps); the panel width
    keeps the phase advance per panel below 8 rad.
    """
    lo, hi = series.spectral.band
    fmax = max(np.max(np.abs(hi - omega)), np.max(np.abs(omega - lo)), 1e-12)
    panel = 8.0 / fmax
    tau_max = decay / min(eps)
    n_panels = int(np.ceil(tau_max / panel))
    x, w = np.polynomial.legendre.leggauss(nodes)
    starts = np.arange(n_panels) * panel
    tau = (starts[:, None] + 0.5 * (x + 1.0) * panel).ravel()
    wt = np.tile(0.5 * panel * w, n_panels)
    phi = series(tau)
    out = []
    for e in eps:
        fac = wt[:, None] * np.exp((1j * omega[None, :] - e) * tau[:, None])
        out.append(np.einsum("tnm,tm->nm", phi, fac))
    return out


def delta_from_kernel(
    spectral: SpectralCorrelation,
    omega: Sequence[float],
    eps: Sequence[float] = KERNEL_EPS,
    stability: float = 1e-3,
) -> CouplingMatrix:
    """Delta from the time-domain memory kernel, extrapolated to eps -> 0.

    ``ExtrapolationUnstable`` is raised when dropping the largest eps changes
    the extrapolated matrix by more than ``stability`` times its magnitude.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.size != spectral.n_states:
        raise ValidationError(f"expected {spectral.n_states} frequencies, got {omega.size}")
    eps = sorted((float(e) for e in eps), reverse=True)
    if len(eps) < 2 or eps[-1] <= 0:
        raise ValidationError("need at least two positive regularization rates")
    _check_interior(omega, spectral.band)
    series = KernelSeries(spectral)
    values = regularized_kernel_transform(series, omega, eps)
    full = richardson_to_zero(eps, values)
    reduced = richardson_to_zero(eps[1:], values[1:])
    scale = np.max(np.abs(full))
    if scale > 0 and np.max(np.abs(full - reduced)) > stability * scale:
        raise ExtrapolationUnstable(
            f"eps -> 0 extrapolation changes by {np.max(np.abs(full - reduced)) / scale:.2e} (relative)"
        )
    return CouplingMatrix(full, "kernel_quadrature")
