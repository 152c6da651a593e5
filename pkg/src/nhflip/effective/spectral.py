"""Spectral correlations S_nm(w) = g_n(w) g_m*(w) and the memory kernel Phi_nm(tau).

Band integrals use the substitution ``w = center - half * cos(theta)``,
theta in [0, pi]. The Jacobian ``half * sin(theta)`` cancels the inverse
square-root van Hove divergence at the band edges, which leaves a smooth
integrand for the lattice and for any continuum with the same edge behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.fft import dct
from scipy.integrate import quad_vec
from scipy.special import jv

from ..errors import QuadratureNonConvergence, ValidationError
from ..model import SystemConfig


@dataclass(frozen=True)
class SpectralCorrelation:
    """Callable ``func(w) -> (N, N)`` matrix supported on ``band = (lo, hi)``."""

    func: Callable[[float], np.ndarray]
    band: tuple[float, float]
    n_states: int

    def __post_init__(self):
        lo, hi = self.band
        if not hi > lo:
            raise ValidationError(f"empty band {self.band}")

    def __call__(self, w: float) -> np.ndarray:
        lo, hi = self.band
        if w <= lo or w >= hi:
            return np.zeros((self.n_states, self.n_states), dtype=complex)
        return np.asarray(self.func(w), dtype=complex)

    @property
    def center(self) -> float:
        return 0.5 * (self.band[0] + self.band[1])

    @property
    def half_width(self) -> float:
        return 0.5 * (self.band[1] - self.band[0])

    def omega_of(self, theta):
        return self.center - self.half_width * np.cos(theta)

    def theta_of(self, w):
        return np.arccos(np.clip((self.center - w) / self.half_width, -1.0, 1.0))

    def smoothed(self, theta: float) -> np.ndarray:
        """S(w(theta)) * dw/dtheta, regular at the band edges."""
        if theta <= 0.0 or theta >= np.pi:
            return np.zeros((self.n_states, self.n_states), dtype=complex)
        return self(self.omega_of(theta)) * (self.half_width * np.sin(theta))


def lattice_spectral_correlation(config: SystemConfig) -> SpectralCorrelation:
    """Spectral correlation of states side-coupled to the tight-binding band.

    In the Bloch basis b_alpha = (2 pi)^{-1/2} int dq e^{i q alpha} b(q) with
    w(q) = -2 kappa cos q, state n couples to mode q with amplitude
    proportional to kappa_n e^{i q alpha_n}. Each w inside the band is hit by
    q = +-q0, q0 = arccos(-w / 2 kappa), with density 1/sqrt(4 kappa^2 - w^2)
    per branch; summing both branches gives

        S_nm(w) = kappa_n kappa_m cos((alpha_n - alpha_m) q0) / (pi sqrt(4 kappa^2 - w^2)).
    """
    kappa = config.kappa
    kn = np.array(config.kappa_n)
    dist = np.subtract.outer(np.array(config.alpha_n), np.array(config.alpha_n))
    weights = np.outer(kn, kn) / np.pi

    def func(w: float) -> np.ndarray:
        q0 = np.arccos(np.clip(-w / (2.0 * kappa), -1.0, 1.0))
        return weights * np.cos(dist * q0) / np.sqrt(4.0 * kappa**2 - w * w)

    return SpectralCorrelation(func=func, band=(-2.0 * kappa, 2.0 * kappa), n_states=config.n_states)


def zero_spectral_correlation(n_states: int, band=(-2.0, 2.0)) -> SpectralCorrelation:
    return SpectralCorrelation(lambda w: np.zeros((n_states, n_states)), band, n_states)


def band_integral(
    spectral: SpectralCorrelation,
    weight: Callable[[float], complex | np.ndarray],
    lo: float | None = None,
    hi: float | None = None,
    epsabs: float = 1e-15,
    epsrel: float = 1e-12,
    limit: int = 4000,
) -> np.ndarray:
    """Adaptive integral of S(w) * weight(w) over [lo, hi] (default: whole band)."""
    t_lo = 0.0 if lo is None else float(spectral.theta_of(lo))
    t_hi = np.pi if hi is None else float(spectral.theta_of(hi))

    def integrand(theta):
        return spectral.smoothed(theta) * weight(spectral.omega_of(theta))

    value, err, info = quad_vec(integrand, t_lo, t_hi, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=True)
    scale = max(np.max(np.abs(value)), epsabs)
    if not info.success and err > 1e-8 * scale:
        raise QuadratureNonConvergence(f"band integral did not converge: {info.message} (error {err:.2e})")
    return value


def memory_kernel(spectral: SpectralCorrelation, tau: float) -> np.ndarray:
    """Phi_nm(tau) = int dw S_nm(w) exp(-i w tau), by adaptive quadrature.

    Negative ``tau`` is accepted; Phi(-tau) = Phi(tau)^dagger for Hermitian S.
    """
    tau = float(tau)
    return band_integral(spectral, lambda w: np.exp(-1j * w * tau), limit=20000)


_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])


class KernelSeries:
    """Fast evaluation of Phi(tau) on many tau values.

    The smoothed spectral function is expanded as sum_k c_k cos(k theta)
    (a DCT of its samples); each cosine term integrates in closed form,

        int_0^pi cos(k theta) e^{i z cos theta} d theta = pi i^k J_k(z),

    so Phi(tau) = e^{-i center tau} sum_k c_k pi i^k J_k(half tau).
    """

    def __init__(self, spectral: SpectralCorrelation, tol: float = 1e-13, max_terms: int = 4096):
        self.spectral = spectral
        n = 64
        while True:
            theta = np.pi * (np.arange(n) + 0.5) / n
            samples = np.stack([spectral.smoothed(th) for th in theta])
            coef = dct(samples, type=2, axis=0) / n
            coef[0] /= 2.0
            mags = np.abs(coef).reshape(n, -1).max(axis=1)
            peak = mags.max()
            if peak == 0.0:
                self.coef = coef[:1]
                break
            if mags[-n // 8:].max() <= tol * peak:
                keep = int(np.flatnonzero(mags > tol * peak)[-1]) + 1
                self.coef = coef[:keep]
                break
            n *= 2
            if n > max_terms:
                raise QuadratureNonConvergence(
                    "cosine expansion of the spectral correlation did not converge; "
                    "the band edges are not of inverse-square-root or regular type"
                )

    @property
    def n_terms(self) -> int:
        return self.coef.shape[0]

    def __call__(self, tau) -> np.ndarray:
        """Phi at each entry of ``tau``; shape ``tau.shape + (N, N)``."""
        tau = np.asarray(tau, dtype=float)
        flat = tau.reshape(-1)
        k = np.arange(self.n_terms)
        basis = np.pi * _I_POWERS[k % 4][None, :] * jv(k[None, :], self.spectral.half_width * flat[:, None])
        phase = np.exp(-1j * self.spectral.center * flat)[:, None, None]
        out = np.tensordot(basis, self.coef, axes=(1, 0)) * phase
        return out.reshape(tau.shape + self.coef.shape[1:])
