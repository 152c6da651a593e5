"""Eigenvalues of small dense complex matrices.

Householder reduction to upper Hessenberg form followed by single-shift
complex QR iteration (Wilkinson shift, Givens rotations, deflation on small
subdiagonals). Intended for N of a few dozen at most.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import QRNonConvergence, ValidationError

MAX_DIM = 64
BOUND_STATE_RTOL = 1e-8


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Unitarily similar upper Hessenberg form of ``a``."""
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """(c, s) with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, 1.0
    r = np.hypot(abs(a), abs(b))
    c = abs(a) / r
    s = (a / abs(a)) * np.conj(b) / r
    return c, s


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    tr_half = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    l1, l2 = tr_half + disc, tr_half - disc
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def eigvals_qr(a: np.ndarray, max_sweeps_per_eig: int = 60) -> np.ndarray:
    """All eigenvalues of the square complex matrix ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"square matrix required, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValidationError(f"dense QR solver is limited to N <= {MAX_DIM}, got {n}")
    if n == 0:
        return np.empty(0, dtype=complex)
    h = hessenberg(a)
    eps = np.finfo(float).eps
    anorm = max(np.linalg.norm(h), np.finfo(float).tiny)
    eig = np.empty(n, dtype=complex)
    hi = n - 1
    since_deflation = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            scale = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if scale == 0.0:
                scale = anorm
            if abs(h[lo, lo - 1]) <= eps * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue

        since_deflation += 1
        total += 1
        if total > max_sweeps_per_eig * n:
            raise QRNonConvergence(f"QR iteration did not converge after {total} sweeps")
        if since_deflation % 11 == 0:
            # exceptional shift to break cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1 + 1j)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])

        block = slice(lo, hi + 1)
        sub = h[block, block]
        sub[np.diag_indices_from(sub)] -= mu
        m = hi - lo + 1
        rotations = []
        for k in range(m - 1):
            c, s = _givens(sub[k, k], sub[k + 1, k])
            rk, rk1 = sub[k, k:].copy(), sub[k + 1, k:].copy()
            sub[k, k:] = c * rk + s * rk1
            sub[k + 1, k:] = -np.conj(s) * rk + c * rk1
            sub[k + 1, k] = 0.0
            rotations.append((c, s))
        for k, (c, s) in enumerate(rotations):
            top = min(k + 2, m)
            ck, ck1 = sub[:top, k].copy(), sub[:top, k + 1].copy()
            sub[:top, k] = c * ck + np.conj(s) * ck1
            sub[:top, k + 1] = -s * ck + c * ck1
        sub[np.diag_indices_from(sub)] += mu
        h[block, block] = sub
    return eig


@dataclass(frozen=True)
class Eigenmode:
    value: complex
    bound_state: bool

    @property
    def decay_rate(self) -> float:
        return float(self.value.real)

    @property
    def frequency_shift(self) -> float:
        return float(self.value.imag)


def eigen_analysis(delta, rtol: float = BOUND_STATE_RTOL) -> list[Eigenmode]:
    """Eigenvalues of Delta, flagging bound states (Re lambda < rtol * max|lambda|).

    Accepts a :class:`CouplingMatrix` or a bare array. Modes are returned
    sorted by decay rate, slowest first.
    """
    matrix = getattr(delta, "delta", delta)
    lam = eigvals_qr(matrix)
    if lam.size == 0:
        return []
    scale = np.max(np.abs(lam))
    lam = lam[np.lexsort((lam.imag, lam.real))]
    return [Eigenmode(complex(x), bool(x.real < rtol * scale)) for x in lam]
