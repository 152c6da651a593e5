"""Markovian reduced model: coupling matrix, reduced dynamics and eigenanalysis."""

from .delta import (
    CouplingMatrix,
    delta_analytic_lattice,
    delta_from_kernel,
    delta_pv_quadrature,
    principal_value,
    richardson_to_zero,
)
from .eigen import Eigenmode, eigen_analysis, eigvals_qr, hessenberg
from .reduced import ProtocolReport, ReducedModel, ReducedState, integrate_reduced, protocol_conditions, reduced_rhs
from .spectral import (
    KernelSeries,
    SpectralCorrelation,
    lattice_spectral_correlation,
    memory_kernel,
    zero_spectral_correlation,
)

__all__ = [
    "CouplingMatrix",
    "Eigenmode",
    "KernelSeries",
    "ProtocolReport",
    "ReducedModel",
    "ReducedState",
    "SpectralCorrelation",
    "delta_analytic_lattice",
    "delta_from_kernel",
    "delta_pv_quadrature",
    "eigen_analysis",
    "eigvals_qr",
    "hessenberg",
    "integrate_reduced",
    "lattice_spectral_correlation",
    "memory_kernel",
    "principal_value",
    "protocol_conditions",
    "reduced_rhs",
    "richardson_to_zero",
    "zero_spectral_correlation",
]
