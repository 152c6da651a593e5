"""Time reversal of discrete states coupled to a continuum by non-Hermitian coupling flips.

The full model (discrete states side-coupled to a tight-binding lattice) is
integrated directly in :mod:`nhflip.lattice`; its markovian reduction lives in
:mod:`nhflip.effective`. :mod:`nhflip.observables` turns trajectories into
populations, fidelities and verdicts, and :mod:`nhflip.runner` drives the
preset experiments behind the ``nhflip`` command.
"""

__version__ = "0.1.0"

from .errors import NHFlipError, NumericalError, ValidationError
from .model import (
    Coupling,
    CouplingSchedule,
    InitialExcitation,
    Segment,
    SystemConfig,
    ValidatedConfig,
    schedule_eval,
    validate_config,
)

__all__ = [
    "Coupling",
    "CouplingSchedule",
    "InitialExcitation",
    "NHFlipError",
    "NumericalError",
    "Segment",
    "SystemConfig",
    "ValidatedConfig",
    "ValidationError",
    "schedule_eval",
    "validate_config",
]
