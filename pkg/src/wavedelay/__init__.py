"""1D wave equation with delayed damping: schemes, energies, experiments."""

from .core import (
    BlowUpError,
    DelayError,
    DelayLine,
    FvMesh,
    PhaseError,
    SimParams,
    WaveState,
    build_params,
)
from .boundary import BoundaryScheme
from .internal import InternalScheme
from .pointwise import PointwiseScheme
from .energy import (
    DecayFit,
    EnergyTrace,
    energy_boundary,
    energy_implicit_variant,
    energy_internal,
    energy_pointwise,
    fit_decay_rate,
    periodicity_check,
)

__all__ = [
    "BlowUpError",
    "BoundaryScheme",
    "DecayFit",
    "DelayError",
    "DelayLine",
    "EnergyTrace",
    "FvMesh",
    "InternalScheme",
    "PhaseError",
    "PointwiseScheme",
    "SimParams",
    "WaveState",
    "build_params",
    "energy_boundary",
    "energy_implicit_variant",
    "energy_internal",
    "energy_pointwise",
    "fit_decay_rate",
    "periodicity_check",
]

__version__ = "0.1.0"
