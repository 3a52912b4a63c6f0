"""Linear canonical space-time transforms and convolutions over Cl(3,1)."""
from .algebra import AlgebraError, Multivector, exp_blade
from .convolution import convolve_standard, mustard_convolve, odot, otimes, star_n
from .grid import (
    FrequencyGrid,
    GridError,
    SpaceTimeGrid,
    SpaceTimeSignal,
    Spectrum,
    conjugate_grid,
    gaussian_packet,
    random_signal,
)
from .io import FormatError, read_signal, write_signal
from .transforms import (
    FrParams,
    LcParams,
    TransformError,
    TwoSidedParams,
    frsft,
    ifrsft,
    ilcst,
    isft,
    lcst,
    sft,
    two_sided_ilcst,
    two_sided_lcst,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraError",
    "FormatError",
    "FrParams",
    "FrequencyGrid",
    "GridError",
    "LcParams",
    "Multivector",
    "SpaceTimeGrid",
    "SpaceTimeSignal",
    "Spectrum",
    "TransformError",
    "TwoSidedParams",
    "conjugate_grid",
    "convolve_standard",
    "exp_blade",
    "frsft",
    "gaussian_packet",
    "ifrsft",
    "ilcst",
    "isft",
    "lcst",
    "mustard_convolve",
    "odot",
    "otimes",
    "random_signal",
    "read_signal",
    "sft",
    "star_n",
    "two_sided_ilcst",
    "two_sided_lcst",
    "write_signal",
]
