"""Quantum central limit theorem numerics for single-mode bosonic states.

Truncated Fock-basis convolution, characteristic functions on phase space,
distance and rate estimates, and thermal-attenuator cascades with their
capacity bounds.
"""

__version__ = "0.1.0"

from .fock import (  # noqa: E402
    DimensionError,
    FockDensityMatrix,
    GaussianSpec,
    PreconditionError,
    convolve_fock,
    gaussification,
    number_state,
    random_state,
    superposition_state,
    symmetric_power_fock,
    thermal_state,
)
from .grid import ExtentError, PhaseGrid  # noqa: E402
from .charfun import (  # noqa: E402
    CharFunction,
    charfun_gaussian,
    charfun_of_density,
    convolve_char,
    self_convolution_power,
    wigner_from_charfun,
)
from .phase import (  # noqa: E402
    ResolutionError,
    hs_distance_plancherel,
    rate_fit,
    reconstruct_density,
    trace_distance,
)
from .cascade import (  # noqa: E402
    CascadeSpec,
    capacity_error_terms,
    classical_capacity_thermal,
    quantum_capacity_band,
)
from .states import resolve_state  # noqa: E402

__all__ = [
    "__version__",
    "DimensionError",
    "PreconditionError",
    "ExtentError",
    "ResolutionError",
    "FockDensityMatrix",
    "GaussianSpec",
    "PhaseGrid",
    "CharFunction",
    "CascadeSpec",
    "number_state",
    "superposition_state",
    "thermal_state",
    "random_state",
    "convolve_fock",
    "symmetric_power_fock",
    "gaussification",
    "charfun_of_density",
    "charfun_gaussian",
    "convolve_char",
    "self_convolution_power",
    "wigner_from_charfun",
    "hs_distance_plancherel",
    "reconstruct_density",
    "trace_distance",
    "rate_fit",
    "classical_capacity_thermal",
    "quantum_capacity_band",
    "capacity_error_terms",
    "resolve_state",
]
