"""Classical simulation toolkit for liquid-state NMR spectra.

The package follows one pipeline: a spin system and spectrometer field
define a rotating-frame Hamiltonian; per time point a product-formula
circuit prepares the transverse state and evolves it; a statevector
engine (exact or shot-sampled, optionally with Pauli noise) estimates the
transverse magnetization; the complex decay series is Fourier transformed
into a 1D spectrum on a ppm axis.
"""

from .errors import (
    CapabilityError,
    DataError,
    MitigationError,
    NumericalError,
    ParseError,
    QnmrError,
    RoutingError,
    UsageError,
    ValidationError,
)
from .hamiltonian import (
    PauliTermList,
    build_rotating_hamiltonian,
    dense_hamiltonian,
    exact_propagator_state,
    offset_frequencies,
)
from .isotopes import BUILTIN_ISOTOPES, Isotope, load_isotope_table
from .spins import FieldConfig, SpinSystem, load_spin_system, parse_spin_system

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_ISOTOPES",
    "CapabilityError",
    "DataError",
    "FieldConfig",
    "Isotope",
    "MitigationError",
    "NumericalError",
    "ParseError",
    "PauliTermList",
    "QnmrError",
    "RoutingError",
    "SpinSystem",
    "UsageError",
    "ValidationError",
    "build_rotating_hamiltonian",
    "dense_hamiltonian",
    "exact_propagator_state",
    "load_isotope_table",
    "load_spin_system",
    "offset_frequencies",
    "parse_spin_system",
    "__version__",
]
