"""Transport optimization of dissipative quantum networks via the quantum Doob transform."""

from doobtransport.errors import (
    ConsistencyError,
    DegeneracyError,
    NetworkValidationError,
    OverflowGuardError,
    PositivityError,
    SizeError,
)
from doobtransport.netmodel import (
    EnsembleConfig,
    IncoherentLink,
    QuantumNetwork,
    build_network,
    exchange_matrix,
    random_hamiltonian,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "DegeneracyError",
    "EnsembleConfig",
    "IncoherentLink",
    "NetworkValidationError",
    "OverflowGuardError",
    "PositivityError",
    "QuantumNetwork",
    "SizeError",
    "build_network",
    "exchange_matrix",
    "random_hamiltonian",
]
