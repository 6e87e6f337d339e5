"""Spin-chain quantum state transfer: free and adiabatic protocols under disorder."""

__version__ = "0.1.0"

from .chain import (  # noqa: E402
    AmplitudeState,
    ChainRealization,
    Spectrum,
    build_hamiltonian,
    chain_spectrum,
    diagonalize,
    propagate,
)
from .disorder import DisorderSpec, sample_realization  # noqa: E402
from .errors import (  # noqa: E402
    ConfigError,
    EigenConvergenceError,
    InvalidTarget,
    IsolationWarning,
    MinimumOnBoundary,
    ResonanceError,
    SpinXferError,
    StepUnderflow,
    VanishingCoupling,
)
from .resonance import ResonanceResult, find_anticrossing  # noqa: E402

__all__ = [
    "AmplitudeState", "ChainRealization", "Spectrum", "build_hamiltonian", "chain_spectrum",
    "diagonalize", "propagate", "DisorderSpec", "sample_realization", "ConfigError",
    "EigenConvergenceError", "InvalidTarget", "IsolationWarning", "MinimumOnBoundary",
    "ResonanceError", "SpinXferError", "StepUnderflow", "VanishingCoupling",
    "ResonanceResult", "find_anticrossing", "__version__",
]
