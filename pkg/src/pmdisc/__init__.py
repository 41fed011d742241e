"""Quantum state discrimination with post-measurement information.

Compute optimal success probabilities and measurements when the encoding
label is revealed only after the measurement, certify optimality via the
dual SDP, evaluate analytic upper/lower bounds, analyze Clifford
encodings in closed form, and relate classical ensembles to the CHSH
game.
"""

from . import bounds, clifford, ensemble, errors, fixtures, games, linalg, oracles, sdp
from ._kernels import BACKEND as kernel_backend
from .ensemble import Ensemble
from .sdp import Povm, SdpSolution, OptimalityReport

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "clifford",
    "ensemble",
    "errors",
    "fixtures",
    "games",
    "linalg",
    "oracles",
    "sdp",
    "kernel_backend",
    "Ensemble",
    "Povm",
    "SdpSolution",
    "OptimalityReport",
    "__version__",
]
