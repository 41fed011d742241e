"""Reference problem instances shipped with the package.

``bb84`` (quantum, PMI useless), ``xor_classical`` (classical, PMI worth
1/2), ``classical_34`` (classical, both partition problems at 3/4) and a
parameterized qubit pair at Bloch angle theta.  The JSON files under
``fixtures/`` are generated from these builders.
"""

from __future__ import annotations

import importlib.resources

import numpy as np

from . import clifford
from . import ensemble as ens

_KET0 = np.array([1.0, 0.0], dtype=np.complex128)
_KET1 = np.array([0.0, 1.0], dtype=np.complex128)


def _proj(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def bb84_ensemble() -> ens.Ensemble:
    """Bit in the computational (b=0) or Hadamard (b=1) basis, p_xb = 1/4."""
    plus = (_KET0 + _KET1) / np.sqrt(2.0)
    minus = (_KET0 - _KET1) / np.sqrt(2.0)
    states = np.empty((2, 2, 2, 2), dtype=np.complex128)
    states[0, 0] = _proj(_KET0)
    states[1, 0] = _proj(_KET1)
    states[0, 1] = _proj(plus)
    states[1, 1] = _proj(minus)
    return ens.Ensemble(2, 2, 2, states, np.full((2, 2), 0.25))


def xor_ensemble() -> ens.Ensemble:
    """Bob receives the classical bit x XOR b, p_xb = 1/4."""
    kets = (_KET0, _KET1)
    states = np.empty((2, 2, 2, 2), dtype=np.complex128)
    for x in range(2):
        for b in range(2):
            states[x, b] = _proj(kets[x ^ b])
    return ens.Ensemble(2, 2, 2, states, np.full((2, 2), 0.25))


def classical_34_ensemble() -> ens.Ensemble:
    """Two-bit register: encoding b reveals bit b of (x XOR noise).

    Both partition problems succeed with probability exactly 3/4 while
    post-measurement information still decodes perfectly (p_PI = 1).
    Supports: b = 0 splits on the first register bit, b = 1 on the second.
    """
    diag_sets = {
        (0, 0): (0, 1),
        (1, 0): (2, 3),
        (0, 1): (0, 2),
        (1, 1): (1, 3),
    }
    states = np.zeros((2, 2, 4, 4), dtype=np.complex128)
    for (x, b), idx in diag_sets.items():
        for k in idx:
            states[x, b, k, k] = 0.5
    return ens.Ensemble(4, 2, 2, states, np.full((2, 2), 0.25))


def theta_ensemble(theta: float) -> ens.Ensemble:
    """Qubit pure-state pair at Bloch angle theta, p_xb = 1/4."""
    return clifford.to_ensemble(clifford.theta_encoding(theta))


def fixture_path(name: str):
    """Filesystem path of a shipped fixture JSON (context-manager free)."""
    return importlib.resources.files("pmdisc") / "fixtures" / name
