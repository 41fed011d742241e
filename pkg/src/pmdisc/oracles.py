"""Brute-force verifiers independent of the SDP solver path.

These exist so the test suite can cross-check the interior-point solver
against closed forms (Helstrom), exhaustive maximum-likelihood decoding
(commuting ensembles) and dense measurement grids (qubits).  Nothing
here imports from :mod:`pmdisc.sdp`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ensemble as ens
from . import linalg
from ._kernels import grid_scores_pmi, grid_scores_standard
from .errors import (
    ConvergenceFailure,
    InvalidState,
    NotClassical,
    TooManyAnswerVectors,
    WrongDimension,
)

_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

DEFAULT_GRID_STEPS = 200


def _check_density(rho: np.ndarray, name: str) -> None:
    dec = linalg.eig(rho)
    if dec.eigenvalues[0] < -ens.STATE_TOL:
        raise InvalidState(f"{name} has eigenvalue {dec.eigenvalues[0]:.3e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > ens.STATE_TOL:
        raise InvalidState(f"{name} has trace {tr!r}")


def helstrom_two_state(rho0: np.ndarray, rho1: np.ndarray, p: float) -> float:
    """Closed-form optimal binary discrimination probability.

    Returns (1 + ||p rho0 - (1-p) rho1||_1) / 2 where the trace norm is
    the absolute eigenvalue sum of the weighted difference.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidState(f"prior {p} outside [0, 1]")
    _check_density(rho0, "rho0")
    _check_density(rho1, "rho1")
    return 0.5 * (1.0 + linalg.trace_norm(p * rho0 - (1.0 - p) * rho1))


def helstrom_measurement(rho0: np.ndarray, rho1: np.ndarray, p: float):
    """Optimal projectors (M0, M1): M0 spans the positive eigenspace of the
    weighted difference p rho0 - (1-p) rho1."""
    dec = linalg.eig(p * np.asarray(rho0) - (1.0 - p) * np.asarray(rho1))
    cols = dec.eigenvectors[:, dec.eigenvalues > 0.0]
    m0 = cols @ cols.conj().T
    return linalg.hermitian_part(m0), linalg.hermitian_part(np.eye(rho0.shape[0]) - m0)


def simultaneous_diagonalization(mats, tol: float = 1e-8, seed: int = 0) -> np.ndarray:
    """Common eigenbasis of a commuting Hermitian family.

    Diagonalizes a random real combination of the family (deterministic
    seed); surviving degeneracies mean every member acts as a scalar on
    the degenerate block, so any basis works there.  Retries with fresh
    coefficients if the off-diagonal residual exceeds ``tol``.
    """
    mats = [np.asarray(m, dtype=np.complex128) for m in mats]
    d = mats[0].shape[0]
    for attempt in range(6):
        rng = np.random.default_rng(seed + attempt)
        coeffs = rng.standard_normal(len(mats))
        combo = sum(c * m for c, m in zip(coeffs, mats))
        u = linalg.eig(linalg.hermitian_part(combo)).eigenvectors
        ok = True
        for m in mats:
            rotated = u.conj().T @ m @ u
            off = rotated - np.diag(np.diagonal(rotated))
            if np.abs(off).max() > tol:
                ok = False
                break
        if ok:
            return u
    raise ConvergenceFailure(
        "no common eigenbasis found; matrices may not commute within tolerance"
    )


def classical_ml_decode(e: ens.Ensemble, mode: str = "pmi",
                        max_vectors: int = 4096) -> float:
    """Exact success probability for commuting ensembles by ML decoding.

    All states are rotated into their common eigenbasis; each basis
    outcome k is decoded by the most likely string (standard mode) or,
    in PMI mode, by the best answer vector for that outcome (enumerated
    exhaustively).
    """
    if mode not in ("pmi", "standard"):
        raise ValueError(f"mode must be 'pmi' or 'standard', got {mode!r}")
    if not ens.is_classical(e):
        raise NotClassical("states do not commute; ML decoding is not exact")
    mats = [e.states[x, b] for x in range(e.n_strings) for b in range(e.n_encodings)]
    u = simultaneous_diagonalization(mats)
    diag = np.empty((e.n_strings, e.n_encodings, e.dim))
    for x in range(e.n_strings):
        for b in range(e.n_encodings):
            diag[x, b] = np.real(
                np.diagonal(u.conj().T @ e.states[x, b] @ u)
            )
    weighted = e.probs[:, :, None] * diag  # p_xb * <k|rho_xb|k>

    if mode == "standard":
        return float(weighted.sum(axis=1).max(axis=0).sum())

    if e.n_strings**e.n_encodings > max_vectors:
        raise TooManyAnswerVectors(
            f"N^L = {e.n_strings ** e.n_encodings} exceeds {max_vectors}"
        )
    cols = np.arange(e.n_encodings)
    best = np.full(e.dim, -np.inf)
    for v in e.answer_vectors():
        score = weighted[np.asarray(v), cols, :].sum(axis=0)
        np.maximum(best, score, out=best)
    return float(best.sum())


@dataclass(frozen=True)
class GridMeasurement:
    """Projective qubit measurement along a Bloch axis."""

    axis: np.ndarray
    outcomes: tuple

    @classmethod
    def along(cls, axis) -> "GridMeasurement":
        axis = np.asarray(axis, dtype=np.float64)
        pauli_dot = sum(a * s for a, s in zip(axis, _PAULIS))
        eye = np.eye(2, dtype=np.complex128)
        return cls(axis=axis, outcomes=((eye + pauli_dot) / 2, (eye - pauli_dot) / 2))


def grid_axes(count: int) -> np.ndarray:
    """Near-uniform Bloch-sphere axes (Fibonacci lattice), pole first.

    The first axis is always +z, so a single-point grid is the
    computational-basis measurement.
    """
    if count < 1:
        raise ValueError("need at least one axis")
    if count == 1:
        return np.array([[0.0, 0.0, 1.0]])
    i = np.arange(count)
    z = 1.0 - 2.0 * i / (count - 1)
    radius = np.sqrt(np.clip(1.0 - z * z, 0.0, 1.0))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * i
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])


def _bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([float(np.trace(rho @ s).real) for s in _PAULIS])


def score_axes(e: ens.Ensemble, axes: np.ndarray, mode: str = "pmi") -> np.ndarray:
    """Success probability of each axis' projective measurement with
    optimal classical post-processing of (outcome, encoding) pairs."""
    if e.dim != 2:
        raise WrongDimension(f"grid search supports d = 2 only, got d = {e.dim}")
    if mode == "pmi":
        bloch = np.empty((e.n_strings, e.n_encodings, 3))
        for x in range(e.n_strings):
            for b in range(e.n_encodings):
                bloch[x, b] = _bloch_vector(e.states[x, b])
        return grid_scores_pmi(np.asarray(axes, dtype=np.float64), bloch, e.probs)
    if mode == "standard":
        sv = e if e.n_encodings == 1 else ens.standard_view(e)
        bloch = np.array([_bloch_vector(sv.states[x, 0]) for x in range(sv.n_strings)])
        probs = sv.probs[:, 0].copy()
        return grid_scores_standard(np.asarray(axes, dtype=np.float64), bloch, probs)
    raise ValueError(f"mode must be 'pmi' or 'standard', got {mode!r}")


def qubit_grid_search(e: ens.Ensemble, steps: int = DEFAULT_GRID_STEPS,
                      mode: str = "pmi") -> float:
    """Best projective-measurement success over a steps^2-axis Bloch grid.

    Lower-bounds the SDP value; for binary problems the optimum is
    projective, so the bound converges as the grid refines.
    """
    axes = grid_axes(steps * steps)
    return float(score_axes(e, axes, mode).max())
