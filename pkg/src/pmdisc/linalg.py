"""Dense complex Hermitian linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` of dtype complex128 in row-major
layout; every function validates Hermiticity before trusting symmetry.
Eigendecompositions are delegated to LAPACK's Hermitian solver
(tridiagonalization + implicit QR), which is deterministic.

Tolerances
----------
``HERMITICITY_TOL``
    Relative bound (against the largest entry magnitude) on ||A - A^dag||.
``EIG_RESIDUAL_TOL``
    Relative Frobenius bound on the reconstruction residual of ``eig``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, NonHermitianInput, NotPsd

HERMITICITY_TOL = 1e-10
EIG_RESIDUAL_TOL = 1e-9


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A^dag) / 2."""
    return (a + a.conj().T) / 2


def check_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    """Raise ``NonHermitianInput`` unless A is finite, square and Hermitian.

    The Hermiticity bound is ``tol`` relative to the largest entry
    magnitude; an all-zero matrix passes trivially.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise NonHermitianInput("matrix contains NaN or Inf entries")
    scale = np.abs(a).max()
    if scale == 0.0:
        return
    residual = np.abs(a - a.conj().T).max()
    if residual > tol * scale:
        raise NonHermitianInput(
            f"Hermiticity violated: max |A - A^dag| = {residual:.3e} "
            f"exceeds {tol:.1e} * {scale:.3e}"
        )


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition A = V diag(w) V^dag with ``w`` ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig(a: np.ndarray, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ``NonHermitianInput`` when the input violates the Hermiticity
    tolerance and ``ConvergenceFailure`` if LAPACK fails to converge or
    the reconstruction residual exceeds ``EIG_RESIDUAL_TOL``.
    """
    check_hermitian(a, tol)
    h = hermitian_part(np.asarray(a, dtype=np.complex128))
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from exc
    norm = np.linalg.norm(h)
    residual = np.linalg.norm(h - (v * w) @ v.conj().T)
    if residual > EIG_RESIDUAL_TOL * max(norm, 1e-300):
        raise ConvergenceFailure(
            f"eigendecomposition residual {residual:.3e} exceeds "
            f"{EIG_RESIDUAL_TOL:.1e} * {norm:.3e}"
        )
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def is_psd(a: np.ndarray, tol: float) -> bool:
    """True iff the smallest eigenvalue of A is >= -tol."""
    return float(eig(a).eigenvalues[0]) >= -tol


def frac_power(a: np.ndarray, p: float, tol: float = 1e-9) -> np.ndarray:
    """A^p for PSD A via the spectral decomposition.

    Eigenvalues in [-tol, 0) are clamped to zero (roundoff); anything
    below -tol raises ``NotPsd``.  Requires p > 0.
    """
    if p <= 0:
        raise ValueError(f"power must be positive, got {p}")
    dec = eig(a)
    w = dec.eigenvalues
    if w[0] < -tol:
        raise NotPsd(f"min eigenvalue {w[0]:.3e} below -{tol:.1e}")
    w = np.where(w < 0.0, 0.0, w)
    v = dec.eigenvectors
    return hermitian_part((v * w**p) @ v.conj().T)


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt inner product tr(A B) of two Hermitian matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    check_hermitian(a)
    check_hermitian(b)
    val = np.trace(a @ b)
    scale = max(abs(val), 1.0)
    if abs(val.imag) > HERMITICITY_TOL * scale:
        raise NonHermitianInput(
            f"tr(AB) has imaginary part {val.imag:.3e} for Hermitian inputs"
        )
    return float(val.real)


def trace_norm(a: np.ndarray) -> float:
    """||A||_1 for Hermitian A: sum of absolute eigenvalues."""
    return float(np.abs(eig(a).eigenvalues).sum())


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of [A, B]."""
    return float(np.linalg.norm(a @ b - b @ a))


# -- JSON encoding: matrix = list of rows, entry = [re, im] -------------------

def matrix_to_json(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(rows: list) -> np.ndarray:
    d = len(rows)
    out = np.zeros((d, d), dtype=np.complex128)
    for i, row in enumerate(rows):
        if len(row) != d:
            raise ValueError(f"row {i} has length {len(row)}, expected {d}")
        for j, entry in enumerate(row):
            re, im = float(entry[0]), float(entry[1])
            out[i, j] = re + 1j * im
    if not (np.all(np.isfinite(out.real)) and np.all(np.isfinite(out.imag))):
        raise ValueError("matrix contains NaN or Inf entries")
    return out
