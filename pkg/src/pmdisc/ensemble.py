"""Data model for discrimination problems: states rho_xb with weights p_xb.

An ensemble couples N strings (canonicalized to 0..N-1) with L encodings
(0..L-1).  Answer vectors are plain tuples of length L whose b-th entry
is the guess to output once encoding b is revealed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    InvalidDistribution,
    InvalidState,
    MissingPair,
    NotBinary,
    NotProductUniform,
)

STATE_TOL = 1e-9        # PSD / unit-trace tolerance for states
PROB_TOL = 1e-12        # distribution normalization tolerance
COMMUTATOR_TOL = 1e-9   # Frobenius tolerance for pairwise commutators

AnswerVector = tuple


@dataclass(frozen=True)
class DistributionStructure:
    """Classification of the joint distribution p_xb."""

    kind: str  # "general" or "product_uniform_x"
    marginal_b: np.ndarray | None = None


@dataclass(frozen=True)
class Ensemble:
    """States ``rho[x, b]`` (shape (N, L, d, d)) with weights ``p[x, b]``.

    Arrays are frozen after construction; all operations are pure.
    ``string_labels`` keeps original display labels when the input was
    canonicalized.
    """

    dim: int
    n_strings: int
    n_encodings: int
    states: np.ndarray
    probs: np.ndarray
    string_labels: tuple = field(default=None, compare=False)

    def __post_init__(self):
        states = np.ascontiguousarray(self.states, dtype=np.complex128)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        expected = (self.n_strings, self.n_encodings, self.dim, self.dim)
        if states.shape != expected:
            raise MissingPair(
                f"states array has shape {states.shape}, expected {expected}"
            )
        if probs.shape != (self.n_strings, self.n_encodings):
            raise MissingPair(
                f"probs array has shape {probs.shape}, "
                f"expected {(self.n_strings, self.n_encodings)}"
            )
        states.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)

    def state(self, x: int, b: int) -> np.ndarray:
        return self.states[x, b]

    def prob(self, x: int, b: int) -> float:
        return float(self.probs[x, b])

    def answer_vectors(self):
        """All N^L answer vectors in lexicographic order."""
        return itertools.product(range(self.n_strings), repeat=self.n_encodings)


def complement(v: AnswerVector) -> AnswerVector:
    """Bit-flipped answer vector (binary strings only)."""
    return tuple(1 - x for x in v)


def validate(e: Ensemble) -> DistributionStructure:
    """Check all ensemble invariants and classify the distribution.

    Raises ``InvalidState`` for a non-PSD or non-unit-trace state and
    ``InvalidDistribution`` when the weights are negative or do not sum
    to one.  Returns ``product_uniform_x`` iff p_xb = p_b / N throughout.
    """
    for x in range(e.n_strings):
        for b in range(e.n_encodings):
            rho = e.states[x, b]
            try:
                dec = linalg.eig(rho)
            except linalg.NonHermitianInput as exc:
                raise InvalidState(f"state ({x},{b}): {exc}") from exc
            if dec.eigenvalues[0] < -STATE_TOL:
                raise InvalidState(
                    f"state ({x},{b}) has eigenvalue {dec.eigenvalues[0]:.3e}"
                )
            tr = float(np.trace(rho).real)
            if abs(tr - 1.0) > STATE_TOL:
                raise InvalidState(f"state ({x},{b}) has trace {tr!r}")
    if not np.all(np.isfinite(e.probs)):
        raise InvalidDistribution("probabilities contain NaN or Inf")
    if e.probs.min() < 0.0:
        raise InvalidDistribution(f"negative probability {e.probs.min()!r}")
    total = float(e.probs.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise InvalidDistribution(f"probabilities sum to {total!r}")

    marginal_b = e.probs.sum(axis=0)
    if np.abs(e.probs - marginal_b[None, :] / e.n_strings).max() <= PROB_TOL:
        return DistributionStructure("product_uniform_x", marginal_b)
    return DistributionStructure("general")


def tau(e: Ensemble, v: AnswerVector) -> np.ndarray:
    """Weighted average state sum_b p[v_b, b] rho[v_b, b] for one answer vector."""
    idx = np.asarray(v)
    cols = np.arange(e.n_encodings)
    return np.einsum(
        "b,bij->ij", e.probs[idx, cols], e.states[idx, cols]
    )


def rho_avg(e: Ensemble, v: AnswerVector) -> np.ndarray:
    """Density matrix sum_b p_b rho[v_b, b]; requires p_xb = p_b / N."""
    structure = validate(e)
    if structure.kind != "product_uniform_x":
        raise NotProductUniform("rho_avg requires p_xb = p_b / N")
    idx = np.asarray(v)
    cols = np.arange(e.n_encodings)
    return np.einsum("b,bij->ij", structure.marginal_b, e.states[idx, cols])


def is_classical(e: Ensemble) -> bool:
    """True iff all states commute pairwise (Frobenius tolerance)."""
    mats = e.states.reshape(-1, e.dim, e.dim)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if linalg.commutator_norm(mats[i], mats[j]) > COMMUTATOR_TOL:
                return False
    return True


def relabel(e: Ensemble, v: AnswerVector) -> Ensemble:
    """Per-encoding swap of the two string labels where v_b = 1.

    The answer vector's b-th entry names the old label that becomes the
    new label 0 for encoding b; probabilities ride along.  Binary only.
    """
    if e.n_strings != 2:
        raise NotBinary(f"relabel requires N = 2, got N = {e.n_strings}")
    if len(v) != e.n_encodings or any(x not in (0, 1) for x in v):
        raise NotBinary(f"answer vector {v!r} invalid for L = {e.n_encodings}")
    states = np.array(e.states)
    probs = np.array(e.probs)
    for b, bit in enumerate(v):
        if bit == 1:
            states[:, b] = states[::-1, b]
            probs[:, b] = probs[::-1, b]
    return Ensemble(e.dim, 2, e.n_encodings, states, probs, e.string_labels)


def standard_view(e: Ensemble) -> Ensemble:
    """Single-encoding reduction: discriminate rho_x = sum_b p_{b|x} rho_xb.

    This is the problem Bob faces when he ignores (or never receives)
    the encoding label.  Strings with p_x = 0 keep a maximally mixed
    placeholder state.
    """
    p_x = e.probs.sum(axis=1)
    states = np.empty((e.n_strings, 1, e.dim, e.dim), dtype=np.complex128)
    for x in range(e.n_strings):
        if p_x[x] > 0.0:
            states[x, 0] = np.einsum("b,bij->ij", e.probs[x] / p_x[x], e.states[x])
        else:
            states[x, 0] = np.eye(e.dim) / e.dim
    return Ensemble(e.dim, e.n_strings, 1, states, p_x[:, None])


# -- JSON schema ---------------------------------------------------------------
#
# { "dimension": d, "strings": N, "encodings": L,
#   "items": [ { "x": int, "b": int, "prob": real, "matrix": [[[re, im], ...]] } ] }

def to_json_dict(e: Ensemble) -> dict:
    items = []
    for x in range(e.n_strings):
        for b in range(e.n_encodings):
            items.append(
                {
                    "x": x,
                    "b": b,
                    "prob": float(e.probs[x, b]),
                    "matrix": linalg.matrix_to_json(e.states[x, b]),
                }
            )
    return {
        "dimension": e.dim,
        "strings": e.n_strings,
        "encodings": e.n_encodings,
        "items": items,
    }


def from_json_dict(data: dict) -> Ensemble:
    try:
        d = int(data["dimension"])
        n = int(data["strings"])
        ll = int(data["encodings"])
        items = data["items"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"ensemble JSON missing field: {exc}") from exc
    states = np.full((n, ll, d, d), np.nan, dtype=np.complex128)
    probs = np.full((n, ll), np.nan)
    for item in items:
        x, b = int(item["x"]), int(item["b"])
        if not (0 <= x < n and 0 <= b < ll):
            raise ValueError(f"item ({x},{b}) outside {n} strings x {ll} encodings")
        mat = linalg.matrix_from_json(item["matrix"])
        if mat.shape != (d, d):
            raise ValueError(f"item ({x},{b}) matrix has shape {mat.shape}")
        states[x, b] = mat
        probs[x, b] = float(item["prob"])
    if np.isnan(probs).any():
        missing = [tuple(idx) for idx in np.argwhere(np.isnan(probs))]
        raise MissingPair(f"missing (x,b) pairs: {missing}")
    return Ensemble(d, n, ll, states, probs)


def save(e: Ensemble, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(e), fh, indent=1)


def load(path) -> Ensemble:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return from_json_dict(data)
