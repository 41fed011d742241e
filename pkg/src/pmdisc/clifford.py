"""Clifford-algebra encodings of a single bit and their closed-form analysis.

A bit x is encoded into rho_xb = (I + gamma_xb . Gamma) / d where the
Gamma_j are 2n+1 anti-commuting Hermitian generators on n qubits and the
coefficient vectors satisfy gamma_0b = -gamma_1b with norm at most one.
For these encodings the PMI problem splits into two-outcome partition
problems {v, complement(v)} whose optimal measurements and values are
closed form, so no SDP is needed; the SDP path serves as a cross-check.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import ensemble as ens
from . import sdp
from .errors import CapExceeded, DimensionCap

MAX_QUBITS = 6
MAX_ENCODINGS = 12   # bounds the 2^(L-1) partition representatives
TIE_TOL = 1e-12      # partition values closer than this count as tied

_PAULI_I = np.eye(2, dtype=np.complex128)
_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _kron_chain(mats):
    return reduce(np.kron, mats)


@dataclass(frozen=True)
class CliffordBasis:
    """2n+1 anti-commuting generators on n qubits (entries in {0, +-1, +-i})."""

    n: int
    dim: int
    generators: tuple


def jordan_wigner(n: int) -> CliffordBasis:
    """Jordan-Wigner representation of the Clifford generators.

    Gamma_{2j-1} = Y^(j-1) (x) Z (x) I^(n-j), Gamma_{2j} likewise with X,
    and Gamma_{2n+1} = i^(n^2) Gamma_1 ... Gamma_{2n}.  The product of the
    2n generators is anti-Hermitian exactly when C(2n, 2) is odd, i.e. for
    odd n, so the closing phase must be i for odd n and 1 for even n; any
    other phase breaks Hermiticity or the square-to-identity relation.
    All algebra relations hold exactly since every entry is an exact
    small Gaussian integer.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionCap(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
    generators = []
    for j in range(1, n + 1):
        prefix = [_PAULI_Y] * (j - 1)
        suffix = [_PAULI_I] * (n - j)
        generators.append(_kron_chain(prefix + [_PAULI_Z] + suffix))
        generators.append(_kron_chain(prefix + [_PAULI_X] + suffix))
    phase = 1j if n % 2 == 1 else 1.0
    last = phase * reduce(np.matmul, generators)
    generators.append(last)
    d = 2**n
    eye = np.eye(d, dtype=np.complex128)
    for a, ga in enumerate(generators):
        if not np.array_equal(ga, ga.conj().T) or not np.array_equal(ga @ ga, eye):
            raise AssertionError(f"generator {a + 1} violates the algebra")
        for gb in generators[a + 1:]:
            if np.any(ga @ gb + gb @ ga != 0.0):
                raise AssertionError("generators do not anti-commute exactly")
    for g in generators:
        g.flags.writeable = False
    return CliffordBasis(n=n, dim=d, generators=tuple(generators))


@dataclass(frozen=True)
class CliffordEncoding:
    """Coefficient vectors gamma[x, b] (shape (2, L, 2n+1)) plus encoding weights."""

    basis: CliffordBasis
    n_encodings: int
    gammas: np.ndarray
    enc_probs: np.ndarray

    def __post_init__(self):
        k = 2 * self.basis.n + 1
        gammas = np.ascontiguousarray(self.gammas, dtype=np.float64)
        probs = np.ascontiguousarray(self.enc_probs, dtype=np.float64)
        if gammas.shape != (2, self.n_encodings, k):
            raise ValueError(
                f"gammas shape {gammas.shape}, expected {(2, self.n_encodings, k)}"
            )
        if probs.shape != (self.n_encodings,):
            raise ValueError(f"enc_probs shape {probs.shape}")
        if np.abs(gammas[0] + gammas[1]).max() > 1e-12:
            raise ValueError("gamma_0b = -gamma_1b violated")
        norms = np.linalg.norm(gammas[0], axis=1)
        if norms.max() > 1.0 + 1e-12:
            raise ValueError(f"coefficient norm {norms.max()} exceeds 1")
        if probs.min() < 0.0 or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("encoding distribution invalid")
        gammas.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "enc_probs", probs)


def make_encoding(n: int, gammas0, enc_probs) -> CliffordEncoding:
    """Encoding from the x = 0 coefficient rows; x = 1 rows are their negatives."""
    gammas0 = np.asarray(gammas0, dtype=np.float64)
    return CliffordEncoding(
        basis=jordan_wigner(n),
        n_encodings=gammas0.shape[0],
        gammas=np.stack([gammas0, -gammas0]),
        enc_probs=np.asarray(enc_probs, dtype=np.float64),
    )


@dataclass(frozen=True)
class CliffordAnalysis:
    """Per-partition PMI values plus the argmax and the uselessness verdict."""

    per_partition: dict
    best: tuple
    p_pmi: float
    useless: bool


def build_state(c: CliffordEncoding, x: int, b: int) -> np.ndarray:
    """rho_xb = (I + gamma_xb . Gamma) / d."""
    d = c.basis.dim
    out = np.eye(d, dtype=np.complex128)
    for coeff, gamma in zip(c.gammas[x, b], c.basis.generators):
        out += coeff * gamma
    return out / d


def v_vector(c: CliffordEncoding, v: tuple) -> np.ndarray:
    """Weighted coefficient average sum_b p_b gamma[v_b, b]."""
    idx = np.asarray(v)
    cols = np.arange(c.n_encodings)
    return np.einsum("b,bk->k", c.enc_probs, c.gammas[idx, cols])


def average_state(c: CliffordEncoding, v: tuple) -> np.ndarray:
    """rho_v = sum_b p_b rho[v_b, b] = (I + v_vector . Gamma) / d."""
    d = c.basis.dim
    out = np.eye(d, dtype=np.complex128)
    for coeff, gamma in zip(v_vector(c, v), c.basis.generators):
        out += coeff * gamma
    return out / d


def closed_form_measurement(c: CliffordEncoding, v: tuple) -> sdp.Povm:
    """Optimal two-outcome measurement for the partition {v, complement(v)}.

    The outcomes are (I +- a . Gamma) / 2 with a the normalized average
    vector.  A vanishing average vector means any measurement is optimal;
    in that case the uniform POVM {I/2, I/2} is returned with the
    ``degenerate`` flag set.
    """
    d = c.basis.dim
    vvec = v_vector(c, v)
    norm = float(np.linalg.norm(vvec))
    vbar = ens.complement(v)
    if norm <= 1e-12:
        half = np.eye(d, dtype=np.complex128) / 2
        return sdp.Povm({tuple(v): half, vbar: half.copy()}, degenerate=True)
    axis = vvec / norm
    proj = np.zeros((d, d), dtype=np.complex128)
    for coeff, gamma in zip(axis, c.basis.generators):
        proj += coeff * gamma
    eye = np.eye(d, dtype=np.complex128)
    return sdp.Povm({tuple(v): (eye + proj) / 2, vbar: (eye - proj) / 2})


def q_certificate(c: CliffordEncoding, v: tuple) -> np.ndarray:
    """Scalar dual certificate (1 + ||v_vec||) / (2d) * I for the partition."""
    d = c.basis.dim
    norm = float(np.linalg.norm(v_vector(c, v)))
    return (1.0 + norm) / (2.0 * d) * np.eye(d, dtype=np.complex128)


def lambda_max_avg(c: CliffordEncoding, v: tuple) -> float:
    """Largest eigenvalue of the average state: (1 + ||v_vec||) / d."""
    return (1.0 + float(np.linalg.norm(v_vector(c, v)))) / c.basis.dim


def partition_value(c: CliffordEncoding, v: tuple) -> float:
    """Success probability (1 + ||v_vec||) / 2 of the partition problem."""
    return (1.0 + float(np.linalg.norm(v_vector(c, v)))) / 2.0


def analyze(c: CliffordEncoding) -> CliffordAnalysis:
    """Evaluate every partition representative and locate the optimum.

    Representatives are the 2^(L-1) answer vectors whose last entry is 0.
    Ties within ``TIE_TOL`` break toward the all-zeros representative
    (post-measurement information is then useless); remaining ties keep
    the lexicographically first vector.
    """
    ll = c.n_encodings
    if ll > MAX_ENCODINGS:
        raise CapExceeded(f"L = {ll} exceeds the cap of {MAX_ENCODINGS}")
    per_partition = {}
    best_value = -np.inf
    best = None
    for head in itertools.product((0, 1), repeat=ll - 1):
        v = head + (0,)
        value = partition_value(c, v)
        per_partition[v] = (v_vector(c, v), value)
        if value > best_value:
            best_value = value
            best = v
    zeros = (0,) * ll
    if per_partition[zeros][1] >= best_value - TIE_TOL:
        best = zeros
    return CliffordAnalysis(
        per_partition=per_partition,
        best=best,
        p_pmi=best_value,
        useless=(best == zeros),
    )


def make_useless(c: CliffordEncoding) -> tuple[CliffordEncoding, tuple]:
    """Relabel strings per encoding so the trivial partition is optimal.

    Applies the relabeling induced by the analyze() argmax: the new
    gamma_0b is the old gamma[v_b, b].  The PMI value is unchanged and
    post-measurement information becomes useless.
    """
    v = analyze(c).best
    cols = np.arange(c.n_encodings)
    new0 = c.gammas[np.asarray(v), cols]
    return make_encoding(c.basis.n, new0, c.enc_probs), v


def bloch_criterion(v0, v1) -> bool:
    """True iff ||v0 + v1|| >= ||v0 - v1|| (qubit uselessness criterion).

    For unit vectors this is the Bloch-angle condition theta <= pi/2.
    Non-unit inputs still evaluate the inequality but the pure-state
    reading does not apply; a ``NotUnitVectors`` warning is emitted.
    """
    import warnings

    from .errors import NotUnitVectors

    v0 = np.asarray(v0, dtype=np.float64)
    v1 = np.asarray(v1, dtype=np.float64)
    for v in (v0, v1):
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            warnings.warn(
                "bloch_criterion inputs are not unit vectors; the theta <= pi/2 "
                "pure-state interpretation does not apply",
                NotUnitVectors,
                stacklevel=2,
            )
            break
    return float(np.linalg.norm(v0 + v1)) >= float(np.linalg.norm(v0 - v1))


def to_ensemble(c: CliffordEncoding) -> ens.Ensemble:
    """Full two-string ensemble with the bit uniform: p_xb = p_b / 2."""
    d = c.basis.dim
    ll = c.n_encodings
    states = np.empty((2, ll, d, d), dtype=np.complex128)
    for x in range(2):
        for b in range(ll):
            states[x, b] = build_state(c, x, b)
    probs = np.tile(c.enc_probs / 2.0, (2, 1))
    return ens.Ensemble(d, 2, ll, states, probs)


def pmi_measurement(c: CliffordEncoding) -> sdp.Povm:
    """Optimal PMI measurement: the best partition's two outcomes, rest zero."""
    return closed_form_measurement(c, analyze(c).best)


def theta_encoding(theta: float) -> CliffordEncoding:
    """Qubit pair of pure-state encodings with Bloch angle theta, p_b = 1/2."""
    gammas0 = np.array(
        [[1.0, 0.0, 0.0], [np.cos(theta), np.sin(theta), 0.0]]
    )
    return make_encoding(1, gammas0, np.array([0.5, 0.5]))


def bb84_encoding() -> CliffordEncoding:
    """Computational basis (b = 0) and Hadamard basis (b = 1), theta = pi/2."""
    gammas0 = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return make_encoding(1, gammas0, np.array([0.5, 0.5]))


# -- JSON schema ---------------------------------------------------------------
#
# { "n": int, "L": int, "enc_probs": [reals],
#   "gammas": [ { "x": 0|1, "b": int, "vector": [2n+1 reals] } ] }

def to_json_dict(c: CliffordEncoding) -> dict:
    entries = []
    for x in range(2):
        for b in range(c.n_encodings):
            entries.append(
                {"x": x, "b": b, "vector": [float(g) for g in c.gammas[x, b]]}
            )
    return {
        "n": c.basis.n,
        "L": c.n_encodings,
        "enc_probs": [float(p) for p in c.enc_probs],
        "gammas": entries,
    }


def from_json_dict(data: dict) -> CliffordEncoding:
    n = int(data["n"])
    ll = int(data["L"])
    k = 2 * n + 1
    probs = np.asarray(data["enc_probs"], dtype=np.float64)
    gammas = np.full((2, ll, k), np.nan)
    for entry in data["gammas"]:
        x, b = int(entry["x"]), int(entry["b"])
        vec = np.asarray(entry["vector"], dtype=np.float64)
        if vec.shape != (k,):
            raise ValueError(f"gamma ({x},{b}) has length {vec.size}, expected {k}")
        gammas[x, b] = vec
    for b in range(ll):
        if np.isnan(gammas[0, b]).any() and np.isnan(gammas[1, b]).any():
            raise ValueError(f"no gamma vector given for encoding {b}")
        if np.isnan(gammas[0, b]).any():
            gammas[0, b] = -gammas[1, b]
        if np.isnan(gammas[1, b]).any():
            gammas[1, b] = -gammas[0, b]
    return CliffordEncoding(
        basis=jordan_wigner(n), n_encodings=ll, gammas=gammas, enc_probs=probs
    )


def save(c: CliffordEncoding, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(c), fh, indent=1)


def load(path) -> CliffordEncoding:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))
