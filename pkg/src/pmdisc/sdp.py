"""SDP solver for discrimination with post-measurement information.

The dual program

    minimize tr(Q)  subject to  Q >= tau_x for every answer vector x

has a single d x d Hermitian variable regardless of how many answer
vectors there are, so we solve it with a logarithmic-barrier interior
point method:

    minimize tr(Q) - mu * sum_x log det(Q - tau_x)

with damped Newton steps, a backtracking line search that keeps every
slack matrix strictly positive definite, and a barrier shrink factor of
0.2.  The optimal measurement is recovered from the near-null spaces of
the slack matrices (complementary slackness), with the exactly feasible
central-path measurement mu * (Q - tau_x)^{-1} as a fallback candidate
when near-degenerate constraints blur the null spaces.  The reported
dual certificate is whichever feasible dual point has the smaller trace:
the final barrier iterate or the re-feasibilized sum sum_x tau_x M_x.

Standard state discrimination is the L = 1 special case of the same
program.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import ensemble as ens
from . import linalg
from .errors import ConvergenceFailure, IncompatiblePovm, TooManyAnswerVectors
from ._kernels import newton_system

DEFAULT_TOL = 1e-7
MAX_VECTORS = 4096
EPSILON_C = 1e-9      # POVM completeness / weak-duality slack
DEDUP_DECIMALS = 12   # constraints closer than 1e-12 are merged

_MU_SHRINK = 0.2
_MU_FLOOR = 1e-13
_ARMIJO = 0.25
_BACKTRACK = 0.5
_MAX_INNER = 60
_INNER_DECREMENT = 1e-11


@dataclass
class Povm:
    """Measurement operators keyed by answer vector (PMI) or string label."""

    outcomes: dict
    degenerate: bool = False

    def check(self, dim: int, tol: float = 1e-8) -> None:
        total = np.zeros((dim, dim), dtype=np.complex128)
        for key, op in self.outcomes.items():
            op = np.asarray(op)
            if op.shape != (dim, dim):
                raise IncompatiblePovm(
                    f"outcome {key!r} has shape {op.shape}, expected {(dim, dim)}"
                )
            if linalg.eig(op).eigenvalues[0] < -tol:
                raise IncompatiblePovm(f"outcome {key!r} is not PSD within {tol:.1e}")
            total += op
        if np.abs(total - np.eye(dim)).max() > tol:
            raise IncompatiblePovm("operators do not sum to the identity")


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    measurement: Povm
    dual_certificate: np.ndarray
    gap: float
    iterations: int


@dataclass
class OptimalityReport:
    """Lemma-style optimality check: Q = sum tau_x M_x Hermitian and dominant."""

    hermitian_ok: bool
    hermiticity_residual: float
    dominance_ok: bool
    worst_violation: float
    verdict: bool = field(init=False)

    def __post_init__(self):
        self.verdict = self.hermitian_ok and self.dominance_ok


@functools.lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Hilbert-Schmidt-orthonormal basis of d x d Hermitian matrices."""
    mats = []
    for i in range(d):
        m = np.zeros((d, d), dtype=np.complex128)
        m[i, i] = 1.0
        mats.append(m)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = inv_sqrt2
            m[j, i] = inv_sqrt2
            mats.append(m)
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = 1j * inv_sqrt2
            m[j, i] = -1j * inv_sqrt2
            mats.append(m)
    out = np.array(mats)
    out.flags.writeable = False
    return out


def _dedup(taus: np.ndarray):
    """Group constraints equal up to 1e-12 entrywise; keep first-seen order."""
    groups: dict[bytes, list[int]] = {}
    order = []
    rounded = np.round(taus, DEDUP_DECIMALS) + 0.0  # normalize -0.0
    for i in range(taus.shape[0]):
        key = rounded[i].tobytes()
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(i)
    unique_idx = [groups[k][0] for k in order]
    members = [groups[k] for k in order]
    return taus[unique_idx], members


def _chol_logdet_sum(slacks: np.ndarray):
    """Sum of log det over a stack of matrices; None unless all are PD."""
    try:
        chol = np.linalg.cholesky(slacks)
    except np.linalg.LinAlgError:
        return None
    diag = np.diagonal(chol, axis1=1, axis2=2).real
    if np.any(diag <= 0.0):
        return None
    return float(2.0 * np.log(diag).sum())


def _center(q, taus, mu, basis):
    """Newton centering of the barrier objective at fixed mu."""
    d = q.shape[0]
    eye = np.eye(d)
    iterations = 0
    logdet = _chol_logdet_sum(q[None] - taus)
    fval = float(np.trace(q).real) - mu * logdet
    for _ in range(_MAX_INNER):
        slacks = q[None] - taus
        winv = np.linalg.inv(slacks)
        winv = (winv + winv.conj().swapaxes(1, 2)) / 2
        hess, wsum = newton_system(basis, winv, mu)
        gmat = eye - mu * wsum
        grad = np.einsum("kij,ji->k", basis, gmat).real
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        decrement_sq = float(-grad @ step)
        if decrement_sq < _INNER_DECREMENT:
            break
        direction = np.einsum("k,kij->ij", step, basis)
        slope = float(grad @ step)
        t = 1.0
        accepted = False
        while t > 1e-14:
            q_try = q + t * direction
            logdet = _chol_logdet_sum(q_try[None] - taus)
            if logdet is not None:
                f_try = float(np.trace(q_try).real) - mu * logdet
                if f_try <= fval + _ARMIJO * t * slope:
                    q = linalg.hermitian_part(q_try)
                    fval = f_try
                    accepted = True
                    break
            t *= _BACKTRACK
        iterations += 1
        if not accepted:
            break
    return q, iterations


def _null_projectors(taus, q, tol):
    """Projector onto each slack matrix's near-null space (eigs < sqrt(tol))."""
    threshold = np.sqrt(tol)
    projectors = []
    for t in taus:
        w, v = np.linalg.eigh(linalg.hermitian_part(q - t))
        cols = v[:, w < threshold]
        projectors.append(cols @ cols.conj().T)
    return np.array(projectors)


def _normalize_povm(raw: np.ndarray, n_total: int):
    """Map raw PSD operators to a complete POVM via S^{-1/2} . S^{-1/2}.

    When S = sum raw is singular the raw operators are scaled to fit
    under the identity and the remainder is spread uniformly over all
    ``n_total`` answer vectors (returned separately per unique group).
    """
    d = raw.shape[1]
    total = linalg.hermitian_part(raw.sum(axis=0))
    w, v = np.linalg.eigh(total)
    if w.min() > 1e-10:
        inv_sqrt = (v * w**-0.5) @ v.conj().T
        normalized = np.einsum("ab,xbc,cd->xad", inv_sqrt, raw, inv_sqrt)
        remainder = np.zeros((d, d), dtype=np.complex128)
    else:
        scale = 1.0 / max(float(w.max()), 1.0)
        normalized = scale * raw
        remainder = np.eye(d) - scale * total
        remainder = linalg.hermitian_part(remainder) / n_total
    normalized = (normalized + normalized.conj().swapaxes(1, 2)) / 2
    return normalized, remainder


def _primal_value(taus_u, counts, m_per_unique, remainder):
    value = 0.0
    for t, m_u, c in zip(taus_u, m_per_unique, counts):
        value += float(np.trace(t @ m_u).real)
        value += float(c) * float(np.trace(t @ remainder).real)
    return value


def _solve_family(taus: np.ndarray, keys: list, dim: int, tol: float) -> SdpSolution:
    """Barrier solve of min tr(Q) s.t. Q >= tau_x, with primal recovery."""
    taus = np.ascontiguousarray(taus, dtype=np.complex128)
    n_total = taus.shape[0]
    taus_u, members = _dedup(taus)
    counts = np.array([len(g) for g in members], dtype=np.float64)
    m_u = taus_u.shape[0]
    basis = hermitian_basis(dim)
    eye = np.eye(dim)

    lam_max = max(float(np.linalg.eigvalsh(t)[-1]) for t in taus_u)
    q = (lam_max + 1.0) * eye
    mu = 1.0
    target_mu = 0.5 * tol / (m_u * dim)
    iterations = 0
    best_gap = np.inf
    best = None

    while True:
        q, its = _center(q, taus_u, mu, basis)
        iterations += its
        if mu <= target_mu:
            solution = _finalize(taus_u, members, counts, keys, q, mu, dim, tol,
                                 n_total, iterations)
            if solution.gap <= tol:
                return solution
            if solution.gap < best_gap:
                best_gap = solution.gap
                best = solution
            if mu < _MU_FLOOR:
                raise ConvergenceFailure(
                    f"duality gap {best_gap:.3e} stuck above tolerance {tol:.1e}",
                    last_dual=best.dual_value,
                )
        mu *= _MU_SHRINK


def _finalize(taus_u, members, counts, keys, q, mu, dim, tol, n_total, iterations):
    slacks = q[None] - taus_u
    winv = np.linalg.inv(slacks)
    winv = (winv + winv.conj().swapaxes(1, 2)) / 2

    # candidate A: complementary-slackness projectors
    raw_a = _null_projectors(taus_u, q, tol)
    cand_a, rem_a = _normalize_povm(raw_a, n_total)
    val_a = _primal_value(taus_u, counts, cand_a, rem_a)

    # candidate B: exactly feasible central-path measurement
    cand_b, rem_b = _normalize_povm(mu * winv, n_total)
    val_b = _primal_value(taus_u, counts, cand_b, rem_b)

    if val_a >= val_b:
        primal, m_per_unique, remainder = val_a, cand_a, rem_a
    else:
        primal, m_per_unique, remainder = val_b, cand_b, rem_b

    # feasible dual candidates: barrier iterate, and polished sum tau M + shift
    q_polish = np.zeros((dim, dim), dtype=np.complex128)
    for t, m_op in zip(taus_u, m_per_unique):
        q_polish += t @ m_op
    q_polish += np.einsum("u,uij->ij", counts, taus_u) @ remainder
    q_polish = linalg.hermitian_part(q_polish)
    shift = 0.0
    for t in taus_u:
        lo = float(np.linalg.eigvalsh(q_polish - t)[0])
        shift = max(shift, -lo)
    q_polish = q_polish + shift * np.eye(dim)

    candidates = [(float(np.trace(q).real), q), (float(np.trace(q_polish).real), q_polish)]
    dual, certificate = min(candidates, key=lambda c: c[0])

    outcomes = {}
    for group, m_op, c in zip(members, m_per_unique, counts):
        share = linalg.hermitian_part(m_op / c + remainder)
        for idx in group:
            outcomes[keys[idx]] = share
    measurement = Povm(outcomes)

    return SdpSolution(
        primal_value=primal,
        dual_value=dual,
        measurement=measurement,
        dual_certificate=certificate,
        gap=dual - primal,
        iterations=iterations,
    )


# -- public operations ---------------------------------------------------------

def solve_pmi(e: ens.Ensemble, tol: float = DEFAULT_TOL,
              max_vectors: int = MAX_VECTORS) -> SdpSolution:
    """Optimal success probability with post-measurement information.

    Measurement outcomes are answer vectors; the primal value equals the
    maximum of sum_x tr(M_x tau_x) over POVMs, and the returned
    ``dual_certificate`` dominates every tau_x within ``tol``.
    """
    ens.validate(e)
    n_total = e.n_strings**e.n_encodings
    if n_total > max_vectors:
        raise TooManyAnswerVectors(
            f"N^L = {n_total} exceeds the cap of {max_vectors}"
        )
    keys = list(e.answer_vectors())
    taus = np.array([ens.tau(e, v) for v in keys])
    return _solve_family(taus, keys, e.dim, tol)


def solve_standard(e: ens.Ensemble, tol: float = DEFAULT_TOL) -> SdpSolution:
    """Optimal standard discrimination (no post-measurement information).

    Multi-encoding ensembles are first reduced to the single-encoding
    problem of discriminating rho_x = sum_b p_{b|x} rho_xb with prior p_x.
    Outcomes are keyed by string label.
    """
    ens.validate(e)
    if e.n_encodings != 1:
        e = ens.standard_view(e)
    keys = list(range(e.n_strings))
    taus = np.array([e.probs[x, 0] * e.states[x, 0] for x in keys])
    return _solve_family(taus, keys, e.dim, tol)


def certify(e: ens.Ensemble, m: Povm, tol: float = DEFAULT_TOL) -> OptimalityReport:
    """Check the if-and-only-if optimality conditions for a measurement.

    Builds Q = sum_x tau_x M_x and reports the Hermiticity residual and
    the worst dominance violation min_x lambda_min(Q - tau_x); verdict is
    true iff both are within ``tol``.  Missing outcome keys are treated
    as zero operators.
    """
    keys = list(m.outcomes.keys())
    if not keys:
        raise IncompatiblePovm("empty POVM")
    pmi_mode = all(isinstance(k, tuple) for k in keys)
    if pmi_mode:
        if any(len(k) != e.n_encodings for k in keys):
            raise IncompatiblePovm("answer-vector keys have the wrong length")
        full_keys = list(e.answer_vectors())
        taus = {v: ens.tau(e, v) for v in full_keys}
    elif all(isinstance(k, (int, np.integer)) for k in keys):
        sv = e if e.n_encodings == 1 else ens.standard_view(e)
        full_keys = list(range(sv.n_strings))
        taus = {x: sv.probs[x, 0] * sv.states[x, 0] for x in full_keys}
    else:
        raise IncompatiblePovm(f"mixed or unsupported key types: {keys[:4]!r}")
    known = set(full_keys)
    if any(k not in known for k in keys):
        raise IncompatiblePovm("POVM keyed by labels outside the ensemble index set")
    m.check(e.dim)

    q_raw = np.zeros((e.dim, e.dim), dtype=np.complex128)
    for key, op in m.outcomes.items():
        q_raw += taus[key] @ np.asarray(op)
    residual = float(np.linalg.norm(q_raw - q_raw.conj().T))
    q_h = linalg.hermitian_part(q_raw)
    worst = min(
        float(np.linalg.eigvalsh(linalg.hermitian_part(q_h - taus[k]))[0])
        for k in full_keys
    )
    return OptimalityReport(
        hermitian_ok=residual <= tol,
        hermiticity_residual=residual,
        dominance_ok=worst >= -tol,
        worst_violation=worst,
    )


def delta(e: ens.Ensemble, tol: float = DEFAULT_TOL) -> float:
    """Value of post-measurement information: p_succ^PI - p_succ."""
    pmi = solve_pmi(e, tol)
    std = solve_standard(e, tol)
    return pmi.primal_value - std.primal_value


def delta_report(e: ens.Ensemble, tol: float = DEFAULT_TOL) -> dict:
    """Delta together with the residual-gap half width (reporting aid)."""
    pmi = solve_pmi(e, tol)
    std = solve_standard(e, tol)
    return {
        "delta": pmi.primal_value - std.primal_value,
        "half_width": pmi.gap + std.gap,
        "pmi": pmi.primal_value,
        "standard": std.primal_value,
    }


def answer_vector_keys(n_strings: int, n_encodings: int):
    return list(itertools.product(range(n_strings), repeat=n_encodings))
