"""Non-local games and the classical no-relabeling obstruction.

For binary two-encoding ensembles the two partition discrimination
problems embed into the CHSH game: Alice measures the ensemble's support
projectors, Bob solves the partition problem his question names, and the
pair wins with probability (p1 + p2) / 2.  Commuting projectors admit a
classical strategy of the same value, so classical ensembles obey
(p1 + p2) / 2 <= 3/4 and no per-encoding relabeling can push the
no-information success probability to the PMI value of 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import ensemble as ens
from . import linalg, oracles, sdp
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    NotClassical,
    WrongShape,
)

STRATEGY_BUDGET = 10**7
CLASSICAL_CHSH_BOUND = 0.75
USELESS_DELTA_TOL = 1e-5   # delta below this counts as "PMI useless"
_SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class NonlocalGame:
    """Question distribution pi(s,t) plus a total win predicate."""

    n_questions_a: int
    n_questions_b: int
    n_answers_a: int
    n_answers_b: int
    pi: np.ndarray
    win: np.ndarray  # bool, indexed [s, t, a, b]

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        if pi.shape != (self.n_questions_a, self.n_questions_b):
            raise ValueError(f"pi has shape {pi.shape}")
        if abs(pi.sum() - 1.0) > 1e-12 or pi.min() < 0.0:
            raise ValueError("question distribution invalid")
        expected = (
            self.n_questions_a,
            self.n_questions_b,
            self.n_answers_a,
            self.n_answers_b,
        )
        if self.win.shape != expected:
            raise ValueError(f"win table has shape {self.win.shape}")


@dataclass(frozen=True)
class QuantumStrategy:
    """Shared bipartite state plus per-question POVMs for both players."""

    shared_state: np.ndarray
    alice_povms: tuple  # alice_povms[s][a] acts on the first factor
    bob_povms: tuple    # bob_povms[t][b] acts on the second factor


def chsh_game() -> NonlocalGame:
    """Uniform questions, win iff a + b mod 2 equals s * t."""
    win = np.zeros((2, 2, 2, 2), dtype=bool)
    for s, t, a, b in itertools.product(range(2), repeat=4):
        win[s, t, a, b] = (a + b) % 2 == s * t
    return NonlocalGame(2, 2, 2, 2, np.full((2, 2), 0.25), win)


def classical_value(g: NonlocalGame) -> float:
    """Exact maximum over deterministic strategies.

    Shared randomness is a convex mixture of deterministic strategies,
    so it cannot beat this maximum.  Bob's best response decouples per
    question, leaving |A|^|S| Alice assignments to enumerate.
    """
    if g.n_questions_a * g.n_questions_b * g.n_answers_a * g.n_answers_b > STRATEGY_BUDGET:
        raise BudgetExceeded("game too large for exact enumeration")
    if g.n_answers_a**g.n_questions_a * g.n_questions_b > STRATEGY_BUDGET:
        raise BudgetExceeded("too many deterministic strategies to enumerate")
    pw = g.pi[:, :, None, None] * g.win  # pi(s,t) on winning entries
    best = -np.inf
    for fa in itertools.product(range(g.n_answers_a), repeat=g.n_questions_a):
        # value[t, b] = sum_s pw[s, t, fa[s], b]; Bob optimizes per t
        value = sum(pw[s, :, a, :] for s, a in enumerate(fa))
        total = float(value.max(axis=1).sum())
        if total > best:
            best = total
    return best


def quantum_value_of(strategy: QuantumStrategy, g: NonlocalGame) -> float:
    """Winning probability of a fixed strategy (no optimization)."""
    dim_a = strategy.alice_povms[0][0].shape[0]
    dim_b = strategy.bob_povms[0][0].shape[0]
    rho = np.asarray(strategy.shared_state)
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionMismatch(
            f"shared state has shape {rho.shape}, expected "
            f"{(dim_a * dim_b, dim_a * dim_b)}"
        )
    if len(strategy.alice_povms) != g.n_questions_a or len(
        strategy.bob_povms
    ) != g.n_questions_b:
        raise DimensionMismatch("POVM count does not match the question sets")
    total = 0.0
    for s in range(g.n_questions_a):
        if len(strategy.alice_povms[s]) != g.n_answers_a:
            raise DimensionMismatch(f"Alice POVM {s} has the wrong outcome count")
        for t in range(g.n_questions_b):
            if len(strategy.bob_povms[t]) != g.n_answers_b:
                raise DimensionMismatch(f"Bob POVM {t} has the wrong outcome count")
            if g.pi[s, t] == 0.0:
                continue
            for a in range(g.n_answers_a):
                for b in range(g.n_answers_b):
                    if not g.win[s, t, a, b]:
                        continue
                    op = np.kron(strategy.alice_povms[s][a], strategy.bob_povms[t][b])
                    total += g.pi[s, t] * float(np.trace(op @ rho).real)
    return total


def optimal_chsh_strategy() -> QuantumStrategy:
    """Maximally entangled pair with rotated bases: value 1/2 + 1/(2 sqrt 2)."""
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    eye = np.eye(2, dtype=np.complex128)
    psi = np.zeros(4, dtype=np.complex128)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    shared = np.outer(psi, psi.conj())

    def basis(op):
        return ((eye + op) / 2, (eye - op) / 2)

    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    return QuantumStrategy(
        shared_state=shared,
        alice_povms=(basis(z), basis(x)),
        bob_povms=(basis((z + x) * inv_sqrt2), basis((z - x) * inv_sqrt2)),
    )


# -- classical ensembles as CHSH strategies ------------------------------------

@dataclass(frozen=True)
class ClassicalEnsembleView:
    """Support projectors of an equal-rank complementary binary ensemble."""

    projectors: dict
    rank: int


def _support_projector(rho: np.ndarray) -> tuple[np.ndarray, int]:
    dec = linalg.eig(rho)
    cols = dec.eigenvectors[:, dec.eigenvalues > _SUPPORT_TOL]
    return cols @ cols.conj().T, cols.shape[1]


def support_structure(e: ens.Ensemble, require_commuting: bool = True) -> ClassicalEnsembleView:
    """Extract {Pi_xb} and verify the equal-rank complementary hypothesis.

    Requires Pi_0b + Pi_1b = I for every encoding, equal ranks, and
    rho_xb = Pi_xb / r.  Raises ``WrongShape`` when the structure fails
    and ``NotClassical`` when commutation is required but absent.
    """
    if require_commuting and not ens.is_classical(e):
        raise NotClassical("ensemble states do not commute")
    projectors = {}
    ranks = set()
    for x in range(e.n_strings):
        for b in range(e.n_encodings):
            proj, rank = _support_projector(e.states[x, b])
            projectors[(x, b)] = proj
            ranks.add(rank)
    if len(ranks) != 1:
        raise WrongShape(f"support ranks differ: {sorted(ranks)}")
    rank = ranks.pop()
    eye = np.eye(e.dim)
    for b in range(e.n_encodings):
        if np.abs(projectors[(0, b)] + projectors[(1, b)] - eye).max() > 1e-8:
            raise WrongShape(f"supports for encoding {b} are not complementary")
    for (x, b), proj in projectors.items():
        if np.abs(e.states[x, b] - proj / rank).max() > 1e-8:
            raise WrongShape(f"state ({x},{b}) is not Pi / rank")
    return ClassicalEnsembleView(projectors=projectors, rank=rank)


def _check_binary_uniform(e: ens.Ensemble) -> None:
    if e.n_strings != 2 or e.n_encodings != 2:
        raise WrongShape(
            f"need N = 2 strings and L = 2 encodings, got N = {e.n_strings}, "
            f"L = {e.n_encodings}"
        )
    if np.abs(e.probs - 0.25).max() > 1e-12:
        raise WrongShape("need the uniform joint distribution p_xb = 1/4")


_PARTITION_MEMBERS = {0: ((0, 0), (1, 1)), 1: ((0, 1), (1, 0))}


def partition_states(e: ens.Ensemble, t: int):
    """Average states of partition t, ordered by the first vector entry."""
    members = _PARTITION_MEMBERS[t]
    return tuple(ens.rho_avg(e, m) for m in members)


def strategy_from_discrimination(e: ens.Ensemble) -> QuantumStrategy:
    """CHSH strategy winning with probability (p1 + p2) / 2.

    Alice measures {(d/2) conj(rho_0s), (d/2) conj(rho_1s)} on the
    question s; for equal-rank projector ensembles these are exactly the
    (conjugated) support projectors.  Bob measures the Helstrom-optimal
    measurement of the partition problem his question names and answers
    with the first entry of his guessed answer vector.  The shared state
    steers Bob's system to rho_ab with uniform outcomes: the maximally
    correlated extension in the common eigenbasis for classical
    ensembles, the maximally entangled state otherwise.  Requires the
    per-encoding balance rho_0b + rho_1b = (2/d) I, without which no
    shared state reproduces the ensemble this way.
    """
    _check_binary_uniform(e)
    d = e.dim
    for b in range(2):
        balance = e.states[0, b] + e.states[1, b] - (2.0 / d) * np.eye(d)
        if np.abs(balance).max() > 1e-9:
            raise WrongShape(
                f"encoding {b} violates rho_0b + rho_1b = (2/d) I; "
                "the CHSH embedding does not apply"
            )

    alice = tuple(
        (
            linalg.hermitian_part(0.5 * d * e.states[0, s].conj()),
            linalg.hermitian_part(0.5 * d * e.states[1, s].conj()),
        )
        for s in range(2)
    )
    bob = []
    for t in range(2):
        sigma0, sigma1 = partition_states(e, t)
        bob.append(oracles.helstrom_measurement(sigma0, sigma1, 0.5))
    if ens.is_classical(e):
        mats = [e.states[x, b] for x in range(2) for b in range(2)]
        u = oracles.simultaneous_diagonalization(mats)
        shared = np.zeros((d * d, d * d), dtype=np.complex128)
        for k in range(d):
            vec = np.kron(u[:, k].conj(), u[:, k])
            shared += np.outer(vec, vec.conj()) / d
    else:
        psi = np.zeros(d * d, dtype=np.complex128)
        for k in range(d):
            psi[k * d + k] = 1.0 / np.sqrt(d)
        shared = np.outer(psi, psi.conj())
    return QuantumStrategy(
        shared_state=shared, alice_povms=alice, bob_povms=tuple(bob)
    )


@dataclass
class NoRelabelingReport:
    """Outcome of the classical no-relabeling theorem check.

    Only the two per-encoding swaps (0,1) and (1,0) are examined; they
    are the partition-induced relabelings of the binary two-encoding
    setting.
    """

    p1: float
    p2: float
    game_value: float
    classical_bound: float
    bound_ok: bool
    info_hypothesis: bool  # p1 > 1/2: information without PMI
    p2_upper_bound: float  # 3/2 - p1, binding when the hypothesis holds
    relabeling_deltas: dict
    relabeling_useless_possible: bool = field(init=False)

    def __post_init__(self):
        self.relabeling_useless_possible = any(
            d <= USELESS_DELTA_TOL for d in self.relabeling_deltas.values()
        )


def no_relabeling_check(e: ens.Ensemble, tol: float = sdp.DEFAULT_TOL) -> NoRelabelingReport:
    """Verify the CHSH obstruction on a classical binary ensemble.

    Computes the two partition success probabilities, checks
    (p1 + p2) / 2 against the classical CHSH value, and evaluates the
    post-measurement-information gain left by each candidate relabeling.
    """
    _check_binary_uniform(e)
    support_structure(e, require_commuting=True)
    values = []
    for t in range(2):
        sigma0, sigma1 = partition_states(e, t)
        states = np.stack([sigma0, sigma1])[:, None]
        problem = ens.Ensemble(e.dim, 2, 1, states, np.full((2, 1), 0.5))
        values.append(sdp.solve_standard(problem, tol).primal_value)
    p1, p2 = values
    deltas = {
        v: sdp.delta(ens.relabel(e, v), tol) for v in ((0, 1), (1, 0))
    }
    return NoRelabelingReport(
        p1=p1,
        p2=p2,
        game_value=(p1 + p2) / 2.0,
        classical_bound=CLASSICAL_CHSH_BOUND,
        bound_ok=(p1 + p2) / 2.0 <= CLASSICAL_CHSH_BOUND + tol,
        info_hypothesis=p1 > 0.5 + tol,
        p2_upper_bound=1.5 - p1,
        relabeling_deltas=deltas,
    )
