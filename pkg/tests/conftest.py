"""Shared random-instance generators with fixed seeds."""

import numpy as np
import pytest

from pmdisc import clifford
from pmdisc import ensemble as ens


def random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_simplex(rng, k, floor=0.05):
    p = rng.uniform(floor, 1.0, size=k)
    return p / p.sum()


def random_product_uniform_ensemble(rng, d, n_strings, n_encodings):
    """p_xb = p_b / N with arbitrary states: the bounds' hypothesis class."""
    states = np.empty((n_strings, n_encodings, d, d), dtype=np.complex128)
    for x in range(n_strings):
        for b in range(n_encodings):
            states[x, b] = random_density(rng, d)
    p_b = random_simplex(rng, n_encodings)
    probs = np.tile(p_b / n_strings, (n_strings, 1))
    return ens.Ensemble(d, n_strings, n_encodings, states, probs)


def random_general_ensemble(rng, d, n_strings, n_encodings):
    states = np.empty((n_strings, n_encodings, d, d), dtype=np.complex128)
    for x in range(n_strings):
        for b in range(n_encodings):
            states[x, b] = random_density(rng, d)
    probs = random_simplex(rng, n_strings * n_encodings).reshape(
        n_strings, n_encodings
    )
    return ens.Ensemble(d, n_strings, n_encodings, states, probs)


def random_clifford_encoding(rng, n, n_encodings, unit=True):
    """Random unit coefficient vectors (or shorter, when unit=False)."""
    k = 2 * n + 1
    g0 = rng.standard_normal((n_encodings, k))
    g0 /= np.linalg.norm(g0, axis=1, keepdims=True)
    if not unit:
        g0 *= rng.uniform(0.1, 1.0, size=(n_encodings, 1))
    return clifford.make_encoding(n, g0, random_simplex(rng, n_encodings))


def random_classical_ensemble(rng, d):
    """Commuting equal-rank complementary binary two-encoding ensemble."""
    rank = d // 2
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u = np.linalg.qr(g)[0]
    states = np.empty((2, 2, d, d), dtype=np.complex128)
    for b in range(2):
        support = rng.permutation(d)[:rank]
        diag0 = np.zeros(d)
        diag0[support] = 1.0
        pi0 = (u * diag0) @ u.conj().T
        pi1 = np.eye(d) - pi0
        states[0, b] = pi0 / rank
        states[1, b] = pi1 / rank
    return ens.Ensemble(d, 2, 2, states, np.full((2, 2), 0.25))


def random_two_state_problem(rng, d):
    rho0 = random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    rho1 = random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    p = float(rng.uniform(0.1, 0.9))
    states = np.stack([rho0, rho1])[:, None]
    probs = np.array([[p], [1.0 - p]])
    return ens.Ensemble(d, 2, 1, states, probs), rho0, rho1, p


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)
