"""Partition machinery and analytic bounds on the PMI success probability.

Both bounds assume the string is uniform and independent of the encoding
(p_xb = p_b / N).  The lower bound solves, for each cyclic-shift
partition of the answer vectors, the standard discrimination problem
over the average states rho_x = sum_b p_b rho_{x_b b}; the upper bound
is the alpha-power trace expression (1/N) tr[(sum_x rho_x^alpha)^(1/alpha)].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import ensemble as ens
from . import linalg, sdp
from .errors import AlphaOutOfRange, CapExceeded, NotProductUniform

DEFAULT_ALPHAS = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


@dataclass(frozen=True)
class Partition:
    """N answer vectors generated by cyclic shifts of a length-(L-1) label."""

    label: tuple
    members: tuple

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise CapExceeded(f"partition {self.label} has repeated members")


def enumerate_partitions(n_strings: int, n_encodings: int,
                         cap: int = sdp.MAX_VECTORS) -> list[Partition]:
    """All N^(L-1) disjoint partitions, labels in lexicographic order.

    Member j of partition y is (y_1 + j, ..., y_{L-1} + j, j) mod N, so
    the union over labels covers every answer vector exactly once.
    """
    if n_strings**n_encodings > cap:
        raise CapExceeded(
            f"N^L = {n_strings**n_encodings} exceeds the cap of {cap}"
        )
    partitions = []
    for label in itertools.product(range(n_strings), repeat=n_encodings - 1):
        members = tuple(
            tuple((y + j) % n_strings for y in label) + (j,)
            for j in range(n_strings)
        )
        partitions.append(Partition(label=label, members=members))
    return partitions


def _require_product_uniform(e: ens.Ensemble) -> np.ndarray:
    structure = ens.validate(e)
    if structure.kind != "product_uniform_x":
        raise NotProductUniform(
            "bounds require the string to be uniform and independent of the encoding"
        )
    return structure.marginal_b


def partition_problem(e: ens.Ensemble, partition: Partition) -> ens.Ensemble:
    """Standard problem: discriminate {rho_x : x in T_y} with uniform prior."""
    marginal_b = _require_product_uniform(e)
    cols = np.arange(e.n_encodings)
    states = np.empty((e.n_strings, 1, e.dim, e.dim), dtype=np.complex128)
    for j, member in enumerate(partition.members):
        idx = np.asarray(member)
        states[j, 0] = np.einsum("b,bij->ij", marginal_b, e.states[idx, cols])
    probs = np.full((e.n_strings, 1), 1.0 / e.n_strings)
    return ens.Ensemble(e.dim, e.n_strings, 1, states, probs)


def lower_bound(e: ens.Ensemble, tol: float = sdp.DEFAULT_TOL,
                cap: int = sdp.MAX_VECTORS) -> tuple[float, Partition]:
    """max over partitions of the standard-discrimination success.

    Returns the best value and its partition; ties keep the
    lexicographically first label.
    """
    _require_product_uniform(e)
    best_value = -np.inf
    best_partition = None
    for partition in enumerate_partitions(e.n_strings, e.n_encodings, cap):
        value = sdp.solve_standard(partition_problem(e, partition), tol).primal_value
        if value > best_value:
            best_value = value
            best_partition = partition
    return best_value, best_partition


def upper_bound(e: ens.Ensemble, alpha: float,
                cap: int = sdp.MAX_VECTORS) -> float:
    """(1/N) tr[(sum over all answer vectors of rho_x^alpha)^(1/alpha)].

    Valid for every alpha > 1.  Accumulation is in lexicographic answer
    vector order for bit-reproducible sums.  At large alpha, eigenvalues
    below ~1e-308^(1/alpha) underflow and drop out of the sum, which can
    only lower the computed value by a few parts in 1e-5 at alpha = 64.
    """
    if alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha}")
    marginal_b = _require_product_uniform(e)
    if e.n_strings**e.n_encodings > cap:
        raise CapExceeded(
            f"N^L = {e.n_strings ** e.n_encodings} exceeds the cap of {cap}"
        )
    cols = np.arange(e.n_encodings)
    acc = np.zeros((e.dim, e.dim), dtype=np.complex128)
    for v in e.answer_vectors():
        idx = np.asarray(v)
        rho = np.einsum("b,bij->ij", marginal_b, e.states[idx, cols])
        acc += linalg.frac_power(rho, alpha)
    root = linalg.frac_power(acc, 1.0 / alpha)
    return float(np.trace(root).real) / e.n_strings


def best_upper_bound(e: ens.Ensemble, alphas=DEFAULT_ALPHAS,
                     cap: int = sdp.MAX_VECTORS) -> tuple[float, float]:
    """Min of the alpha-power bound over a grid; returns (value, argmin alpha)."""
    alphas = tuple(alphas)
    if not alphas:
        raise AlphaOutOfRange("alpha grid is empty")
    best_value = np.inf
    best_alpha = None
    for alpha in alphas:
        value = upper_bound(e, alpha, cap)
        if value < best_value:
            best_value = value
            best_alpha = alpha
    return best_value, best_alpha
