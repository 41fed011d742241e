"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Two inner loops dominate runtime: assembling the Newton system of the
barrier SDP solver (one dense contraction per constraint per iteration)
and scoring measurement axes in the qubit grid-search oracle.  Both are
implemented twice, once with ``numba.njit`` and once with vectorized
numpy.  Set the environment variable ``PMDISC_NO_NUMBA=1`` to force the
numpy path; the numpy path is also used automatically when numba is not
importable.  ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("PMDISC_NO_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("numba disabled via PMDISC_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    njit = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# Newton system of the dual log-det barrier
#
# H[k,l] = mu * sum_x Re tr(B_k W_x B_l W_x)      (K x K, real symmetric)
# wsum   = sum_x W_x
#
# where B is a Hilbert-Schmidt-orthonormal Hermitian basis (K = d^2) and
# W_x = (Q - tau_x)^{-1} are the inverted slack matrices.
# ---------------------------------------------------------------------------

def newton_system_numpy(basis: np.ndarray, winv: np.ndarray, mu: float):
    """Barrier Hessian and slack-inverse sum, vectorized over constraints."""
    m, d, _ = winv.shape
    k = basis.shape[0]
    h = np.zeros((k, k))
    # chunk over constraints to bound the (chunk, K, d, d) intermediate
    chunk = max(1, int(2_000_000 // max(1, k * d * d)))
    for lo in range(0, m, chunk):
        w = winv[lo:lo + chunk]
        bw = np.einsum("kab,xbc->xkac", basis, w, optimize=True)
        h += np.einsum("xkij,xlji->kl", bw, bw, optimize=True).real
    wsum = winv.sum(axis=0)
    return mu * h, wsum


if HAVE_NUMBA:

    @njit(cache=True)
    def _newton_system_numba(basis, winv, mu):
        m, d, _ = winv.shape
        k = basis.shape[0]
        h = np.zeros((k, k))
        wsum = np.zeros((d, d), dtype=np.complex128)
        bw = np.empty((k, d, d), dtype=np.complex128)
        for x in range(m):
            w = winv[x]
            wsum += w
            for a in range(k):
                bw[a] = np.dot(basis[a], w)
            for a in range(k):
                for b in range(a, k):
                    acc = 0.0
                    for i in range(d):
                        for j in range(d):
                            acc += (bw[a, i, j] * bw[b, j, i]).real
                    h[a, b] += acc
                    if a != b:
                        h[b, a] += acc
        return mu * h, wsum

    def newton_system_numba(basis, winv, mu):
        return _newton_system_numba(
            np.ascontiguousarray(basis), np.ascontiguousarray(winv), mu
        )

else:
    newton_system_numba = None


# ---------------------------------------------------------------------------
# Grid-search oracle scoring (qubit Bloch geometry)
#
# PMI mode: score(a) = sum_{s=+,-} sum_b max_x p[x,b] * (1 + s a.r[x,b]) / 2
# standard: score(a) = sum_{s=+,-}        max_x p[x]   * (1 + s a.r[x])   / 2
# ---------------------------------------------------------------------------

def grid_scores_pmi_numpy(axes: np.ndarray, bloch: np.ndarray, probs: np.ndarray):
    """Per-axis PMI success, optimal decoding of (outcome, encoding) pairs."""
    # dots: (K, N, L)
    dots = np.einsum("ka,xba->kxb", axes, bloch)
    plus = (probs[None, :, :] * (1.0 + dots) * 0.5).max(axis=1).sum(axis=1)
    minus = (probs[None, :, :] * (1.0 - dots) * 0.5).max(axis=1).sum(axis=1)
    return plus + minus


def grid_scores_standard_numpy(axes: np.ndarray, bloch: np.ndarray, probs: np.ndarray):
    dots = np.einsum("ka,xa->kx", axes, bloch)
    plus = (probs[None, :] * (1.0 + dots) * 0.5).max(axis=1)
    minus = (probs[None, :] * (1.0 - dots) * 0.5).max(axis=1)
    return plus + minus


if HAVE_NUMBA:

    @njit(cache=True)
    def _grid_scores_pmi_numba(axes, bloch, probs):
        kk = axes.shape[0]
        n, ll = probs.shape
        out = np.empty(kk)
        for k in range(kk):
            total = 0.0
            for b in range(ll):
                best_p = -1.0
                best_m = -1.0
                for x in range(n):
                    dot = (
                        axes[k, 0] * bloch[x, b, 0]
                        + axes[k, 1] * bloch[x, b, 1]
                        + axes[k, 2] * bloch[x, b, 2]
                    )
                    vp = probs[x, b] * (1.0 + dot) * 0.5
                    vm = probs[x, b] * (1.0 - dot) * 0.5
                    if vp > best_p:
                        best_p = vp
                    if vm > best_m:
                        best_m = vm
                total += best_p + best_m
            out[k] = total
        return out

    @njit(cache=True)
    def _grid_scores_standard_numba(axes, bloch, probs):
        kk = axes.shape[0]
        n = probs.shape[0]
        out = np.empty(kk)
        for k in range(kk):
            best_p = -1.0
            best_m = -1.0
            for x in range(n):
                dot = (
                    axes[k, 0] * bloch[x, 0]
                    + axes[k, 1] * bloch[x, 1]
                    + axes[k, 2] * bloch[x, 2]
                )
                vp = probs[x] * (1.0 + dot) * 0.5
                vm = probs[x] * (1.0 - dot) * 0.5
                if vp > best_p:
                    best_p = vp
                if vm > best_m:
                    best_m = vm
            out[k] = best_p + best_m
        return out

    def grid_scores_pmi_numba(axes, bloch, probs):
        return _grid_scores_pmi_numba(
            np.ascontiguousarray(axes),
            np.ascontiguousarray(bloch),
            np.ascontiguousarray(probs),
        )

    def grid_scores_standard_numba(axes, bloch, probs):
        return _grid_scores_standard_numba(
            np.ascontiguousarray(axes),
            np.ascontiguousarray(bloch),
            np.ascontiguousarray(probs),
        )

else:
    grid_scores_pmi_numba = None
    grid_scores_standard_numba = None


# -- dispatch ----------------------------------------------------------------

if HAVE_NUMBA:
    BACKEND = "numba"
    newton_system = newton_system_numba
    grid_scores_pmi = grid_scores_pmi_numba
    grid_scores_standard = grid_scores_standard_numba
else:
    BACKEND = "numpy"
    newton_system = newton_system_numpy
    grid_scores_pmi = grid_scores_pmi_numpy
    grid_scores_standard = grid_scores_standard_numpy
