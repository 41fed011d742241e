"""Numba and numpy kernel paths must agree to rounding error."""

import numpy as np
import pytest

from pmdisc import _kernels
from pmdisc.sdp import hermitian_basis
from conftest import random_density

needs_numba = pytest.mark.skipif(
    not _kernels.HAVE_NUMBA, reason="numba unavailable or disabled"
)


def _slack_stack(rng, m, d):
    stack = np.empty((m, d, d), dtype=np.complex128)
    for i in range(m):
        stack[i] = np.linalg.inv(random_density(rng, d) + 0.3 * np.eye(d))
        stack[i] = (stack[i] + stack[i].conj().T) / 2
    return stack


def test_backend_reports_a_name():
    assert _kernels.BACKEND in ("numba", "numpy")


def test_newton_system_numpy_matches_reference(rng):
    basis = np.asarray(hermitian_basis(3))
    winv = _slack_stack(rng, 7, 3)
    mu = 0.37
    h, wsum = _kernels.newton_system_numpy(basis, winv, mu)
    k = basis.shape[0]
    ref = np.empty((k, k))
    for a in range(k):
        for b in range(k):
            ref[a, b] = mu * sum(
                np.trace(basis[a] @ w @ basis[b] @ w).real for w in winv
            )
    assert np.abs(h - ref).max() < 1e-12
    assert np.allclose(wsum, winv.sum(axis=0))
    assert np.abs(h - h.T).max() < 1e-12


@needs_numba
def test_newton_system_backends_agree(rng):
    for d, m in ((2, 5), (3, 9), (4, 6)):
        basis = np.asarray(hermitian_basis(d))
        winv = _slack_stack(rng, m, d)
        h_np, w_np = _kernels.newton_system_numpy(basis, winv, 0.12)
        h_nb, w_nb = _kernels.newton_system_numba(basis, winv, 0.12)
        assert np.abs(h_np - h_nb).max() < 1e-10
        assert np.abs(w_np - w_nb).max() < 1e-12


def _grid_inputs(rng, n, l, axes_count):
    axes = rng.standard_normal((axes_count, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    bloch = rng.uniform(-1, 1, size=(n, l, 3))
    bloch /= np.maximum(np.linalg.norm(bloch, axis=2, keepdims=True), 1.0)
    probs = rng.uniform(0.01, 1.0, size=(n, l))
    probs /= probs.sum()
    return axes, bloch, probs


@needs_numba
def test_grid_scores_backends_agree(rng):
    axes, bloch, probs = _grid_inputs(rng, 3, 2, 400)
    pmi_np = _kernels.grid_scores_pmi_numpy(axes, bloch, probs)
    pmi_nb = _kernels.grid_scores_pmi_numba(axes, bloch, probs)
    assert np.abs(pmi_np - pmi_nb).max() < 1e-13

    bloch1 = bloch[:, 0, :]
    probs1 = probs.sum(axis=1)
    std_np = _kernels.grid_scores_standard_numpy(axes, bloch1, probs1)
    std_nb = _kernels.grid_scores_standard_numba(axes, bloch1, probs1)
    assert np.abs(std_np - std_nb).max() < 1e-13


def test_numpy_fallback_env_flag():
    import subprocess
    import sys

    code = (
        "import os; os.environ['PMDISC_NO_NUMBA'] = '1'; "
        "from pmdisc import _kernels; "
        "assert _kernels.BACKEND == 'numpy'; "
        "assert _kernels.newton_system is _kernels.newton_system_numpy; "
        "print('ok')"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "ok"


def test_solver_identical_under_both_backends():
    import subprocess
    import sys

    code = (
        "from pmdisc import fixtures, sdp; "
        "print(repr(sdp.solve_pmi(fixtures.bb84_ensemble()).primal_value))"
    )
    runs = {}
    for flag in ("0", "1"):
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True,
            check=True, env={"PMDISC_NO_NUMBA": flag, "PATH": "/usr/bin:/bin"},
        )
        runs[flag] = out.stdout.strip()
    assert runs["0"] == runs["1"]
