"""Command-line front end emitting machine-readable JSON reports.

Exit codes: 0 success, 2 parse/schema error, 3 validation or hypothesis
failure, 4 numerical failure (the report then carries the last feasible
dual bound when one exists).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds, clifford, games, linalg, oracles, sdp
from . import ensemble as ens
from .errors import (
    ConvergenceFailure,
    InvalidDistribution,
    InvalidState,
    MissingPair,
    NotBinary,
    NotClassical,
    NotProductUniform,
    NotPsd,
    PmdiscError,
    TooManyAnswerVectors,
    WrongDimension,
    WrongShape,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

_VALIDATION_ERRORS = (
    InvalidState,
    InvalidDistribution,
    MissingPair,
    NotProductUniform,
    NotBinary,
    NotClassical,
    WrongShape,
    WrongDimension,
)
_NUMERICAL_ERRORS = (ConvergenceFailure, NotPsd, TooManyAnswerVectors)


class _Phases:
    """Per-phase wall-clock milliseconds."""

    def __init__(self):
        self.timings = {}
        self._start = time.perf_counter()

    def mark(self, name):
        now = time.perf_counter()
        self.timings[name] = round((now - self._start) * 1000.0, 3)
        self._start = now


def _digest(path: Path) -> dict:
    data = path.read_bytes()
    return {"path": str(path), "sha256": hashlib.sha256(data).hexdigest()}


def _load_json(path: Path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _ParseFailure(f"cannot parse {path}: {exc}") from exc


class _ParseFailure(Exception):
    pass


def _load_ensemble(path: Path) -> ens.Ensemble:
    data = _load_json(path)
    try:
        return ens.from_json_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise _ParseFailure(f"bad ensemble schema in {path}: {exc}") from exc


def _load_clifford(path: Path) -> clifford.CliffordEncoding:
    data = _load_json(path)
    try:
        return clifford.from_json_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise _ParseFailure(f"bad encoding schema in {path}: {exc}") from exc


def _solution_json(sol: sdp.SdpSolution) -> dict:
    measurement = []
    for key, op in sol.measurement.outcomes.items():
        json_key = list(key) if isinstance(key, tuple) else int(key)
        measurement.append({"key": json_key, "matrix": linalg.matrix_to_json(op)})
    return {
        "primal": sol.primal_value,
        "dual": sol.dual_value,
        "gap": sol.gap,
        "iterations": sol.iterations,
        "Q": linalg.matrix_to_json(sol.dual_certificate),
        "measurement": measurement,
    }


def _report_json(report: sdp.OptimalityReport) -> dict:
    return {
        "hermitian_ok": report.hermitian_ok,
        "hermiticity_residual": report.hermiticity_residual,
        "dominance_ok": report.dominance_ok,
        "worst_violation": report.worst_violation,
        "verdict": report.verdict,
    }


def cmd_validate(args, phases) -> dict:
    e = _load_ensemble(args.input)
    phases.mark("load")
    structure = ens.validate(e)
    classical = ens.is_classical(e)
    phases.mark("validate")
    results = {
        "valid": True,
        "dimension": e.dim,
        "strings": e.n_strings,
        "encodings": e.n_encodings,
        "distribution": structure.kind,
        "classical": classical,
    }
    if structure.marginal_b is not None:
        results["marginal_b"] = [float(p) for p in structure.marginal_b]
    return results


def cmd_solve(args, phases) -> dict:
    e = _load_ensemble(args.input)
    phases.mark("load")
    ens.validate(e)
    phases.mark("validate")
    if args.mode == "pmi":
        sol = sdp.solve_pmi(e, tol=args.tol, max_vectors=args.max_vectors)
    else:
        sol = sdp.solve_standard(e, tol=args.tol)
    phases.mark("solve")
    report = sdp.certify(e, sol.measurement, tol=args.tol)
    phases.mark("certify")
    return {
        "mode": args.mode,
        "solution": _solution_json(sol),
        "optimality": _report_json(report),
    }


def cmd_bound(args, phases) -> dict:
    e = _load_ensemble(args.input)
    phases.mark("load")
    results: dict = {}
    if args.mode in ("lower", "sandwich"):
        value, partition = bounds.lower_bound(e, tol=args.tol, cap=args.max_vectors)
        results["lower"] = value
        results["argmax_partition"] = list(partition.label)
        phases.mark("lower")
    if args.mode in ("upper", "sandwich"):
        value, alpha = bounds.best_upper_bound(e, args.alpha, cap=args.max_vectors)
        results["upper"] = value
        results["argmin_alpha"] = alpha
        phases.mark("upper")
    if args.mode == "sandwich":
        sol = sdp.solve_pmi(e, tol=args.tol, max_vectors=args.max_vectors)
        results["sdp"] = sol.primal_value
        results["sandwich_ok"] = bool(
            results["lower"] - 2 * args.tol
            <= sol.primal_value
            <= results["upper"] + 2 * args.tol
        )
        phases.mark("sdp")
    return results


def cmd_clifford(args, phases) -> dict:
    enc = _load_clifford(args.input)
    phases.mark("load")
    analysis = clifford.analyze(enc)
    phases.mark("analyze")
    if args.action == "analyze":
        return {
            "p_pmi": analysis.p_pmi,
            "best": list(analysis.best),
            "useless": analysis.useless,
            "per_partition": [
                {"partition": list(v), "value": value, "v_vector": [float(c) for c in vec]}
                for v, (vec, value) in sorted(analysis.per_partition.items())
            ],
        }
    if args.action == "measure":
        povm = clifford.closed_form_measurement(enc, analysis.best)
        phases.mark("measure")
        return {
            "partition": list(analysis.best),
            "degenerate": povm.degenerate,
            "outcomes": [
                {"key": list(key), "matrix": linalg.matrix_to_json(op)}
                for key, op in povm.outcomes.items()
            ],
        }
    # make-useless: write the relabeled encoding next to the input
    relabeled, vector = clifford.make_useless(enc)
    out_path = args.input.with_name(args.input.stem + "_useless.json")
    clifford.save(relabeled, out_path)
    after = clifford.analyze(relabeled)
    phases.mark("make-useless")
    return {
        "relabeling": list(vector),
        "output_path": str(out_path),
        "p_pmi": after.p_pmi,
        "useless_after": after.useless,
    }


def cmd_chsh(args, phases) -> dict:
    e = _load_ensemble(args.input)
    phases.mark("load")
    ens.validate(e)
    game = games.chsh_game()
    if ens.is_classical(e):
        report = games.no_relabeling_check(e, tol=args.tol)
        phases.mark("check")
        return {
            "path": "classical",
            "p1": report.p1,
            "p2": report.p2,
            "game_value": report.game_value,
            "classical_bound": report.classical_bound,
            "violation": report.game_value - report.classical_bound,
            "bound_ok": report.bound_ok,
            "info_hypothesis": report.info_hypothesis,
            "p2_upper_bound": report.p2_upper_bound,
            "relabeling_deltas": {
                str(list(k)): v for k, v in report.relabeling_deltas.items()
            },
            "relabeling_useless_possible": report.relabeling_useless_possible,
        }
    strategy = games.strategy_from_discrimination(e)
    value = games.quantum_value_of(strategy, game)
    p1 = sdp.solve_standard(
        _partition_ensemble(e, 0), tol=args.tol
    ).primal_value
    p2 = sdp.solve_standard(
        _partition_ensemble(e, 1), tol=args.tol
    ).primal_value
    phases.mark("strategy")
    return {
        "path": "quantum",
        "p1": p1,
        "p2": p2,
        "game_value": value,
        "classical_bound": games.CLASSICAL_CHSH_BOUND,
        "violation": value - games.CLASSICAL_CHSH_BOUND,
        "classical_bound_violated": value > games.CLASSICAL_CHSH_BOUND + args.tol,
    }


def _partition_ensemble(e: ens.Ensemble, t: int) -> ens.Ensemble:
    sigma0, sigma1 = games.partition_states(e, t)
    states = np.stack([sigma0, sigma1])[:, None]
    return ens.Ensemble(e.dim, 2, 1, states, np.full((2, 1), 0.5))


def cmd_verify(args, phases) -> dict:
    e = _load_ensemble(args.input)
    phases.mark("load")
    ens.validate(e)
    if args.oracle == "helstrom":
        sv = e if e.n_encodings == 1 else ens.standard_view(e)
        if sv.n_strings != 2:
            raise WrongShape("helstrom oracle needs a two-state problem")
        oracle = oracles.helstrom_two_state(
            sv.states[0, 0], sv.states[1, 0], float(sv.probs[0, 0])
        )
        solver = sdp.solve_standard(e, tol=args.tol).primal_value
        phases.mark("verify")
        return {"oracle": "helstrom", "oracle_value": oracle, "sdp_value": solver,
                "difference": solver - oracle}
    if args.oracle == "classical":
        oracle_std = oracles.classical_ml_decode(e, "standard")
        oracle_pmi = oracles.classical_ml_decode(e, "pmi")
        solver_std = sdp.solve_standard(e, tol=args.tol).primal_value
        solver_pmi = sdp.solve_pmi(e, tol=args.tol).primal_value
        phases.mark("verify")
        return {
            "oracle": "classical",
            "standard": {"oracle_value": oracle_std, "sdp_value": solver_std,
                         "difference": solver_std - oracle_std},
            "pmi": {"oracle_value": oracle_pmi, "sdp_value": solver_pmi,
                    "difference": solver_pmi - oracle_pmi},
        }
    oracle = oracles.qubit_grid_search(e, steps=args.steps)
    solver = sdp.solve_pmi(e, tol=args.tol).primal_value
    phases.mark("verify")
    return {"oracle": "grid", "steps": args.steps, "oracle_value": oracle,
            "sdp_value": solver, "difference": solver - oracle}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmdisc",
        description="State discrimination with post-measurement information",
    )
    parser.add_argument("--tol", type=float, default=sdp.DEFAULT_TOL,
                        help="duality-gap tolerance (default 1e-7)")
    parser.add_argument("--alpha", type=str, default="2,4,8,16,32,64",
                        help="comma-separated alpha grid for the upper bound")
    parser.add_argument("--json-out", type=Path, default=None,
                        help="also write the report JSON to this path")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for oracle diagonalization tie-breaking")
    parser.add_argument("--max-vectors", type=int, default=sdp.MAX_VECTORS,
                        help="answer-vector enumeration cap (default 4096)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check ensemble JSON invariants")
    p.add_argument("input", type=Path)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve the discrimination SDP")
    p.add_argument("input", type=Path)
    p.add_argument("--mode", choices=("pmi", "standard"), default="pmi")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bound", help="analytic lower/upper bounds")
    p.add_argument("input", type=Path)
    p.add_argument("--mode", choices=("lower", "upper", "sandwich"),
                   default="sandwich")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("clifford", help="closed-form Clifford analysis")
    p.add_argument("input", type=Path)
    p.add_argument("--action", choices=("analyze", "measure", "make-useless"),
                   default="analyze")
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("chsh", help="CHSH game check for binary ensembles")
    p.add_argument("input", type=Path)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("verify", help="compare an oracle against the solver")
    p.add_argument("input", type=Path)
    p.add_argument("--oracle", choices=("helstrom", "classical", "grid"),
                   required=True)
    p.add_argument("--steps", type=int, default=oracles.DEFAULT_GRID_STEPS)
    p.set_defaults(func=cmd_verify)

    return parser


def _jsonable(obj):
    """Recursively convert numpy scalars/arrays into plain Python values."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _emit(report: dict, json_out: Path | None) -> None:
    text = json.dumps(_jsonable(report), indent=1, sort_keys=True)
    print(text)
    if json_out is not None:
        json_out.write_text(text + "\n", encoding="utf-8")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args.alpha = tuple(float(a) for a in args.alpha.split(","))
    phases = _Phases()
    report = {
        "command": args.command,
        "tolerances": {"tol": args.tol, "max_vectors": args.max_vectors},
    }
    try:
        report["inputs"] = _digest(args.input)
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report["results"] = args.func(args, phases)
    except _ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _VALIDATION_ERRORS as exc:
        report["results"] = {"valid": False, "error": str(exc),
                             "error_type": type(exc).__name__}
        report["timings_ms"] = phases.timings
        _emit(report, args.json_out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _NUMERICAL_ERRORS as exc:
        report["results"] = {"error": str(exc), "error_type": type(exc).__name__}
        if isinstance(exc, ConvergenceFailure) and exc.last_dual is not None:
            report["results"]["last_dual_bound"] = exc.last_dual
        report["timings_ms"] = phases.timings
        _emit(report, args.json_out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PmdiscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report["timings_ms"] = phases.timings
    _emit(report, args.json_out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
