import json
import shutil

import numpy as np
import pytest

from pmdisc import cli, fixtures
from pmdisc import ensemble as ens

BB84 = str(fixtures.fixture_path("bb84.json"))
XOR = str(fixtures.fixture_path("xor_classical.json"))
C34 = str(fixtures.fixture_path("classical_34.json"))
THETA = str(fixtures.fixture_path("clifford_theta.json"))


def run_cli(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr().out
    report = json.loads(out) if out.strip() else None
    return code, report


class TestValidate:
    def test_bb84(self, capsys):
        code, report = run_cli(capsys, "validate", BB84)
        assert code == 0
        assert report["results"]["distribution"] == "product_uniform_x"
        assert report["results"]["marginal_b"] == [0.5, 0.5]
        assert report["results"]["classical"] is False

    def test_corrupted_trace_exits_3(self, capsys, tmp_path):
        e = fixtures.bb84_ensemble()
        data = ens.to_json_dict(e)
        data["items"][0]["matrix"][0][0][0] = 0.9
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        code, report = run_cli(capsys, "validate", str(path))
        assert code == 3
        assert "(0,0)" in report["results"]["error"]

    def test_malformed_json_exits_2(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _ = run_cli(capsys, "validate", str(path))
        assert code == 2

    def test_missing_file_exits_2(self, capsys, tmp_path):
        code, _ = run_cli(capsys, "validate", str(tmp_path / "absent.json"))
        assert code == 2


class TestSolve:
    def test_bb84_pmi(self, capsys):
        code, report = run_cli(capsys, "solve", BB84, "--mode", "pmi")
        assert code == 0
        sol = report["results"]["solution"]
        assert sol["primal"] == pytest.approx(0.8535534, abs=1e-6)
        assert report["results"]["optimality"]["verdict"] is True
        assert len(sol["measurement"]) == 4
        assert sol["gap"] <= 1e-7

    def test_xor_both_modes(self, capsys):
        code, report = run_cli(capsys, "solve", XOR, "--mode", "pmi")
        assert code == 0
        assert report["results"]["solution"]["primal"] == pytest.approx(1.0, abs=1e-9)
        code, report = run_cli(capsys, "solve", XOR, "--mode", "standard")
        assert code == 0
        assert report["results"]["solution"]["primal"] == pytest.approx(0.5, abs=1e-9)

    def test_cap_exits_4(self, capsys, tmp_path):
        code, report = run_cli(
            capsys, "--max-vectors", "2", "solve", BB84, "--mode", "pmi"
        )
        assert code == 4
        assert report["results"]["error_type"] == "TooManyAnswerVectors"


class TestBound:
    def test_bb84_sandwich(self, capsys):
        code, report = run_cli(capsys, "bound", BB84, "--mode", "sandwich")
        assert code == 0
        res = report["results"]
        assert res["lower"] <= res["sdp"] + 2e-7
        assert res["sdp"] <= res["upper"] + 2e-7
        assert res["sandwich_ok"] is True

    def test_xor_lower(self, capsys):
        code, report = run_cli(capsys, "bound", XOR, "--mode", "lower")
        assert code == 0
        assert report["results"]["lower"] == pytest.approx(1.0, abs=1e-9)
        assert report["results"]["argmax_partition"] == [1]

    def test_alpha_grid_flag(self, capsys):
        code, report = run_cli(
            capsys, "--alpha", "2,4", "bound", BB84, "--mode", "upper"
        )
        assert code == 0
        assert report["results"]["argmin_alpha"] in (2.0, 4.0)

    def test_non_uniform_prior_exits_3(self, capsys, tmp_path):
        e = fixtures.bb84_ensemble()
        skew = ens.Ensemble(2, 2, 2, e.states, np.array([[0.4, 0.1], [0.1, 0.4]]))
        path = tmp_path / "skew.json"
        ens.save(skew, path)
        code, report = run_cli(capsys, "bound", str(path), "--mode", "lower")
        assert code == 3
        assert report["results"]["error_type"] == "NotProductUniform"


class TestCliffordCmd:
    def test_analyze_theta(self, capsys):
        code, report = run_cli(capsys, "clifford", THETA, "--action", "analyze")
        assert code == 0
        res = report["results"]
        assert res["useless"] is False
        assert res["p_pmi"] == pytest.approx((1 + np.sin(3 * np.pi / 8)) / 2)

    def test_measure(self, capsys):
        code, report = run_cli(capsys, "clifford", THETA, "--action", "measure")
        assert code == 0
        assert len(report["results"]["outcomes"]) == 2
        assert report["results"]["degenerate"] is False

    def test_make_useless_writes_next_to_input(self, capsys, tmp_path):
        local = tmp_path / "theta.json"
        shutil.copy(THETA, local)
        code, report = run_cli(capsys, "clifford", str(local),
                               "--action", "make-useless")
        assert code == 0
        out_path = tmp_path / "theta_useless.json"
        assert out_path.exists()
        assert report["results"]["useless_after"] is True
        code, report = run_cli(capsys, "clifford", str(out_path),
                               "--action", "analyze")
        assert code == 0
        assert report["results"]["useless"] is True


class TestChshCmd:
    def test_xor(self, capsys):
        code, report = run_cli(capsys, "chsh", XOR)
        assert code == 0
        res = report["results"]
        assert res["path"] == "classical"
        assert res["p1"] == pytest.approx(0.5, abs=2e-7)
        assert res["p2"] == pytest.approx(1.0, abs=2e-7)
        assert res["game_value"] == pytest.approx(0.75, abs=2e-7)
        assert res["classical_bound"] == 0.75

    def test_bb84_quantum_path(self, capsys):
        code, report = run_cli(capsys, "chsh", BB84)
        assert code == 0
        res = report["results"]
        assert res["path"] == "quantum"
        assert res["game_value"] == pytest.approx(0.8535534, abs=1e-6)
        assert res["classical_bound_violated"] is True

    def test_classical_34_fixture(self, capsys):
        code, report = run_cli(capsys, "chsh", C34)
        assert code == 0
        assert report["results"]["relabeling_useless_possible"] is False

    def test_wrong_shape_exits_3(self, capsys, tmp_path):
        e = fixtures.xor_ensemble()
        skew = ens.Ensemble(2, 2, 2, e.states, np.array([[0.4, 0.1], [0.1, 0.4]]))
        path = tmp_path / "skew.json"
        ens.save(skew, path)
        code, _ = run_cli(capsys, "chsh", str(path))
        assert code == 3


class TestVerifyCmd:
    def test_classical_oracle(self, capsys):
        code, report = run_cli(capsys, "verify", XOR, "--oracle", "classical")
        assert code == 0
        res = report["results"]
        assert abs(res["pmi"]["difference"]) <= 2e-7
        assert abs(res["standard"]["difference"]) <= 2e-7

    def test_grid_oracle(self, capsys):
        code, report = run_cli(capsys, "verify", BB84, "--oracle", "grid",
                               "--steps", "60")
        assert code == 0
        assert 0 <= report["results"]["difference"] <= 1e-2

    def test_helstrom_oracle(self, capsys, tmp_path):
        e = fixtures.bb84_ensemble()
        states = e.states[(0, 0), (0, 1)][:, None]
        pair = ens.Ensemble(2, 2, 1, states, np.full((2, 1), 0.5))
        path = tmp_path / "pair.json"
        ens.save(pair, path)
        code, report = run_cli(capsys, "verify", str(path), "--oracle", "helstrom")
        assert code == 0
        assert abs(report["results"]["difference"]) <= 2e-7


def test_reports_deterministic_modulo_timings(capsys):
    _, first = run_cli(capsys, "solve", BB84, "--mode", "pmi")
    _, second = run_cli(capsys, "solve", BB84, "--mode", "pmi")
    first.pop("timings_ms")
    second.pop("timings_ms")
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_json_out_writes_file(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, printed = run_cli(capsys, "--json-out", str(out), "validate", BB84)
    assert code == 0
    on_disk = json.loads(out.read_text())
    assert on_disk == printed
