import numpy as np
import pytest

from pmdisc import ensemble as ens
from pmdisc import fixtures, games, sdp
from pmdisc.errors import (
    BudgetExceeded,
    DimensionMismatch,
    NotClassical,
    WrongShape,
)
from conftest import random_classical_ensemble

CHSH_QUANTUM = 0.5 + 0.5 / np.sqrt(2.0)


class TestChshGame:
    def test_predicate_examples(self):
        g = games.chsh_game()
        assert g.win[1, 1, 0, 1]
        assert g.win[0, 1, 1, 1]
        assert not g.win[1, 1, 0, 0]

    def test_uniform_questions(self):
        g = games.chsh_game()
        assert np.allclose(g.pi, 0.25)


class TestClassicalValue:
    def test_chsh_is_three_quarters_exactly(self):
        assert games.classical_value(games.chsh_game()) == 0.75

    def test_trivial_predicate(self):
        g = games.chsh_game()
        always = games.NonlocalGame(2, 2, 2, 2, g.pi,
                                    np.ones_like(g.win, dtype=bool))
        assert games.classical_value(always) == 1.0

    def test_copy_predicate(self):
        win = np.zeros((2, 2, 2, 2), dtype=bool)
        for s in range(2):
            win[s, :, s, :] = True
        g = games.NonlocalGame(2, 2, 2, 2, np.full((2, 2), 0.25), win)
        assert games.classical_value(g) == 1.0

    def test_budget(self):
        k = 60
        pi = np.full((k, k), 1.0 / k**2)
        win = np.ones((k, k, k, k), dtype=bool)
        with pytest.raises(BudgetExceeded):
            games.classical_value(games.NonlocalGame(k, k, k, k, pi, win))


class TestQuantumValue:
    def test_optimal_strategy(self):
        value = games.quantum_value_of(games.optimal_chsh_strategy(),
                                       games.chsh_game())
        assert value == pytest.approx(CHSH_QUANTUM, abs=1e-9)

    def test_embedded_classical_strategy(self):
        # deterministic answers a = 0, b = 0 win whenever s.t = 0
        eye = np.eye(2, dtype=complex)
        zero = np.zeros((2, 2), dtype=complex)
        det = ((eye, zero), (eye, zero))
        strategy = games.QuantumStrategy(np.kron(eye, eye) / 4, det, det)
        value = games.quantum_value_of(strategy, games.chsh_game())
        assert value == pytest.approx(0.75, abs=1e-12)

    def test_random_strategy_bounded_by_one(self, rng):
        def random_binary_povm():
            g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            u = np.linalg.qr(g)[0]
            m0 = u @ np.diag([1.0, 0.0]).astype(complex) @ u.conj().T
            return m0, np.eye(2) - m0

        povms = (random_binary_povm(), random_binary_povm())
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        strategy = games.QuantumStrategy(np.outer(psi, psi.conj()), povms, povms)
        value = games.quantum_value_of(strategy, games.chsh_game())
        assert -1e-12 <= value <= 1.0 + 1e-12

    def test_dimension_mismatch(self):
        strategy = games.optimal_chsh_strategy()
        bad = games.QuantumStrategy(np.eye(8) / 8, strategy.alice_povms,
                                    strategy.bob_povms)
        with pytest.raises(DimensionMismatch):
            games.quantum_value_of(bad, games.chsh_game())


class TestStrategyFromDiscrimination:
    def test_bb84_reaches_tsirelson(self):
        strategy = games.strategy_from_discrimination(fixtures.bb84_ensemble())
        value = games.quantum_value_of(strategy, games.chsh_game())
        assert value == pytest.approx(CHSH_QUANTUM, abs=1e-9)

    def test_xor_reaches_classical_optimum(self):
        strategy = games.strategy_from_discrimination(fixtures.xor_ensemble())
        value = games.quantum_value_of(strategy, games.chsh_game())
        assert value == pytest.approx(0.75, abs=1e-9)

    def test_no_information_ensemble(self):
        states = np.empty((2, 2, 2, 2), dtype=complex)
        states[:] = np.eye(2) / 2
        e = ens.Ensemble(2, 2, 2, states, np.full((2, 2), 0.25))
        strategy = games.strategy_from_discrimination(e)
        value = games.quantum_value_of(strategy, games.chsh_game())
        assert value == pytest.approx(0.5, abs=1e-9)

    def test_value_matches_partition_average(self, rng):
        for _ in range(5):
            e = random_classical_ensemble(rng, 4)
            strategy = games.strategy_from_discrimination(e)
            value = games.quantum_value_of(strategy, games.chsh_game())
            p = [
                sdp.solve_standard(
                    ens.Ensemble(4, 2, 1,
                                 np.stack(games.partition_states(e, t))[:, None],
                                 np.full((2, 1), 0.5))
                ).primal_value
                for t in range(2)
            ]
            assert value == pytest.approx((p[0] + p[1]) / 2, abs=2e-7)

    def test_rejects_wrong_shape(self, rng):
        e = fixtures.bb84_ensemble()
        skew = ens.Ensemble(2, 2, 2, e.states, np.array([[0.4, 0.1], [0.1, 0.4]]))
        with pytest.raises(WrongShape):
            games.strategy_from_discrimination(skew)

    def test_rejects_unbalanced_supports(self):
        # both states of encoding 0 are |0><0|: rho_00 + rho_10 != I
        e = fixtures.bb84_ensemble()
        states = np.array(e.states)
        states[1, 0] = states[0, 0]
        with pytest.raises(WrongShape):
            games.strategy_from_discrimination(
                ens.Ensemble(2, 2, 2, states, e.probs)
            )


class TestSupportStructure:
    def test_classical_34_rank(self):
        view = games.support_structure(fixtures.classical_34_ensemble())
        assert view.rank == 2
        assert len(view.projectors) == 4

    def test_rejects_noncommuting(self):
        with pytest.raises(NotClassical):
            games.support_structure(fixtures.bb84_ensemble())

    def test_quantum_allowed_when_not_required(self):
        view = games.support_structure(fixtures.bb84_ensemble(),
                                       require_commuting=False)
        assert view.rank == 1


class TestNoRelabelingCheck:
    def test_xor_saturates_bound_without_hypothesis(self):
        report = games.no_relabeling_check(fixtures.xor_ensemble())
        assert report.p1 == pytest.approx(0.5, abs=2e-7)
        assert report.p2 == pytest.approx(1.0, abs=2e-7)
        assert report.p1 + report.p2 == pytest.approx(1.5, abs=4e-7)
        assert report.bound_ok
        assert not report.info_hypothesis
        assert report.relabeling_useless_possible

    def test_three_quarter_fixture(self):
        e = fixtures.classical_34_ensemble()
        report = games.no_relabeling_check(e)
        assert report.p1 == pytest.approx(0.75, abs=2e-7)
        assert report.p2 == pytest.approx(0.75, abs=2e-7)
        assert report.info_hypothesis
        assert all(d > 1e-4 for d in report.relabeling_deltas.values())
        assert not report.relabeling_useless_possible
        assert sdp.solve_pmi(e).primal_value == pytest.approx(1.0, abs=1e-7)

    def test_classical_bound_on_random_ensembles(self, rng):
        for d in (2, 4):
            for _ in range(5):
                report = games.no_relabeling_check(random_classical_ensemble(rng, d))
                assert report.p1 + report.p2 <= 1.5 + 4e-7
                if report.p1 > 0.5 + 1e-3 and report.p2 > 0.5 + 1e-3:
                    assert report.p1 < 1.0 - 1e-3
                    assert report.p2 < 1.0 - 1e-3

    def test_bb84_quantum_violation(self):
        # quantum ensembles break the classical constraint p1 + p2 <= 3/2
        e = fixtures.bb84_ensemble()
        pmi = sdp.solve_pmi(e).primal_value
        values = []
        for t in range(2):
            states = np.stack(games.partition_states(e, t))[:, None]
            problem = ens.Ensemble(2, 2, 1, states, np.full((2, 1), 0.5))
            values.append(sdp.solve_standard(problem).primal_value)
        assert values[0] == pytest.approx(pmi, abs=1e-7)
        assert values[1] == pytest.approx(pmi, abs=1e-7)
        assert values[0] + values[1] > 1.5 + 0.1

    def test_rejects_quantum_input(self):
        with pytest.raises(NotClassical):
            games.no_relabeling_check(fixtures.bb84_ensemble())

    def test_rejects_wrong_shape(self, rng):
        e = fixtures.xor_ensemble()
        skew = ens.Ensemble(2, 2, 2, e.states, np.array([[0.4, 0.1], [0.1, 0.4]]))
        with pytest.raises(WrongShape):
            games.no_relabeling_check(skew)
