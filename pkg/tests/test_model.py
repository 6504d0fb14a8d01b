"""Game/strategy containers, validation, and winning-probability semantics."""

import numpy as np
import pytest

from enlgames.errors import DimensionMismatchError
from enlgames.linalg import kron, kron_all, partial_trace
from enlgames.model import (
    ENLGStrategy,
    QCGame,
    QCStrategy,
    clamp01,
    enlg_payoff_operator,
    enlg_win_prob,
    qc_joint_state,
    qc_win_prob,
    validate_enlg,
    validate_enlg_strategy,
    validate_qc_game,
    validate_qc_strategy,
)
from enlgames.construct import build_enlg
from enlgames.sampling import (
    random_density,
    random_enlg_strategy,
    random_qc_game,
    random_qc_strategy,
)


def constant_outcome_game(n, s, m, effect):
    """QC game whose four answer pairs share one win effect."""
    rng = np.random.default_rng(99)
    rho = random_density(n * s * m, rng)
    ops = {(a, b): np.array(effect, dtype=complex) for a in range(2) for b in range(2)}
    return QCGame(rho=rho, dims=(n, s, m), win_ops=ops, answer_sets=(2, 2))


def psd_sqrt(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    w = np.clip(w, 0.0, None)
    return v @ np.diag(np.sqrt(w)) @ v.conj().T


class TestContainers:
    def test_arrays_frozen(self):
        rng = np.random.default_rng(0)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        with pytest.raises(ValueError):
            game.rho[0, 0] = 1.0
        with pytest.raises(ValueError):
            game.win_ops[(0, 0)][0, 0] = 1.0

    def test_dims_properties(self):
        rng = np.random.default_rng(1)
        game = random_qc_game(n=2, s=3, m=2, rng=rng)
        assert (game.n, game.s, game.m) == (2, 3, 2)

    def test_inputs_copied(self):
        rng = np.random.default_rng(2)
        rho = random_density(8, rng)
        ops = {(a, b): np.eye(2, dtype=complex) / 4 for a in range(2) for b in range(2)}
        game = QCGame(rho=rho, dims=(2, 2, 2), win_ops=ops, answer_sets=(2, 2))
        rho[0, 0] = 123.0
        assert game.rho[0, 0] != 123.0


class TestValidation:
    def test_random_game_and_strategies_pass(self):
        rng = np.random.default_rng(10)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        assert validate_qc_game(game).ok
        strat = random_qc_strategy(game, du=2, dv=2, rng=rng)
        assert validate_qc_strategy(strat, game).ok
        lifted = build_enlg(game)
        assert validate_enlg(lifted).ok
        enlg_strat = random_enlg_strategy(lifted, du=2, dv=2, rng=rng)
        assert validate_enlg_strategy(enlg_strat, lifted).ok

    def test_unnormalized_state_flagged(self):
        rng = np.random.default_rng(11)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        bad = QCGame(
            rho=2.0 * game.rho,
            dims=game.dims,
            win_ops=dict(game.win_ops),
            answer_sets=game.answer_sets,
        )
        report = validate_qc_game(bad)
        assert not report.ok
        assert any(v.code == "trace" for v in report.violations)

    def test_effect_above_identity_flagged(self):
        rng = np.random.default_rng(12)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        ops = dict(game.win_ops)
        ops[(0, 0)] = 1.5 * np.eye(2, dtype=complex)
        bad = QCGame(rho=game.rho, dims=game.dims, win_ops=ops, answer_sets=(2, 2))
        assert not validate_qc_game(bad).ok

    def test_incomplete_povm_flagged(self):
        rng = np.random.default_rng(13)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        strat = random_qc_strategy(game, du=2, dv=2, rng=rng)
        broken = QCStrategy(
            sigma=strat.sigma,
            dims=strat.dims,
            alice_povm={a: 0.5 * e for a, e in strat.alice_povm.items()},
            bob_povm=dict(strat.bob_povm),
        )
        report = validate_qc_strategy(broken, game)
        assert not report.ok
        assert any(v.code == "completeness" for v in report.violations)

    def test_report_is_printable(self):
        rng = np.random.default_rng(14)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        text = str(validate_qc_game(game))
        assert "valid" in text


class TestQCWinProb:
    def test_always_win_and_always_lose(self):
        # Q_ab = I accepts every answer pair; Q_ab = 0 rejects all of them.
        for effect, expected in ((np.eye(2), 1.0), (np.zeros((2, 2)), 0.0)):
            game = constant_outcome_game(2, 2, 2, effect)
            rng = np.random.default_rng(20)
            strat = random_qc_strategy(game, du=2, dv=2, rng=rng)
            assert abs(qc_win_prob(game, strat) - expected) < 1e-10

    def test_linear_in_shared_state(self):
        rng = np.random.default_rng(21)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        s1 = random_qc_strategy(game, du=2, dv=2, rng=rng)
        s2 = QCStrategy(
            sigma=random_density(4, rng),
            dims=s1.dims,
            alice_povm=dict(s1.alice_povm),
            bob_povm=dict(s1.bob_povm),
        )
        lam = 0.3
        mix = QCStrategy(
            sigma=lam * s1.sigma + (1 - lam) * s2.sigma,
            dims=s1.dims,
            alice_povm=dict(s1.alice_povm),
            bob_povm=dict(s1.bob_povm),
        )
        expected = lam * qc_win_prob(game, s1) + (1 - lam) * qc_win_prob(game, s2)
        assert abs(qc_win_prob(game, mix) - expected) < 1e-10

    def test_joint_state_routing(self):
        # The assembled state must put sigma's halves at the outer slots.
        rng = np.random.default_rng(22)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        strat = random_qc_strategy(game, du=2, dv=3, rng=rng)
        state = qc_joint_state(game, strat)
        du, dv = strat.dims
        n, s, m = game.dims
        back = partial_trace(state, (du, n, s, m, dv), keep=(0, 4))
        assert np.allclose(back, strat.sigma, atol=1e-10)
        middle = partial_trace(state, (du, n, s, m, dv), keep=(1, 2, 3))
        assert np.allclose(middle, game.rho, atol=1e-10)

    def test_born_rule_monte_carlo(self):
        # Sequential-measurement simulation: Alice collapses with sqrt(A_a),
        # Bob with sqrt(B_b), then the referee accepts with Tr(Q_ab rho').
        rng = np.random.default_rng(23)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        strat = random_qc_strategy(game, du=2, dv=2, rng=rng)
        value = qc_win_prob(game, strat)

        du, dv = strat.dims
        n, s, m = game.dims
        state = qc_joint_state(game, strat)
        dims5 = (du, n, s, m, dv)
        win_given = {}
        prob_pair = {}
        for a, e_a in strat.alice_povm.items():
            ka = kron(psd_sqrt(e_a), np.eye(s * m * dv, dtype=complex))
            after_a = ka @ state @ ka.conj().T
            for b, e_b in strat.bob_povm.items():
                kb = kron(np.eye(du * n * s, dtype=complex), psd_sqrt(e_b))
                after = kb @ after_a @ kb.conj().T
                p = np.trace(after).real
                prob_pair[(a, b)] = p
                referee = partial_trace(after, dims5, keep=(2,))
                win_given[(a, b)] = (
                    0.0 if p < 1e-15 else np.trace(game.win_ops[(a, b)] @ referee).real / p
                )
        pairs = sorted(prob_pair)
        weights = np.array([prob_pair[k] for k in pairs])
        assert abs(weights.sum() - 1.0) < 1e-10
        samples = 100_000
        draw = rng.choice(len(pairs), size=samples, p=weights / weights.sum())
        wins = rng.random(samples) < np.array([win_given[pairs[i]] for i in draw])
        estimate = wins.mean()
        sigma_mc = np.sqrt(max(value * (1 - value), 1e-12) / samples)
        assert abs(estimate - value) < 4 * sigma_mc

    def test_dimension_mismatch_raises(self):
        rng = np.random.default_rng(24)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        other = random_qc_game(n=3, s=2, m=2, rng=rng)
        strat = random_qc_strategy(other, du=2, dv=2, rng=rng)
        with pytest.raises(DimensionMismatchError):
            qc_win_prob(game, strat)


class TestENLGWinProb:
    def test_trivial_referee_reduces_to_nonlocal_game(self):
        # With ref_dim 1 the payoff is the classical predicate expectation.
        from enlgames.construct import chsh_game

        game = chsh_game()
        sigma = np.zeros((4, 4), dtype=complex)
        sigma[0, 0] = 1.0  # |00><00| on U (x) R (x) V with dr = 1
        ones = {0: np.eye(2, dtype=complex) * 0 + np.diag([1.0, 0.0]), 1: np.diag([0.0, 1.0]).astype(complex)}
        alice = {x: {0: np.diag([1.0, 0.0]).astype(complex), 1: np.diag([0.0, 1.0]).astype(complex)} for x in range(2)}
        bob = {y: {0: np.diag([1.0, 0.0]).astype(complex), 1: np.diag([0.0, 1.0]).astype(complex)} for y in range(2)}
        strat = ENLGStrategy(sigma=sigma, dims=(2, 1, 2), alice_povms=alice, bob_povms=bob)
        # Deterministic answers a = b = 0 win CHSH on 3 of 4 questions.
        assert abs(enlg_win_prob(game, strat) - 0.75) < 1e-10

    def test_payoff_operator_consistency(self):
        rng = np.random.default_rng(30)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        lifted = build_enlg(game)
        strat = random_enlg_strategy(lifted, du=2, dv=2, rng=rng)
        payoff = enlg_payoff_operator(lifted, strat.alice_povms, strat.bob_povms)
        direct = np.trace(payoff @ strat.sigma).real
        assert abs(direct - enlg_win_prob(lifted, strat)) < 1e-10

    def test_probability_in_unit_interval(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            game = random_qc_game(n=2, s=2, m=2, rng=rng)
            lifted = build_enlg(game)
            strat = random_enlg_strategy(lifted, du=2, dv=2, rng=rng)
            p = enlg_win_prob(lifted, strat)
            assert -1e-10 <= p <= 1 + 1e-10


def test_clamp01():
    assert clamp01(-1e-12) == 0.0
    assert clamp01(1.0 + 1e-12) == 1.0
    assert clamp01(0.25) == 0.25
