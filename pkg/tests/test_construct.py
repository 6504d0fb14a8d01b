"""Rotation bases, reductions, and the lifted-game construction."""

import numpy as np
import pytest

from enlgames.construct import (
    build_enlg,
    build_rv_game,
    chsh_game,
    embed_nonlocal_game,
    max_entangled,
    reduce_qc,
    weyl_basis,
)
from enlgames.errors import InvalidDimensionError, ValidationFailedError
from enlgames.linalg import hs_inner, identity, kron, partial_trace
from enlgames.model import QCGame, validate_enlg, validate_qc_game
from enlgames.sampling import random_density, random_qc_game


class TestWeylBasis:
    def test_d1_is_scalar_one(self):
        basis = weyl_basis(1)
        assert len(basis) == 1
        assert np.allclose(basis[0], [[1.0]])

    def test_d2_family_explicit(self):
        # Shift-and-phase family at d=2: identity, phase flip, shift, and
        # their product, in flat index order.
        basis = weyl_basis(2)
        eye = np.eye(2)
        z = np.diag([1.0, -1.0])
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(basis[0], eye)
        assert np.allclose(basis[1], z)
        assert np.allclose(basis[2], x)
        assert np.allclose(basis[3], x @ z)

    def test_d3_entries(self):
        basis = weyl_basis(3)
        omega = np.exp(2j * np.pi / 3)
        # flat index j*d + k: operator shifts by j and phases by k
        w11 = basis[4]
        expected = np.zeros((3, 3), dtype=complex)
        for l in range(3):
            expected[(l + 1) % 3, l] = omega**l
        assert np.allclose(w11, expected)

    def test_unitarity(self):
        for d in (2, 3, 4):
            basis = weyl_basis(d)
            for op in basis:
                assert np.allclose(op @ op.conj().T, np.eye(d), atol=1e-12)

    def test_hs_orthogonality(self):
        for d in (2, 3, 4):
            basis = weyl_basis(d)
            for i in range(d * d):
                for j in range(d * d):
                    val = hs_inner(basis[i], basis[j])
                    want = d if i == j else 0.0
                    assert abs(val - want) < 1e-10

    def test_twirl_collapses_to_trace_part(self):
        # Averaging conjugation over the full family leaves only the
        # trace component, the mechanism that caps constructed-game losses.
        rng = np.random.default_rng(5)
        for d in (2, 3):
            basis = weyl_basis(d)
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            twirled = sum(op @ m @ op.conj().T for op in basis) / (d * d)
            assert np.allclose(twirled, np.trace(m) / d * np.eye(d), atol=1e-10)

    def test_rejects_bad_dimension(self):
        with pytest.raises(InvalidDimensionError):
            weyl_basis(0)


class TestMaxEntangled:
    def test_normalization_and_entries(self):
        for n in (1, 2, 3):
            state = max_entangled(n)
            assert abs(np.linalg.norm(state.vector) - 1.0) < 1e-12
            for j in range(n):
                assert abs(state.vector[j * n + j] - 1.0 / np.sqrt(n)) < 1e-12

    def test_marginals_maximally_mixed(self):
        state = max_entangled(3)
        proj = state.projector()
        for side in (0, 1):
            marg = partial_trace(proj, (3, 3), keep=(side,))
            assert np.allclose(marg, np.eye(3) / 3.0, atol=1e-12)

    def test_transfer_property(self):
        # (M (x) I)|psi> = (I (x) M^T)|psi>, the workhorse identity.
        rng = np.random.default_rng(6)
        n = 3
        state = max_entangled(n)
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        left = kron(m, identity(n)) @ state.vector
        right = kron(identity(n), m.T) @ state.vector
        assert np.allclose(left, right, atol=1e-12)


class TestReduceQC:
    def test_reduction_shapes_and_order(self):
        rng = np.random.default_rng(10)
        game = random_qc_game(n=2, s=3, m=2, rng=rng)
        red = reduce_qc(game)
        assert red.xi.shape == (4, 4)
        assert set(red.xi_ab) == {(a, b) for a in range(2) for b in range(2)}

    def test_xi_is_rho_marginal(self):
        rng = np.random.default_rng(11)
        game = random_qc_game(n=2, s=2, m=3, rng=rng)
        red = reduce_qc(game)
        want = partial_trace(game.rho, (2, 2, 3), keep=(0, 2))
        assert np.allclose(red.xi, want, atol=1e-12)

    def test_effects_sum_below_xi(self):
        # Sandwiching by any single win effect keeps the reduction under xi.
        rng = np.random.default_rng(12)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        red = reduce_qc(game)
        for op in red.xi_ab.values():
            gap = red.xi - op
            vals = np.linalg.eigvalsh((gap + gap.conj().T) / 2.0)
            assert vals.min() > -1e-10

    def test_full_effect_recovers_xi(self):
        rng = np.random.default_rng(13)
        rho = random_density(8, rng)
        ops = {(a, b): np.eye(2, dtype=complex) for a in range(2) for b in range(2)}
        game = QCGame(rho=rho, dims=(2, 2, 2), win_ops=ops, answer_sets=(2, 2))
        red = reduce_qc(game)
        for op in red.xi_ab.values():
            assert np.allclose(op, red.xi, atol=1e-12)


class TestBuildEnlg:
    def test_output_is_valid(self):
        rng = np.random.default_rng(20)
        for n, m, s in ((2, 2, 2), (2, 3, 2), (3, 2, 3)):
            game = random_qc_game(n=n, s=s, m=m, rng=rng)
            lifted = build_enlg(game)
            assert validate_enlg(lifted).ok, (n, m, s)

    def test_question_counts_and_uniform_prior(self):
        rng = np.random.default_rng(21)
        game = random_qc_game(n=2, s=2, m=3, rng=rng)
        lifted = build_enlg(game)
        assert lifted.question_sets == (4, 9)
        assert lifted.ref_dim == 6
        assert all(abs(p - 1.0 / 36.0) < 1e-15 for p in lifted.pi.values())

    def test_referee_op_spectra(self):
        rng = np.random.default_rng(22)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        lifted = build_enlg(game)
        for op in lifted.ref_ops.values():
            vals = np.linalg.eigvalsh((op + op.conj().T) / 2.0)
            assert vals.min() > -1e-10
            assert vals.max() < 1.0 + 1e-10

    def test_always_win_game_gives_identity_ops(self):
        rng = np.random.default_rng(23)
        rho = random_density(8, rng)
        ops = {(a, b): np.eye(2, dtype=complex) for a in range(2) for b in range(2)}
        game = QCGame(rho=rho, dims=(2, 2, 2), win_ops=ops, answer_sets=(2, 2))
        lifted = build_enlg(game)
        for op in lifted.ref_ops.values():
            assert np.allclose(op, np.eye(4), atol=1e-12)

    def test_gap_conjugation_structure(self):
        # Each referee operator is I minus the rotated transposed gap.
        rng = np.random.default_rng(24)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        lifted = build_enlg(game)
        red = reduce_qc(game)
        ub = weyl_basis(2)
        for (a, b, x, y), op in lifted.ref_ops.items():
            u = kron(ub[x], ub[y])
            gap = (red.xi - red.xi_ab[(a, b)]).T
            want = np.eye(4) - u @ gap @ u.conj().T
            assert np.allclose(op, want, atol=1e-12)

    def test_rejects_invalid_game(self):
        rng = np.random.default_rng(25)
        game = random_qc_game(n=2, s=2, m=2, rng=rng)
        bad = QCGame(
            rho=2.0 * game.rho,
            dims=game.dims,
            win_ops=dict(game.win_ops),
            answer_sets=game.answer_sets,
        )
        with pytest.raises(ValidationFailedError):
            build_enlg(bad)


class TestCatalogGames:
    def test_rv_game_shape(self):
        game = build_rv_game()
        assert game.question_sets == (9, 9)
        assert game.ref_dim == 9
        assert game.answer_sets == (2, 2)
        assert validate_enlg(game).ok

    def test_rv_ops_depend_on_parity_only(self):
        game = build_rv_game()
        for x in range(9):
            for y in range(9):
                assert np.allclose(
                    game.ref_ops[(0, 0, x, y)], game.ref_ops[(1, 1, x, y)], atol=1e-14
                )
                assert np.allclose(
                    game.ref_ops[(0, 1, x, y)], game.ref_ops[(1, 0, x, y)], atol=1e-14
                )

    def test_rv_op_is_rotated_rank_one_complement(self):
        game = build_rv_game()
        ub = weyl_basis(3)
        gamma0 = np.zeros(9, dtype=complex)
        gamma0[0] = 1.0 / np.sqrt(2.0)
        gamma0[4] = 0.5
        gamma0[8] = 0.5
        for x, y in ((0, 0), (2, 5)):
            u = kron(ub[x], ub[y])
            rotated = u @ np.outer(gamma0, gamma0.conj()) @ u.conj().T
            assert np.allclose(game.ref_ops[(0, 0, x, y)], np.eye(9) - rotated, atol=1e-12)

    def test_rv_targets_are_unit_vectors(self):
        # Both target vectors are normalized, so each losing operator is a
        # rank-one projector and every win operator has spectrum {0, 1}.
        game = build_rv_game()
        vals = np.linalg.eigvalsh(game.ref_ops[(0, 1, 3, 7)])
        assert abs(vals[0]) < 1e-12
        assert np.allclose(vals[1:], 1.0, atol=1e-12)

    def test_chsh_embedding(self):
        game = chsh_game()
        assert game.ref_dim == 1
        assert game.question_sets == (2, 2)
        assert validate_enlg(game).ok
        for (a, b, x, y), op in game.ref_ops.items():
            want = 1.0 if (a ^ b) == (x & y) else 0.0
            assert abs(op[0, 0] - want) < 1e-15

    def test_embed_respects_prior(self):
        pi = {(0, 0): 0.5, (0, 1): 0.5, (1, 0): 0.0, (1, 1): 0.0}
        game = embed_nonlocal_game(pi, lambda x, y, a, b: a == b)
        assert abs(game.pi[(0, 0)] - 0.5) < 1e-15
        assert validate_enlg(game).ok
