"""Alternating (see-saw) maximization of entangled game values.

Only binary answer alphabets are handled: with two outcomes each player's
optimal measurement for a fixed remainder of the strategy is the spectral
split of a difference operator, so every block update is exact and the
objective never decreases.  Values reported here are lower bounds on the
entangled value at the configured ancilla dimensions; nothing certifies
optimality.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .adapt import adapt_qc_to_enlg
from .construct import build_enlg
from .errors import ToolkitError, UnsupportedAnswerAlphabetError
from .linalg import hermitian_eig, identity, kron, partial_trace, permute_registers
from .model import (
    ENLGStrategy,
    ExtendedGame,
    QCGame,
    QCStrategy,
    enlg_payoff_operator,
    enlg_win_prob,
    qc_joint_state,
    qc_win_prob,
)
from .policy import DEFAULT_POLICY, NumericPolicy

__all__ = [
    "SeeSawConfig",
    "SeeSawReport",
    "SweepRow",
    "RelationReport",
    "helstrom_update",
    "state_update_enlg",
    "seesaw_enlg",
    "seesaw_qc",
    "sweep_enlg",
    "sweep_qc",
    "value_relation_check",
    "embed_enlg_strategy",
    "embed_qc_strategy",
]


@dataclass(frozen=True)
class SeeSawConfig:
    """Knobs for one see-saw run.

    Attributes:
        ancilla_dims: ``(dim U, dim V)`` for the players' private registers.
        restarts: independent random initializations; at least 1.
        max_rounds: per-restart cap on full update rounds.
        improve_tol: stop a restart once a round gains less than this.
        seed: root seed; every randomized choice derives from it.
    """

    ancilla_dims: tuple[int, int] = (2, 2)
    restarts: int = 8
    max_rounds: int = 500
    improve_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ToolkitError("restarts must be >= 1")
        if self.max_rounds < 1:
            raise ToolkitError("max_rounds must be >= 1")
        if not self.improve_tol > 0.0:
            raise ToolkitError("improve_tol must be positive")
        du, dv = self.ancilla_dims
        if min(int(du), int(dv)) < 1:
            raise ToolkitError("ancilla dims must be positive")


@dataclass
class SeeSawReport:
    """Outcome of a see-saw run.

    ``best_value`` is re-evaluated from ``best_strategy`` with the exact
    win-probability formula before the report is returned; a mismatch
    beyond 1e-9 raises instead of reporting.
    """

    best_value: float
    best_strategy: ENLGStrategy | QCStrategy
    per_restart_values: list[float]
    rounds_used: list[int]
    monotone_ok: bool
    seed: int
    ancilla_dims: tuple[int, int]


@dataclass(frozen=True)
class SweepRow:
    ancilla_dims: tuple[int, int]
    n_total: int
    lower_bound: float
    restarts_used: int
    rounds: int
    wall_seconds: float
    report: SeeSawReport = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class RelationReport:
    """Witness for the value relation between a game and its lift.

    The lifted value at ancilla product n*m*N must reach at least
    1 - (1 - v)/( n*m) where v is the source value at ancilla product N.
    ``value_enlg_adapted`` comes from explicitly lifting the best source
    strategy, so ``certified`` does not depend on the lifted see-saw
    escaping local optima.
    """

    value_qc: float
    value_enlg_seesaw: float
    value_enlg_adapted: float
    bound: float
    certified: bool
    margin: float


def helstrom_update(r_diff, policy: NumericPolicy = DEFAULT_POLICY) -> tuple[np.ndarray, np.ndarray]:
    """Optimal binary POVM for a Hermitian difference operator.

    Returns ``(E0, E1)`` with E0 the projector onto the eigenspaces of
    ``r_diff`` with nonnegative eigenvalue (zeros count toward outcome 0)
    and E1 its complement.  Among all binary POVMs (E0', E1') this maximizes
    <E0', r_diff>, hence the two-term objective it came from.
    """
    values, vectors = hermitian_eig(r_diff, policy)
    cols = vectors[:, values >= 0.0]
    e0 = cols @ cols.conj().T
    e0 = (e0 + e0.conj().T) / 2.0
    return e0, identity(r_diff.shape[0]) - e0


def state_update_enlg(
    game: ExtendedGame,
    alice_povms: dict[int, dict[int, np.ndarray]],
    bob_povms: dict[int, dict[int, np.ndarray]],
    policy: NumericPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Best shared state for fixed measurements: top eigenvector of the payoff."""
    payoff = enlg_payoff_operator(game, alice_povms, bob_povms)
    _, vectors = hermitian_eig(payoff, policy)
    top = vectors[:, 0]
    return np.outer(top, top.conj())


# ---------------------------------------------------------------------------
# Random initialization


def _haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[np.abs(diag) == 0.0] = 1.0
    return q * (diag / np.abs(diag))[np.newaxis, :]


def _random_split_povm(d: int, rng: np.random.Generator) -> dict[int, np.ndarray]:
    """Haar-conjugated standard-basis split, outcome labels shuffled.

    The label shuffle matters at d = 1, where conjugation alone would pin
    every initialization to the same deterministic answer.
    """
    half = (d + 1) // 2
    e0 = np.zeros((d, d), dtype=complex)
    e0[np.arange(half), np.arange(half)] = 1.0
    u = _haar_unitary(d, rng)
    e0 = u @ e0 @ u.conj().T
    e0 = (e0 + e0.conj().T) / 2.0
    if rng.integers(0, 2) == 1:
        e0 = identity(d) - e0
    return {0: e0, 1: identity(d) - e0}


# ---------------------------------------------------------------------------
# See-saw on extended nonlocal games


def _enlg_alice_reduced(game: ExtendedGame, sigma6: np.ndarray,
                        dims: tuple[int, int, int],
                        bob_povms, x: int, a: int) -> np.ndarray:
    """Operator M with <A, M> = the objective terms containing A^x_a."""
    du, dr, dv = dims
    side = dr * dv
    k = np.zeros((side, side), dtype=complex)
    ny = game.question_sets[1]
    for y in range(ny):
        weight = game.pi[(x, y)]
        if weight == 0.0:
            continue
        for b, e in sorted(bob_povms[y].items()):
            k += weight * kron(game.ref_ops[(a, b, x, y)], e)
    product = kron(identity(du), k) @ sigma6
    return partial_trace(product, (du, dr, dv), keep=(0,))


def _enlg_bob_reduced(game: ExtendedGame, sigma6: np.ndarray,
                      dims: tuple[int, int, int],
                      alice_povms, y: int, b: int) -> np.ndarray:
    du, dr, dv = dims
    side = du * dr
    k = np.zeros((side, side), dtype=complex)
    nx = game.question_sets[0]
    for x in range(nx):
        weight = game.pi[(x, y)]
        if weight == 0.0:
            continue
        for a, e in sorted(alice_povms[x].items()):
            k += weight * kron(e, game.ref_ops[(a, b, x, y)])
    product = kron(k, identity(dv)) @ sigma6
    return partial_trace(product, (du, dr, dv), keep=(2,))


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def seesaw_enlg(
    game: ExtendedGame,
    config: SeeSawConfig,
    warm_start: ENLGStrategy | None = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> SeeSawReport:
    """Lower-bound the entangled value of an extended nonlocal game.

    Each restart alternates exact block updates (Alice's per-question
    measurements, then Bob's, then the shared state) until the gain of a
    full round drops below ``config.improve_tol`` or ``config.max_rounds``
    is hit.  The objective re-evaluated after every round is non-decreasing
    up to 1e-10.

    Args:
        game: target game; answer alphabets must both be binary.
        config: run parameters.
        warm_start: optional strategy seeding the first restart, e.g. an
            embedded lower-dimensional optimum or an adapted strategy.
        policy: tolerance policy.

    Returns:
        Report with the best strategy found; its value is certified by
        independent re-evaluation before returning.
    """
    if game.answer_sets != (2, 2):
        raise UnsupportedAnswerAlphabetError(
            f"see-saw requires binary answers, got {game.answer_sets}"
        )
    du, dv = (int(d) for d in config.ancilla_dims)
    nx, ny = game.question_sets
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    best_value = -np.inf
    best_strategy: ENLGStrategy | None = None
    per_restart: list[float] = []
    rounds_used: list[int] = []
    monotone_ok = True

    for r in range(config.restarts):
        rng = np.random.Generator(np.random.Philox(seeds[r]))
        if r == 0 and warm_start is not None:
            alice = {x: dict(warm_start.alice_povms[x]) for x in range(nx)}
            bob = {y: dict(warm_start.bob_povms[y]) for y in range(ny)}
            sigma = np.array(warm_start.sigma)
            value = enlg_win_prob(game, ENLGStrategy(sigma, (du, game.ref_dim, dv), alice, bob), policy)
        else:
            alice = {x: _random_split_povm(du, rng) for x in range(nx)}
            bob = {y: _random_split_povm(dv, rng) for y in range(ny)}
            sigma = state_update_enlg(game, alice, bob, policy)
            value = enlg_win_prob(game, ENLGStrategy(sigma, (du, game.ref_dim, dv), alice, bob), policy)

        rounds = 0
        for _ in range(config.max_rounds):
            rounds += 1
            for x in range(nx):
                m0 = _enlg_alice_reduced(game, sigma, (du, game.ref_dim, dv), bob, x, 0)
                m1 = _enlg_alice_reduced(game, sigma, (du, game.ref_dim, dv), bob, x, 1)
                e0, e1 = helstrom_update(_hermitize(m0 - m1), policy)
                alice[x] = {0: e0, 1: e1}
            for y in range(ny):
                m0 = _enlg_bob_reduced(game, sigma, (du, game.ref_dim, dv), alice, y, 0)
                m1 = _enlg_bob_reduced(game, sigma, (du, game.ref_dim, dv), alice, y, 1)
                e0, e1 = helstrom_update(_hermitize(m0 - m1), policy)
                bob[y] = {0: e0, 1: e1}
            sigma = state_update_enlg(game, alice, bob, policy)
            new_value = enlg_win_prob(
                game, ENLGStrategy(sigma, (du, game.ref_dim, dv), alice, bob), policy
            )
            if new_value < value - 1e-10:
                monotone_ok = False
            gain = new_value - value
            value = new_value
            if gain < config.improve_tol:
                break
        per_restart.append(value)
        rounds_used.append(rounds)
        if value > best_value:
            best_value = value
            best_strategy = ENLGStrategy(sigma, (du, game.ref_dim, dv), alice, bob)

    certified = enlg_win_prob(game, best_strategy, policy)
    if abs(certified - best_value) > 1e-9:
        raise ToolkitError(
            f"reported value {best_value!r} disagrees with re-evaluation {certified!r}"
        )
    return SeeSawReport(
        best_value=certified,
        best_strategy=best_strategy,
        per_restart_values=per_restart,
        rounds_used=rounds_used,
        monotone_ok=monotone_ok,
        seed=config.seed,
        ancilla_dims=(du, dv),
    )


# ---------------------------------------------------------------------------
# See-saw on quantum-classical games


def _qc_alice_reduced(game: QCGame, state5: np.ndarray, dims5, bob_povm, a: int) -> np.ndarray:
    du, n, s, m, dv = dims5
    side = s * m * dv
    k = np.zeros((side, side), dtype=complex)
    for b, e in sorted(bob_povm.items()):
        k += kron(game.win_ops[(a, b)], e)
    product = kron(identity(du * n), k) @ state5
    return partial_trace(product, (du * n, s, m * dv), keep=(0,))


def _qc_bob_reduced(game: QCGame, state5: np.ndarray, dims5, alice_povm, b: int) -> np.ndarray:
    du, n, s, m, dv = dims5
    side = du * n * s
    k = np.zeros((side, side), dtype=complex)
    for a, e in sorted(alice_povm.items()):
        k += kron(e, game.win_ops[(a, b)])
    product = kron(k, identity(m * dv)) @ state5
    return partial_trace(product, (du * n, s, m * dv), keep=(2,))


def _qc_state_operator(game: QCGame, dims: tuple[int, int], alice_povm, bob_povm) -> np.ndarray:
    """Operator F on U (x) V with <sigma, F> = the objective."""
    du, dv = dims
    n, s, m = game.dims
    side = du * n * s * m * dv
    payoff = np.zeros((side, side), dtype=complex)
    for (a, b), q in sorted(game.win_ops.items()):
        payoff += kron(alice_povm[a], kron(q, bob_povm[b]))
    # Undo the question routing: view the payoff on (U, V, X, S, Y).
    back = permute_registers(payoff, (du, n, s, m, dv), (0, 4, 1, 2, 3))
    env = back @ kron(identity(du * dv), game.rho)
    return partial_trace(env, (du, dv, n, s, m), keep=(0, 1))


def seesaw_qc(
    game: QCGame,
    config: SeeSawConfig,
    warm_start: QCStrategy | None = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> SeeSawReport:
    """Lower-bound the entangled value of a quantum-classical game.

    Same alternation as :func:`seesaw_enlg` with single POVMs per player:
    Alice on U (x) X, Bob on Y (x) V, shared state on U (x) V.
    """
    if game.answer_sets != (2, 2):
        raise UnsupportedAnswerAlphabetError(
            f"see-saw requires binary answers, got {game.answer_sets}"
        )
    du, dv = (int(d) for d in config.ancilla_dims)
    n, s, m = game.dims
    dims5 = (du, n, s, m, dv)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    best_value = -np.inf
    best_strategy: QCStrategy | None = None
    per_restart: list[float] = []
    rounds_used: list[int] = []
    monotone_ok = True

    for r in range(config.restarts):
        rng = np.random.Generator(np.random.Philox(seeds[r]))
        if r == 0 and warm_start is not None:
            alice = dict(warm_start.alice_povm)
            bob = dict(warm_start.bob_povm)
            sigma = np.array(warm_start.sigma)
        else:
            alice = _random_split_povm(du * n, rng)
            bob = _random_split_povm(m * dv, rng)
            f = _hermitize(_qc_state_operator(game, (du, dv), alice, bob))
            _, vectors = hermitian_eig(f, policy)
            sigma = np.outer(vectors[:, 0], vectors[:, 0].conj())
        strategy = QCStrategy(sigma, (du, dv), alice, bob)
        value = qc_win_prob(game, strategy, policy)

        rounds = 0
        for _ in range(config.max_rounds):
            rounds += 1
            state5 = qc_joint_state(game, QCStrategy(sigma, (du, dv), alice, bob))
            m0 = _qc_alice_reduced(game, state5, dims5, bob, 0)
            m1 = _qc_alice_reduced(game, state5, dims5, bob, 1)
            e0, e1 = helstrom_update(_hermitize(m0 - m1), policy)
            alice = {0: e0, 1: e1}
            m0 = _qc_bob_reduced(game, state5, dims5, alice, 0)
            m1 = _qc_bob_reduced(game, state5, dims5, alice, 1)
            e0, e1 = helstrom_update(_hermitize(m0 - m1), policy)
            bob = {0: e0, 1: e1}
            f = _hermitize(_qc_state_operator(game, (du, dv), alice, bob))
            _, vectors = hermitian_eig(f, policy)
            sigma = np.outer(vectors[:, 0], vectors[:, 0].conj())
            new_value = qc_win_prob(game, QCStrategy(sigma, (du, dv), alice, bob), policy)
            if new_value < value - 1e-10:
                monotone_ok = False
            gain = new_value - value
            value = new_value
            if gain < config.improve_tol:
                break
        per_restart.append(value)
        rounds_used.append(rounds)
        if value > best_value:
            best_value = value
            best_strategy = QCStrategy(sigma, (du, dv), alice, bob)

    certified = qc_win_prob(game, best_strategy, policy)
    if abs(certified - best_value) > 1e-9:
        raise ToolkitError(
            f"reported value {best_value!r} disagrees with re-evaluation {certified!r}"
        )
    return SeeSawReport(
        best_value=certified,
        best_strategy=best_strategy,
        per_restart_values=per_restart,
        rounds_used=rounds_used,
        monotone_ok=monotone_ok,
        seed=config.seed,
        ancilla_dims=(du, dv),
    )


# ---------------------------------------------------------------------------
# Dimension embeddings and sweeps


def embed_enlg_strategy(strategy: ENLGStrategy, new_du: int, new_dv: int) -> ENLGStrategy:
    """Pad ancillas by direct sum; the value is preserved exactly.

    New ancilla directions carry no state weight; POVM completeness on them
    is absorbed into outcome 0.
    """
    du, dr, dv = strategy.dims
    if new_du < du or new_dv < dv:
        raise ToolkitError(f"cannot shrink ancillas {strategy.dims[0::2]} -> {(new_du, new_dv)}")
    ju = np.eye(new_du, du, dtype=complex)
    jv = np.eye(new_dv, dv, dtype=complex)
    pad_u = identity(new_du) - ju @ ju.conj().T
    pad_v = identity(new_dv) - jv @ jv.conj().T
    big = kron(ju, kron(identity(dr), jv))
    sigma = big @ strategy.sigma @ big.conj().T
    alice = {
        x: {a: ju @ e @ ju.conj().T + (pad_u if a == 0 else 0.0) for a, e in povm.items()}
        for x, povm in strategy.alice_povms.items()
    }
    bob = {
        y: {b: jv @ e @ jv.conj().T + (pad_v if b == 0 else 0.0) for b, e in povm.items()}
        for y, povm in strategy.bob_povms.items()
    }
    return ENLGStrategy(sigma, (new_du, dr, new_dv), alice, bob)


def embed_qc_strategy(strategy: QCStrategy, game: QCGame, new_du: int, new_dv: int) -> QCStrategy:
    """Pad a quantum-classical strategy's ancillas by direct sum."""
    du, dv = strategy.dims
    n, _, m = game.dims
    if new_du < du or new_dv < dv:
        raise ToolkitError(f"cannot shrink ancillas {strategy.dims} -> {(new_du, new_dv)}")
    ju = np.eye(new_du, du, dtype=complex)
    jv = np.eye(new_dv, dv, dtype=complex)
    pad_u = identity(new_du) - ju @ ju.conj().T
    pad_v = identity(new_dv) - jv @ jv.conj().T
    sigma = kron(ju, jv) @ strategy.sigma @ kron(ju, jv).conj().T
    jux = kron(ju, identity(n))
    jvy = kron(identity(m), jv)
    alice = {
        a: jux @ e @ jux.conj().T + (kron(pad_u, identity(n)) if a == 0 else 0.0)
        for a, e in strategy.alice_povm.items()
    }
    bob = {
        b: jvy @ e @ jvy.conj().T + (kron(identity(m), pad_v) if b == 0 else 0.0)
        for b, e in strategy.bob_povm.items()
    }
    return QCStrategy(sigma, (new_du, new_dv), alice, bob)


def _dim_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def sweep_enlg(
    game: ExtendedGame,
    dims_list: list[tuple[int, int]],
    config: SeeSawConfig,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> list[SweepRow]:
    """Run see-saw at each ancilla size, warm-starting from the previous best.

    ``dims_list`` must be componentwise non-decreasing so each optimum
    embeds into the next size; this makes the lower-bound column
    non-decreasing down the rows.
    """
    rows: list[SweepRow] = []
    prev: ENLGStrategy | None = None
    for i, (du, dv) in enumerate(dims_list):
        if prev is not None and (du < rows[-1].ancilla_dims[0] or dv < rows[-1].ancilla_dims[1]):
            raise ToolkitError("ancilla dims must be componentwise non-decreasing across a sweep")
        cfg = replace(config, ancilla_dims=(du, dv), seed=_dim_seed(config.seed, i))
        warm = embed_enlg_strategy(prev, du, dv) if prev is not None else None
        started = time.perf_counter()
        report = seesaw_enlg(game, cfg, warm_start=warm, policy=policy)
        wall = time.perf_counter() - started
        rows.append(
            SweepRow(
                ancilla_dims=(du, dv),
                n_total=du * dv,
                lower_bound=report.best_value,
                restarts_used=cfg.restarts,
                rounds=sum(report.rounds_used),
                wall_seconds=wall,
                report=report,
            )
        )
        prev = report.best_strategy
    return rows


def sweep_qc(
    game: QCGame,
    dims_list: list[tuple[int, int]],
    config: SeeSawConfig,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> list[SweepRow]:
    """Quantum-classical analogue of :func:`sweep_enlg`."""
    rows: list[SweepRow] = []
    prev: QCStrategy | None = None
    for i, (du, dv) in enumerate(dims_list):
        if prev is not None and (du < rows[-1].ancilla_dims[0] or dv < rows[-1].ancilla_dims[1]):
            raise ToolkitError("ancilla dims must be componentwise non-decreasing across a sweep")
        cfg = replace(config, ancilla_dims=(du, dv), seed=_dim_seed(config.seed, i))
        warm = embed_qc_strategy(prev, game, du, dv) if prev is not None else None
        started = time.perf_counter()
        report = seesaw_qc(game, cfg, warm_start=warm, policy=policy)
        wall = time.perf_counter() - started
        rows.append(
            SweepRow(
                ancilla_dims=(du, dv),
                n_total=du * dv,
                lower_bound=report.best_value,
                restarts_used=cfg.restarts,
                rounds=sum(report.rounds_used),
                wall_seconds=wall,
                report=report,
            )
        )
        prev = report.best_strategy
    return rows


def value_relation_check(
    game: QCGame,
    config: SeeSawConfig,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> RelationReport:
    """Witness that lifting can only shrink the losing probability.

    Runs see-saw on the source game at the configured ancilla dims (du, dv),
    lifts the best strategy found, and checks the lifted value against
    1 - (1 - v)/(n*m).  The lifted see-saw runs at ancilla dims
    (du*n, m*dv) with the adapted strategy seeding its first restart.
    """
    n, _, m = game.dims
    du, dv = config.ancilla_dims
    source = seesaw_qc(game, config, policy=policy)
    lifted_game = build_enlg(game, policy)
    adapted, receipt = adapt_qc_to_enlg(game, source.best_strategy, policy)
    value_adapted = 1.0 - receipt.target_loss
    lifted_cfg = replace(
        config,
        ancilla_dims=(du * n, m * dv),
        seed=_dim_seed(config.seed, 10_007),
    )
    lifted = seesaw_enlg(lifted_game, lifted_cfg, warm_start=adapted, policy=policy)
    bound = 1.0 - (1.0 - source.best_value) / (n * m)
    achieved = max(lifted.best_value, value_adapted)
    return RelationReport(
        value_qc=source.best_value,
        value_enlg_seesaw=lifted.best_value,
        value_enlg_adapted=value_adapted,
        bound=bound,
        certified=achieved >= bound - 1e-8,
        margin=achieved - bound,
    )
