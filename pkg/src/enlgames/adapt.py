"""Strategy adapters between a quantum-classical game and its lifted game.

Both directions ride on shared maximally entangled register pairs and the
transpose trick (M (x) I)|psi> = (I (x) M^T)|psi>.  Adapting forward divides
the losing probability by exactly n*m; adapting backward multiplies it by
exactly n*m.  Each adapter returns a receipt recording both losses and the
residual of that identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .construct import build_enlg, max_entangled, weyl_basis
from .errors import DimensionMismatchError, ValidationFailedError
from .linalg import identity, kron, kron_all, permute_registers
from .model import (
    ENLGStrategy,
    ExtendedGame,
    QCGame,
    QCStrategy,
    enlg_win_prob,
    qc_win_prob,
    validate_enlg_strategy,
    validate_qc_game,
    validate_qc_strategy,
)
from .policy import DEFAULT_POLICY, NumericPolicy

__all__ = [
    "AdaptationReceipt",
    "adapt_qc_to_enlg",
    "adapt_enlg_to_qc",
    "loss_operator_h",
    "loss_operator_g",
    "qc_environment_state",
]


@dataclass(frozen=True)
class AdaptationReceipt:
    """Bookkeeping for one adaptation.

    ``scale`` is the exact factor taking the source losing probability to
    the target losing probability: 1/(n*m) when lifting a strategy into the
    constructed game, n*m when projecting one back.  ``residual`` is
    |target_loss - scale * source_loss| and stays below the policy's
    identity tolerance for validated inputs.
    """

    source_loss: float
    target_loss: float
    scale: Fraction
    residual: float


def _gate_qc(game: QCGame, strategy: QCStrategy, policy: NumericPolicy) -> None:
    report = validate_qc_game(game, policy)
    if not report.ok:
        raise ValidationFailedError(report)
    report = validate_qc_strategy(strategy, game, policy)
    if not report.ok:
        raise ValidationFailedError(report)


def _alice_effective_povms(game: QCGame, strategy: QCStrategy) -> dict[int, dict[int, np.ndarray]]:
    """Per-question POVMs on U (x) X' induced by pre-rotating the copy by U_x^T.

    A transpose rotation on the copy register exactly undoes the U_x
    conjugation inside the constructed referee operators once the maximally
    entangled pair carries it across; conjugating by conj(U_x) instead only
    agrees for rotation families with real entries.
    """
    n = game.n
    du, _ = strategy.dims
    basis = weyl_basis(n)
    eye_u = identity(du)
    out: dict[int, dict[int, np.ndarray]] = {}
    for x in range(n * n):
        left = kron(eye_u, basis[x].conj())
        right = kron(eye_u, basis[x].T)
        out[x] = {a: left @ e @ right for a, e in sorted(strategy.alice_povm.items())}
    return out


def _bob_effective_povms(game: QCGame, strategy: QCStrategy) -> dict[int, dict[int, np.ndarray]]:
    """Per-question POVMs on Y' (x) V induced by pre-rotating the copy by V_y^T."""
    m = game.m
    _, dv = strategy.dims
    basis = weyl_basis(m)
    eye_v = identity(dv)
    out: dict[int, dict[int, np.ndarray]] = {}
    for y in range(m * m):
        left = kron(basis[y].conj(), eye_v)
        right = kron(basis[y].T, eye_v)
        out[y] = {b: left @ e @ right for b, e in sorted(strategy.bob_povm.items())}
    return out


def adapt_qc_to_enlg(
    game: QCGame, strategy: QCStrategy, policy: NumericPolicy = DEFAULT_POLICY
) -> tuple[ENLGStrategy, AdaptationReceipt]:
    """Lift a strategy for ``game`` into one for ``build_enlg(game)``.

    Alice extends her ancilla with a register X' maximally entangled with
    the referee's X slot, Bob symmetrically with Y'.  On question x Alice
    counter-rotates X' by U_x^T and plays her original measurement; the
    entangled pair then simulates the quantum question exactly, and the
    question averaging leaves a 1/(n*m) fraction of the losing probability.

    Returns:
        The lifted strategy together with its receipt; the receipt's
        residual certifies target_loss = source_loss / (n*m).
    """
    _gate_qc(game, strategy, policy)
    lifted = build_enlg(game, policy)
    n, _, m = game.dims
    du, dv = strategy.dims
    psi = max_entangled(n)
    phi = max_entangled(m)
    seed = kron(strategy.sigma, kron(psi.projector(), phi.projector()))
    # Build order (U, V, X', X, Y, Y') -> hand Alice (U, X'), the referee
    # (X, Y), and Bob (Y', V).
    sigma = permute_registers(seed, (du, dv, n, n, m, m), (0, 2, 3, 4, 5, 1))
    adapted = ENLGStrategy(
        sigma=sigma,
        dims=(du * n, n * m, m * dv),
        alice_povms=_alice_effective_povms(game, strategy),
        bob_povms=_bob_effective_povms(game, strategy),
    )
    source_loss = 1.0 - qc_win_prob(game, strategy, policy)
    target_loss = 1.0 - enlg_win_prob(lifted, adapted, policy)
    scale = Fraction(1, n * m)
    residual = abs(target_loss - source_loss / (n * m))
    return adapted, AdaptationReceipt(source_loss, target_loss, scale, residual)


def _teleport_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis {(I (x) U_x^T)|psi>} of a register pair.

    Orthonormality follows from the trace-orthogonality of the rotation
    family.  The transpose, rather than the adjoint, is what makes the
    projected strategy's losing probability land on exactly n*m times the
    source loss: pairing |psi><psi| moves one transpose across the pair, so
    a U_x^T rotation here meets the U_x conjugation inside the constructed
    referee operators head-on.
    """
    psi = max_entangled(n)
    basis = weyl_basis(n)
    return [kron(identity(n), basis[x].T) @ psi.vector for x in range(n * n)]


def adapt_enlg_to_qc(
    game: QCGame, strategy: ENLGStrategy, policy: NumericPolicy = DEFAULT_POLICY
) -> tuple[QCStrategy, AdaptationReceipt]:
    """Project a strategy for ``build_enlg(game)`` back onto ``game``.

    The players share the lifted strategy's state, reading its middle
    register as a pair of copies (X', Y') with Alice holding (U, X') and
    Bob (Y', V).  Alice measures her copy against the incoming X in the
    transpose-rotated maximally entangled basis to read off a question x,
    then plays A^x_a; Bob mirrors this.  The losing probability multiplies
    by exactly n*m.

    Args:
        game: the source quantum-classical game.
        strategy: strategy for ``build_enlg(game)``; its register split
            must match (ancilla, n*m, ancilla).
        policy: tolerance policy.

    Returns:
        The projected strategy and its receipt.
    """
    report = validate_qc_game(game, policy)
    if not report.ok:
        raise ValidationFailedError(report)
    lifted = build_enlg(game, policy)
    n, _, m = game.dims
    du, dr, dv = strategy.dims
    if dr != n * m:
        raise DimensionMismatchError(
            f"strategy referee register has dim {dr}, construction needs {n * m}"
        )
    report = validate_enlg_strategy(strategy, lifted, policy)
    if not report.ok:
        raise ValidationFailedError(report)

    psi_vectors = _teleport_basis(n)
    phi_raw = max_entangled(m)
    bob_basis = weyl_basis(m)
    # (V_y^T (x) I)|phi> on (Y, Y'): the rotation sits on the incoming game
    # register, mirroring Alice's pair up to the slot order.
    phi_vectors = [
        kron(bob_basis[y].T, identity(m)) @ phi_raw.vector for y in range(m * m)
    ]

    na, nb = game.answer_sets
    alice_povm: dict[int, np.ndarray] = {}
    for a in range(na):
        side = du * n * n
        total = np.zeros((side, side), dtype=complex)
        for x in range(n * n):
            proj = np.outer(psi_vectors[x], psi_vectors[x].conj())
            total += kron(strategy.alice_povms[x][a], proj)
        alice_povm[a] = total
    bob_povm: dict[int, np.ndarray] = {}
    for b in range(nb):
        side = m * m * dv
        total = np.zeros((side, side), dtype=complex)
        for y in range(m * m):
            proj = np.outer(phi_vectors[y], phi_vectors[y].conj())
            total += kron(proj, strategy.bob_povms[y][b])
        bob_povm[b] = total

    adapted = QCStrategy(
        sigma=strategy.sigma,
        dims=(du * n, m * dv),
        alice_povm=alice_povm,
        bob_povm=bob_povm,
    )
    source_loss = 1.0 - enlg_win_prob(lifted, strategy, policy)
    target_loss = 1.0 - qc_win_prob(game, adapted, policy)
    scale = Fraction(n * m, 1)
    residual = abs(target_loss - n * m * source_loss)
    return adapted, AdaptationReceipt(source_loss, target_loss, scale, residual)


def loss_operator_h(game: QCGame, strategy: QCStrategy,
                    policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Losing-outcome analysis operator for the lifted strategy.

    Acts on (U, X', X, Y, Y', V) grouped as Alice / referee / Bob.  Pairing
    it with the lifted strategy's initial state under the Hilbert-Schmidt
    inner product gives the lifted losing probability, i.e. the source
    losing probability divided by n*m.
    """
    _gate_qc(game, strategy, policy)
    lifted = build_enlg(game, policy)
    n, _, m = game.dims
    alice_eff = _alice_effective_povms(game, strategy)
    bob_eff = _bob_effective_povms(game, strategy)
    du, dv = strategy.dims
    side = (du * n) * (n * m) * (m * dv)
    eye_r = identity(n * m)
    out = np.zeros((side, side), dtype=complex)
    for (a, b, x, y), p_op in sorted(lifted.ref_ops.items()):
        out += lifted.pi[(x, y)] * kron_all(
            [alice_eff[x][a], eye_r - p_op, bob_eff[y][b]]
        )
    return out


def loss_operator_g(game: QCGame, strategy: ENLGStrategy,
                    policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Losing-outcome analysis operator for the projected strategy.

    Acts on (U, X', X, S, Y, Y', V).  Pairing it with the permuted tensor of
    the shared state and the game state rho (see
    :func:`qc_environment_state`) gives n*m times the lifted losing
    probability.  Its complement with Q_ab in place of (I - Q_ab) sums with
    it to the identity.
    """
    report = validate_qc_game(game, policy)
    if not report.ok:
        raise ValidationFailedError(report)
    n, s, m = game.dims
    du, dr, dv = strategy.dims
    if dr != n * m:
        raise DimensionMismatchError(
            f"strategy referee register has dim {dr}, construction needs {n * m}"
        )
    psi_vectors = _teleport_basis(n)
    bob_basis = weyl_basis(m)
    phi_raw = max_entangled(m)
    phi_vectors = [
        kron(bob_basis[y].T, identity(m)) @ phi_raw.vector for y in range(m * m)
    ]
    eye_s = identity(s)
    side = du * n * n * s * m * m * dv
    out = np.zeros((side, side), dtype=complex)
    na, nb = game.answer_sets
    for x in range(n * n):
        proj_x = np.outer(psi_vectors[x], psi_vectors[x].conj())
        for y in range(m * m):
            proj_y = np.outer(phi_vectors[y], phi_vectors[y].conj())
            for a in range(na):
                for b in range(nb):
                    out += kron_all([
                        strategy.alice_povms[x][a],
                        proj_x,
                        eye_s - game.win_ops[(a, b)],
                        proj_y,
                        strategy.bob_povms[y][b],
                    ])
    return out


def qc_environment_state(game: QCGame, strategy: QCStrategy) -> np.ndarray:
    """Joint state on (U, X', X, S, Y, Y', V) for pairing with loss_operator_g.

    Takes the projected strategy's shared state on (U, X', Y', V), tensors
    the game state rho on (X, S, Y), and routes the referee's registers into
    the middle.  The strategy's ancilla dims must factor as (du * n, m * dv).
    """
    n, s, m = game.dims
    net_u, net_v = strategy.dims
    if net_u % n != 0 or net_v % m != 0:
        raise DimensionMismatchError(
            f"ancilla dims {strategy.dims} do not factor through copies of (n, m) = {(n, m)}"
        )
    du = net_u // n
    dv = net_v // m
    big = kron(strategy.sigma, game.rho)  # (U, X', Y', V, X, S, Y)
    dims = (du, n, m, dv, n, s, m)
    return permute_registers(big, dims, (0, 1, 4, 5, 6, 2, 3))
