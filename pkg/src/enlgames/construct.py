"""Builders that turn quantum-classical games into extended nonlocal games.

The lift replaces the referee's quantum question registers with classical
questions indexing a discrete Weyl operator basis.  Players seed a referee
register R = X (x) Y through their shared state; the referee's measurement
for questions (x, y) and answers (a, b) penalizes exactly the states that
fail a teleportation-style consistency test against the original game.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, ValidationFailedError
from .linalg import adjoint, identity, kron, partial_trace
from .model import ExtendedGame, QCGame, validate_qc_game
from .policy import DEFAULT_POLICY, NumericPolicy

__all__ = [
    "WeylBasis",
    "weyl_basis",
    "MaxEntangledState",
    "max_entangled",
    "ReducedOps",
    "reduce_qc",
    "build_enlg",
    "build_rv_game",
    "embed_nonlocal_game",
    "chsh_game",
]


@dataclass(frozen=True)
class WeylBasis:
    """Discrete Weyl operator basis of a d-dimensional register.

    ``ops[j*d + k]`` is Shift^j Clock^k where Shift|l> = |l+1 mod d> and
    Clock|l> = exp(2 pi i l / d)|l>.  The d^2 operators are unitary and
    pairwise orthogonal with <W_i, W_j> = d delta_ij; no global phases are
    applied.  For d = 2 this is the Pauli family (I, Z, X, XZ).
    """

    d: int
    ops: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, flat: int) -> np.ndarray:
        return self.ops[flat]


def weyl_basis(d: int) -> WeylBasis:
    """Build the d^2-element discrete Weyl basis, flat index j*d + k."""
    if int(d) < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d}")
    d = int(d)
    ops = []
    for j in range(d):
        for k in range(d):
            w = np.zeros((d, d), dtype=complex)
            for l in range(d):
                w[(l + j) % d, l] = np.exp(2j * np.pi * l * k / d)
            w.setflags(write=False)
            ops.append(w)
    return WeylBasis(d=d, ops=tuple(ops))


@dataclass(frozen=True)
class MaxEntangledState:
    """Maximally entangled pair state (1/sqrt(n)) sum_j |j>|j>."""

    n: int
    vector: np.ndarray

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


def max_entangled(n: int) -> MaxEntangledState:
    if int(n) < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {n}")
    n = int(n)
    v = np.zeros(n * n, dtype=complex)
    for j in range(n):
        v[j * n + j] = 1.0 / math.sqrt(n)
    v.setflags(write=False)
    return MaxEntangledState(n=n, vector=v)


@dataclass(frozen=True)
class ReducedOps:
    """Referee-side reductions of a quantum-classical game.

    ``xi`` is the state on X (x) Y after tracing out S; ``xi_ab`` traces out
    S against the win effect Q_ab, so 0 <= xi_ab <= xi and the xi_ab sum to
    xi when the win effects sum to the identity.
    """

    xi: np.ndarray
    xi_ab: dict[tuple[int, int], np.ndarray]


def _require_valid_qc(game: QCGame, policy: NumericPolicy) -> None:
    report = validate_qc_game(game, policy)
    if not report.ok:
        raise ValidationFailedError(report)


def reduce_qc(game: QCGame, policy: NumericPolicy = DEFAULT_POLICY) -> ReducedOps:
    """Trace the referee register S out of a validated game."""
    _require_valid_qc(game, policy)
    n, s, m = game.dims
    dims = (n, s, m)
    xi = partial_trace(game.rho, dims, keep=(0, 2))
    xi_ab = {}
    for (a, b), q in sorted(game.win_ops.items()):
        sandwiched = kron(identity(n), kron(q, identity(m))) @ game.rho
        xi_ab[(a, b)] = partial_trace(sandwiched, dims, keep=(0, 2))
    return ReducedOps(xi=xi, xi_ab=xi_ab)


def build_enlg(game: QCGame, policy: NumericPolicy = DEFAULT_POLICY) -> ExtendedGame:
    """Lift a quantum-classical game to an extended nonlocal game.

    Questions are pairs of Weyl indices, x over n^2 choices for Alice and y
    over m^2 for Bob, drawn uniformly.  The referee register has dimension
    n*m and the measurement operators are

        P_abxy = I - (U_x (x) V_y) (xi^T - xi_ab^T) (U_x (x) V_y)*

    with transposes taken in the standard basis of X (x) Y.  Since
    0 <= xi_ab <= xi <= I, every P_abxy is a valid effect.

    Args:
        game: validated source game.
        policy: tolerance policy for the validation gate.

    Returns:
        The lifted game with question sets (n^2, m^2), uniform question
        distribution, and referee dimension n*m.
    """
    reduced = reduce_qc(game, policy)
    n, _, m = game.dims
    alice_basis = weyl_basis(n)
    bob_basis = weyl_basis(m)
    nx, ny = n * n, m * m
    weight = 1.0 / (nx * ny)
    pi = {(x, y): weight for x in range(nx) for y in range(ny)}
    eye = identity(n * m)
    xi_t = reduced.xi.T
    ref_ops = {}
    for (a, b), xi_ab in sorted(reduced.xi_ab.items()):
        gap = xi_t - xi_ab.T
        for x in range(nx):
            for y in range(ny):
                u = kron(alice_basis[x], bob_basis[y])
                ref_ops[(a, b, x, y)] = eye - u @ gap @ adjoint(u)
    return ExtendedGame(
        pi=pi,
        ref_dim=n * m,
        ref_ops=ref_ops,
        question_sets=(nx, ny),
        answer_sets=game.answer_sets,
    )


def build_rv_game() -> ExtendedGame:
    """Fixed catalog game on a two-qutrit referee register.

    Both players receive one of nine Weyl indices for dimension three,
    uniformly.  Winning requires the answer parity c = a xor b; the referee
    measures

        P_abxy = I - (U_x (x) U_y) |g_c><g_c| (U_x (x) U_y)*

    where g_0 = (1/sqrt 2)|00> + (1/2)|11> + (1/2)|22> and g_1 flips the
    signs on |11> and |22>.  The entangled value climbs toward 1 as the
    players' ancilla dimension grows but stays below 1 at any fixed size.
    """
    basis = weyl_basis(3)
    gamma0 = np.zeros(9, dtype=complex)
    gamma0[0] = 1.0 / math.sqrt(2.0)
    gamma0[4] = 0.5
    gamma0[8] = 0.5
    gamma1 = gamma0.copy()
    gamma1[4] = -0.5
    gamma1[8] = -0.5
    penalties = (np.outer(gamma0, gamma0.conj()), np.outer(gamma1, gamma1.conj()))
    eye = identity(9)
    pi = {(x, y): 1.0 / 81.0 for x in range(9) for y in range(9)}
    ref_ops = {}
    for a in range(2):
        for b in range(2):
            pen = penalties[a ^ b]
            for x in range(9):
                for y in range(9):
                    u = kron(basis[x], basis[y])
                    ref_ops[(a, b, x, y)] = eye - u @ pen @ adjoint(u)
    return ExtendedGame(pi=pi, ref_dim=9, ref_ops=ref_ops,
                        question_sets=(9, 9), answer_sets=(2, 2))


def embed_nonlocal_game(pi: dict[tuple[int, int], float], predicate,
                        answer_sets: tuple[int, int] = (2, 2)) -> ExtendedGame:
    """Embed a classical-verdict nonlocal game as a trivial-referee game.

    The referee register is one-dimensional and each measurement operator is
    the 1x1 matrix [predicate(a, b, x, y)], so the quantum referee adds
    nothing and the value coincides with the nonlocal game's entangled value.

    Args:
        pi: question distribution over contiguous 0-based pairs.
        predicate: callable (a, b, x, y) -> truthy for a win.
        answer_sets: ``(|A|, |B|)``.
    """
    nx = max(x for x, _ in pi) + 1
    ny = max(y for _, y in pi) + 1
    na, nb = answer_sets
    ref_ops = {}
    for a in range(na):
        for b in range(nb):
            for x in range(nx):
                for y in range(ny):
                    value = 1.0 if predicate(a, b, x, y) else 0.0
                    ref_ops[(a, b, x, y)] = np.array([[value]], dtype=complex)
    return ExtendedGame(pi=dict(pi), ref_dim=1, ref_ops=ref_ops,
                        question_sets=(nx, ny), answer_sets=answer_sets)


def chsh_game() -> ExtendedGame:
    """The XOR game with win condition a xor b = x and y, uniform questions."""
    pi = {(x, y): 0.25 for x in range(2) for y in range(2)}
    return embed_nonlocal_game(pi, lambda a, b, x, y: (a ^ b) == (x & y))
