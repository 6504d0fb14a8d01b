"""Seeded random states, measurements, and game instances.

Everything takes an explicit ``numpy.random.Generator`` so callers control
reproducibility; nothing here touches global RNG state.
"""

from __future__ import annotations

import numpy as np

from . import model
from .linalg import identity

__all__ = [
    "haar_unitary",
    "random_pure_state",
    "random_density",
    "random_effect",
    "random_povm",
    "random_qc_game",
    "random_qc_strategy",
    "random_enlg_strategy",
]


def _ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed d x d unitary (QR of a Ginibre matrix, phases fixed)."""
    q, r = np.linalg.qr(_ginibre(d, d, rng))
    diag = np.diagonal(r).copy()
    diag[np.abs(diag) == 0.0] = 1.0
    return q * (diag / np.abs(diag))[np.newaxis, :]


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = _ginibre(d, 1, rng)[:, 0]
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (by default) density matrix from the Ginibre ensemble."""
    g = _ginibre(d, rank if rank is not None else d, rng)
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return rho / np.trace(rho).real


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random measurement effect: Hermitian with spectrum inside [0, 1]."""
    u = haar_unitary(d, rng)
    q = u @ np.diag(rng.uniform(0.0, 1.0, size=d)) @ u.conj().T
    return (q + q.conj().T) / 2.0


def random_povm(d: int, outcomes: int, rng: np.random.Generator) -> dict[int, np.ndarray]:
    """Random POVM with the given number of outcomes, generically non-projective.

    Draws a positive operator per outcome and whitens by the inverse square
    root of the sum; the last element is completed exactly to the identity.
    """
    raw = []
    for _ in range(outcomes):
        g = _ginibre(d, d, rng)
        raw.append(g @ g.conj().T)
    total = sum(raw)
    vals, vecs = np.linalg.eigh((total + total.conj().T) / 2.0)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(np.clip(vals, 1e-12, None))) @ vecs.conj().T
    povm: dict[int, np.ndarray] = {}
    acc = np.zeros((d, d), dtype=complex)
    for a in range(outcomes - 1):
        e = inv_sqrt @ raw[a] @ inv_sqrt
        e = (e + e.conj().T) / 2.0
        povm[a] = e
        acc += e
    povm[outcomes - 1] = identity(d) - acc
    return povm


def random_qc_game(
    n: int, s: int, m: int, rng: np.random.Generator, answers: tuple[int, int] = (2, 2)
) -> "model.QCGame":
    """Random game: Ginibre shared state, independent random win effects."""
    rho = random_density(n * s * m, rng)
    win_ops = {
        (a, b): random_effect(s, rng)
        for a in range(answers[0])
        for b in range(answers[1])
    }
    return model.QCGame(rho=rho, dims=(n, s, m), win_ops=win_ops, answer_sets=answers)


def random_qc_strategy(
    game: "model.QCGame", du: int, dv: int, rng: np.random.Generator
) -> "model.QCStrategy":
    n, _, m = game.dims
    na, nb = game.answer_sets
    return model.QCStrategy(
        sigma=random_density(du * dv, rng),
        dims=(du, dv),
        alice_povm=random_povm(du * n, na, rng),
        bob_povm=random_povm(m * dv, nb, rng),
    )


def random_enlg_strategy(
    game: "model.ExtendedGame", du: int, dv: int, rng: np.random.Generator
) -> "model.ENLGStrategy":
    nx, ny = game.question_sets
    na, nb = game.answer_sets
    return model.ENLGStrategy(
        sigma=random_density(du * game.ref_dim * dv, rng),
        dims=(du, game.ref_dim, dv),
        alice_povms={x: random_povm(du, na, rng) for x in range(nx)},
        bob_povms={y: random_povm(dv, nb, rng) for y in range(ny)},
    )
