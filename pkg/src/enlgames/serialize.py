"""Canonical JSON files for games and strategies, CSV for sweep reports.

Complex entries are written as [re, im] pairs, matrices row-major, with
object keys sorted.  Floats print in Python's shortest round-trip form
(never more than 17 significant digits), so a canonical file survives a
load/save cycle byte for byte.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import FileFormatError, ValidationFailedError
from .model import (
    ENLGStrategy,
    ExtendedGame,
    QCGame,
    QCStrategy,
    validate_enlg,
    validate_qc_game,
)
from .policy import DEFAULT_POLICY, NumericPolicy

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "game_to_payload",
    "game_from_payload",
    "strategy_to_payload",
    "strategy_from_payload",
    "canonical_dumps",
    "save_game",
    "load_game",
    "save_strategy",
    "load_strategy",
    "CSV_HEADER",
    "sweep_csv_text",
]

CSV_HEADER = "N,lower_bound,restarts_used,rounds,wall_time_seconds"


def encode_matrix(m: np.ndarray) -> list:
    """Row-major nested lists of [re, im] pairs."""
    mat = np.asarray(m, dtype=complex)
    return [[[float(e.real), float(e.imag)] for e in row] for row in mat]


def decode_matrix(data: Any, what: str) -> np.ndarray:
    try:
        rows = [[complex(float(e[0]), float(e[1])) for e in row] for row in data]
    except (TypeError, ValueError, IndexError) as exc:
        raise FileFormatError(f"{what}: malformed matrix") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise FileFormatError(f"{what}: ragged or empty matrix")
    return np.array(rows, dtype=complex)


def _key_to_ints(key: str, arity: int, what: str) -> tuple[int, ...]:
    parts = key.split(",")
    if len(parts) != arity:
        raise FileFormatError(f"{what}: key '{key}' must have {arity} comma-separated indices")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise FileFormatError(f"{what}: key '{key}' is not integral") from exc


# ---------------------------------------------------------------------------
# Games


def game_to_payload(game: QCGame | ExtendedGame, name: str = "", description: str = "") -> dict:
    meta = {"name": name, "description": description}
    if isinstance(game, QCGame):
        n, s, m = game.dims
        return {
            "kind": "qc",
            "metadata": meta,
            "dims": {"x": n, "s": s, "y": m},
            "answers": list(game.answer_sets),
            "rho": encode_matrix(game.rho),
            "win_ops": {f"{a},{b}": encode_matrix(q) for (a, b), q in game.win_ops.items()},
        }
    if isinstance(game, ExtendedGame):
        return {
            "kind": "enlg",
            "metadata": meta,
            "questions": list(game.question_sets),
            "answers": list(game.answer_sets),
            "ref_dim": game.ref_dim,
            "pi": {f"{x},{y}": p for (x, y), p in game.pi.items()},
            "ref_ops": {
                f"{a},{b},{x},{y}": encode_matrix(p)
                for (a, b, x, y), p in game.ref_ops.items()
            },
        }
    raise FileFormatError(f"cannot serialize object of type {type(game).__name__}")


def game_from_payload(payload: dict) -> QCGame | ExtendedGame:
    try:
        kind = payload["kind"]
    except (TypeError, KeyError) as exc:
        raise FileFormatError("missing 'kind' field") from exc
    if kind == "qc":
        try:
            dims = (int(payload["dims"]["x"]), int(payload["dims"]["s"]), int(payload["dims"]["y"]))
            answers = tuple(int(k) for k in payload["answers"])
            rho = decode_matrix(payload["rho"], "rho")
            win_ops = {
                _key_to_ints(key, 2, "win_ops"): decode_matrix(mat, f"win_ops[{key}]")
                for key, mat in payload["win_ops"].items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"malformed qc game: {exc}") from exc
        return QCGame(rho=rho, dims=dims, win_ops=win_ops, answer_sets=answers)
    if kind == "enlg":
        try:
            questions = tuple(int(k) for k in payload["questions"])
            answers = tuple(int(k) for k in payload["answers"])
            ref_dim = int(payload["ref_dim"])
            pi = {
                _key_to_ints(key, 2, "pi"): float(p) for key, p in payload["pi"].items()
            }
            ref_ops = {
                _key_to_ints(key, 4, "ref_ops"): decode_matrix(mat, f"ref_ops[{key}]")
                for key, mat in payload["ref_ops"].items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"malformed enlg game: {exc}") from exc
        return ExtendedGame(pi=pi, ref_dim=ref_dim, ref_ops=ref_ops,
                            question_sets=questions, answer_sets=answers)
    raise FileFormatError(f"unknown game kind '{kind}'")


# ---------------------------------------------------------------------------
# Strategies


def strategy_to_payload(strategy: QCStrategy | ENLGStrategy,
                        name: str = "", receipt: dict | None = None) -> dict:
    meta = {"name": name}
    if isinstance(strategy, QCStrategy):
        payload = {
            "kind": "qc_strategy",
            "metadata": meta,
            "dims": list(strategy.dims),
            "sigma": encode_matrix(strategy.sigma),
            "alice_povm": {str(a): encode_matrix(e) for a, e in strategy.alice_povm.items()},
            "bob_povm": {str(b): encode_matrix(e) for b, e in strategy.bob_povm.items()},
        }
    elif isinstance(strategy, ENLGStrategy):
        payload = {
            "kind": "enlg_strategy",
            "metadata": meta,
            "dims": list(strategy.dims),
            "sigma": encode_matrix(strategy.sigma),
            "alice_povms": {
                str(x): {str(a): encode_matrix(e) for a, e in povm.items()}
                for x, povm in strategy.alice_povms.items()
            },
            "bob_povms": {
                str(y): {str(b): encode_matrix(e) for b, e in povm.items()}
                for y, povm in strategy.bob_povms.items()
            },
        }
    else:
        raise FileFormatError(f"cannot serialize object of type {type(strategy).__name__}")
    if receipt is not None:
        payload["receipt"] = receipt
    return payload


def strategy_from_payload(payload: dict) -> QCStrategy | ENLGStrategy:
    try:
        kind = payload["kind"]
    except (TypeError, KeyError) as exc:
        raise FileFormatError("missing 'kind' field") from exc
    if kind == "qc_strategy":
        try:
            dims = tuple(int(d) for d in payload["dims"])
            sigma = decode_matrix(payload["sigma"], "sigma")
            alice = {int(a): decode_matrix(e, f"alice_povm[{a}]")
                     for a, e in payload["alice_povm"].items()}
            bob = {int(b): decode_matrix(e, f"bob_povm[{b}]")
                   for b, e in payload["bob_povm"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"malformed qc strategy: {exc}") from exc
        if len(dims) != 2:
            raise FileFormatError("qc strategy dims must be a pair")
        return QCStrategy(sigma=sigma, dims=dims, alice_povm=alice, bob_povm=bob)
    if kind == "enlg_strategy":
        try:
            dims = tuple(int(d) for d in payload["dims"])
            sigma = decode_matrix(payload["sigma"], "sigma")
            alice = {
                int(x): {int(a): decode_matrix(e, f"alice_povms[{x}][{a}]")
                         for a, e in povm.items()}
                for x, povm in payload["alice_povms"].items()
            }
            bob = {
                int(y): {int(b): decode_matrix(e, f"bob_povms[{y}][{b}]")
                         for b, e in povm.items()}
                for y, povm in payload["bob_povms"].items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"malformed enlg strategy: {exc}") from exc
        if len(dims) != 3:
            raise FileFormatError("enlg strategy dims must be a triple")
        return ENLGStrategy(sigma=sigma, dims=dims, alice_povms=alice, bob_povms=bob)
    raise FileFormatError(f"unknown strategy kind '{kind}'")


# ---------------------------------------------------------------------------
# Files


def canonical_dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_game(path, game, name: str = "", description: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(game_to_payload(game, name, description)))


def load_game(path, policy: NumericPolicy = DEFAULT_POLICY,
              validate: bool = True) -> QCGame | ExtendedGame:
    """Parse and validate a game file.

    Raises FileFormatError on parse trouble and ValidationFailedError (with
    the diagnostic report attached) when the parsed game is invalid.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc
    game = game_from_payload(payload)
    if validate:
        report = validate_qc_game(game, policy) if isinstance(game, QCGame) else validate_enlg(game, policy)
        if not report.ok:
            raise ValidationFailedError(report, message=f"{path} failed validation")
    return game


def save_strategy(path, strategy, name: str = "", receipt: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(strategy_to_payload(strategy, name, receipt)))


def load_strategy(path) -> QCStrategy | ENLGStrategy:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc
    return strategy_from_payload(payload)


# ---------------------------------------------------------------------------
# Sweep reports


def sweep_csv_text(rows, include_timing: bool = False) -> str:
    """Render sweep rows as CSV under the fixed header.

    The timing column is left empty unless ``include_timing`` is set: the
    other columns are exact functions of the seed, and a deterministic file
    is the contract, so measured seconds are opt-in.
    """
    lines = [CSV_HEADER]
    for row in rows:
        wall = repr(float(row.wall_seconds)) if include_timing else ""
        lines.append(
            f"{row.n_total},{repr(float(row.lower_bound))},{row.restarts_used},{row.rounds},{wall}"
        )
    return "\n".join(lines) + "\n"
