"""Command-line front end.

Every command prints one machine-readable JSON summary line first, then
human-readable text.  Exit codes: 0 success, 2 parse failure, 3 validation
failure, 4 dimension mismatch, 5 loss-identity residual out of bounds,
6 unsupported request.  No environment variables are consulted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import construct, optimize, serialize
from .adapt import adapt_enlg_to_qc, adapt_qc_to_enlg
from .errors import (
    DimensionMismatchError,
    FileFormatError,
    ToolkitError,
    UnsupportedAnswerAlphabetError,
    ValidationFailedError,
)
from .model import (
    ENLGStrategy,
    ExtendedGame,
    QCGame,
    QCStrategy,
    clamp01,
    enlg_win_prob,
    qc_win_prob,
    validate_enlg,
    validate_enlg_strategy,
    validate_qc_game,
    validate_qc_strategy,
)
from .policy import DEFAULT_POLICY

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_DIMENSION = 4
EXIT_RESIDUAL = 5
EXIT_UNSUPPORTED = 6

CATALOG = {
    "rv": (construct.build_rv_game, "two-qutrit referee, answer-parity penalties"),
    "chsh": (construct.chsh_game, "embedded XOR game, trivial referee register"),
}


def _emit(summary: dict, lines: list[str]) -> None:
    sys.stdout.write(json.dumps(summary, separators=(", ", ": ")) + "\n")
    for line in lines:
        sys.stdout.write(line + "\n")


def _fail(command: str, code: int, message: str, extra: dict | None = None) -> int:
    summary = {"command": command, "status": "error", "exit_code": code, "message": message}
    if extra:
        summary.update(extra)
    _emit(summary, [message])
    return code


def _game_summary(game) -> dict:
    if isinstance(game, QCGame):
        n, s, m = game.dims
        return {"kind": "qc", "dims": [n, s, m], "answers": list(game.answer_sets)}
    return {
        "kind": "enlg",
        "questions": list(game.question_sets),
        "answers": list(game.answer_sets),
        "ref_dim": game.ref_dim,
    }


# ---------------------------------------------------------------------------
# Commands


def cmd_construct(args) -> int:
    if args.catalog is not None:
        if args.catalog not in CATALOG:
            return _fail("construct", EXIT_UNSUPPORTED,
                         f"unknown catalog entry '{args.catalog}' (have: {', '.join(sorted(CATALOG))})")
        game = CATALOG[args.catalog][0]()
        serialize.save_game(args.output, game, name=args.catalog,
                            description=CATALOG[args.catalog][1])
        summary = {"command": "construct", "status": "ok", "source": f"catalog:{args.catalog}",
                   "output": str(args.output), **_game_summary(game)}
        _emit(summary, [f"wrote catalog game '{args.catalog}' to {args.output}"])
        return EXIT_OK
    if args.input is None:
        return _fail("construct", EXIT_PARSE, "construct needs an input game file or --catalog")
    source = serialize.load_game(args.input)
    if not isinstance(source, QCGame):
        return _fail("construct", EXIT_UNSUPPORTED,
                     "construct lifts quantum-classical games; input is already an extended game")
    lifted = construct.build_enlg(source)
    serialize.save_game(args.output, lifted, name=Path(args.input).stem + "-lifted",
                        description=f"lifted from {Path(args.input).name}")
    n, s, m = source.dims
    summary = {
        "command": "construct", "status": "ok", "input": str(args.input),
        "output": str(args.output), "n": n, "m": m,
        "questions": list(lifted.question_sets), "ref_dim": lifted.ref_dim,
    }
    _emit(summary, [
        f"lifted game: n={n} m={m}",
        f"question sets |X|={lifted.question_sets[0]} |Y|={lifted.question_sets[1]}",
        f"referee register dimension {lifted.ref_dim}",
        f"wrote {args.output}",
    ])
    return EXIT_OK


def _check_compat(game, strategy) -> None:
    if isinstance(game, QCGame):
        if not isinstance(strategy, QCStrategy):
            raise DimensionMismatchError(
                "game is quantum-classical but the strategy file is not a qc_strategy"
            )
        du, dv = strategy.dims
        n, _, m = game.dims
        expected_a, got_a = du * n, strategy.alice_povm[0].shape[0]
        expected_b, got_b = m * dv, strategy.bob_povm[0].shape[0]
        if expected_a != got_a or expected_b != got_b:
            raise DimensionMismatchError(
                f"game registers (n={n}, m={m}) with ancillas {strategy.dims} need POVM sides "
                f"[{expected_a}, {expected_b}], strategy has [{got_a}, {got_b}]"
            )
    else:
        if not isinstance(strategy, ENLGStrategy):
            raise DimensionMismatchError(
                "game is an extended game but the strategy file is not an enlg_strategy"
            )
        if strategy.dims[1] != game.ref_dim:
            raise DimensionMismatchError(
                f"game referee dims [{game.ref_dim}], strategy referee dims [{strategy.dims[1]}]"
            )
        nx, ny = game.question_sets
        if sorted(strategy.alice_povms) != list(range(nx)) or sorted(strategy.bob_povms) != list(range(ny)):
            raise DimensionMismatchError(
                f"game question sets {list(game.question_sets)}, strategy covers "
                f"[{len(strategy.alice_povms)}, {len(strategy.bob_povms)}]"
            )


def cmd_evaluate(args) -> int:
    game = serialize.load_game(args.game)
    strategy = serialize.load_strategy(args.strategy)
    _check_compat(game, strategy)
    if isinstance(game, QCGame):
        report = validate_qc_strategy(strategy, game)
        if not report.ok:
            raise ValidationFailedError(report, message=f"{args.strategy} failed validation")
        raw = qc_win_prob(game, strategy)
    else:
        report = validate_enlg_strategy(strategy, game)
        if not report.ok:
            raise ValidationFailedError(report, message=f"{args.strategy} failed validation")
        raw = enlg_win_prob(game, strategy)
    win = clamp01(raw)
    summary = {"command": "evaluate", "status": "ok", "game": str(args.game),
               "strategy": str(args.strategy), "win_prob": win, "raw": raw,
               **_game_summary(game)}
    _emit(summary, [f"win  {win:.12f}", f"lose {1.0 - win:.12f}"])
    return EXIT_OK


def cmd_adapt(args) -> int:
    game = serialize.load_game(args.game)
    if not isinstance(game, QCGame):
        return _fail("adapt", EXIT_UNSUPPORTED,
                     "adapt needs the quantum-classical source game file")
    strategy = serialize.load_strategy(args.strategy)
    if args.direction == "qc-to-enlg":
        if not isinstance(strategy, QCStrategy):
            return _fail("adapt", EXIT_DIMENSION,
                         "qc-to-enlg needs a qc_strategy file")
        adapted, receipt = adapt_qc_to_enlg(game, strategy)
    else:
        if not isinstance(strategy, ENLGStrategy):
            return _fail("adapt", EXIT_DIMENSION,
                         "enlg-to-qc needs an enlg_strategy file")
        adapted, receipt = adapt_enlg_to_qc(game, strategy)
    receipt_payload = {
        "source_loss": receipt.source_loss,
        "target_loss": receipt.target_loss,
        "scale": str(receipt.scale),
        "residual": receipt.residual,
    }
    serialize.save_strategy(args.output, adapted,
                            name=f"{Path(args.strategy).stem}-{args.direction}",
                            receipt=receipt_payload)
    summary = {"command": "adapt", "status": "ok", "direction": args.direction,
               "output": str(args.output), **receipt_payload}
    lines = [
        f"source loss {receipt.source_loss:.12f}",
        f"target loss {receipt.target_loss:.12f}",
        f"scale       {receipt.scale}",
        f"residual    {receipt.residual:.3e}",
        f"wrote {args.output}",
    ]
    if receipt.residual > DEFAULT_POLICY.identity_tol:
        summary["status"] = "error"
        summary["exit_code"] = EXIT_RESIDUAL
        _emit(summary, lines + ["loss identity residual out of bounds"])
        return EXIT_RESIDUAL
    _emit(summary, lines)
    return EXIT_OK


def _parse_dims(items: list[str]) -> list[tuple[int, int]]:
    dims = []
    for item in items:
        parts = item.split(",")
        if len(parts) != 2:
            raise FileFormatError(f"--dims entries look like 'du,dv'; got '{item}'")
        try:
            du, dv = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FileFormatError(f"--dims entry '{item}' is not integral") from exc
        if min(du, dv) < 1:
            raise FileFormatError(f"--dims entry '{item}' must be positive")
        dims.append((du, dv))
    for prev, cur in zip(dims, dims[1:]):
        if cur[0] < prev[0] or cur[1] < prev[1]:
            raise FileFormatError(
                f"--dims must be componentwise non-decreasing; {prev} then {cur}"
            )
    return dims


def cmd_sweep(args) -> int:
    game = serialize.load_game(args.game)
    dims = _parse_dims(args.dims)
    config = optimize.SeeSawConfig(
        ancilla_dims=dims[0],
        restarts=args.restarts,
        max_rounds=args.max_rounds,
        improve_tol=args.tol,
        seed=args.seed,
    )
    started = time.perf_counter()
    if isinstance(game, ExtendedGame):
        rows = optimize.sweep_enlg(game, dims, config)
    else:
        rows = optimize.sweep_qc(game, dims, config)
    total_wall = time.perf_counter() - started
    csv_text = serialize.sweep_csv_text(rows, include_timing=args.timing)
    Path(args.output).write_text(csv_text, encoding="utf-8")
    figure_path = None
    if not args.no_figure:
        from .figures import render_sweep_figure

        figure_path = str(Path(args.output).with_suffix(".png"))
        render_sweep_figure(rows, figure_path, title=Path(args.game).stem, seed=args.seed)
    summary = {
        "command": "sweep", "status": "ok", "game": str(args.game),
        "output": str(args.output), "figure": figure_path, "seed": args.seed,
        "restarts": args.restarts,
        "dims": [list(d) for d in dims],
        "lower_bounds": [row.lower_bound for row in rows],
        "wall_time_seconds": total_wall,
    }
    lines = [f"wrote {args.output}" + (f" and {figure_path}" if figure_path else "")]
    for row in rows:
        lines.append(
            f"N={row.n_total} (ancillas {row.ancilla_dims[0]}x{row.ancilla_dims[1]}): "
            f"lower bound {row.lower_bound:.12f} after {row.rounds} rounds"
        )
    _emit(summary, lines)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        game = serialize.load_game(args.game, validate=False)
    except FileFormatError:
        raise
    if isinstance(game, QCGame):
        report = validate_qc_game(game)
    else:
        report = validate_enlg(game)
    summary = {"command": "validate", "status": "ok" if report.ok else "invalid",
               "game": str(args.game), "violations": len(report.violations),
               **_game_summary(game)}
    _emit(summary, str(report).splitlines())
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_catalog(args) -> int:
    if args.name is None:
        summary = {"command": "catalog", "status": "ok", "entries": sorted(CATALOG)}
        _emit(summary, [f"{name}: {desc}" for name, (_, desc) in sorted(CATALOG.items())])
        return EXIT_OK
    if args.name not in CATALOG:
        return _fail("catalog", EXIT_UNSUPPORTED,
                     f"unknown catalog entry '{args.name}' (have: {', '.join(sorted(CATALOG))})")
    if args.output is None:
        return _fail("catalog", EXIT_PARSE, "catalog needs --output to write a game")
    game = CATALOG[args.name][0]()
    serialize.save_game(args.output, game, name=args.name, description=CATALOG[args.name][1])
    summary = {"command": "catalog", "status": "ok", "name": args.name,
               "output": str(args.output), **_game_summary(game)}
    _emit(summary, [f"wrote catalog game '{args.name}' to {args.output}"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enlgames",
        description="Construct extended nonlocal games out of quantum-classical games, "
                    "adapt strategies between them, and compute see-saw lower bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="lift a qc game file (or emit a catalog game)")
    p.add_argument("input", nargs="?", default=None, help="qc game JSON file")
    p.add_argument("--catalog", default=None, help="emit a named catalog game instead")
    p.add_argument("--output", required=True, help="where to write the game JSON")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("evaluate", help="exact winning probability of a strategy file")
    p.add_argument("game", help="game JSON file")
    p.add_argument("strategy", help="strategy JSON file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("adapt", help="carry a strategy across the construction")
    p.add_argument("direction", choices=["qc-to-enlg", "enlg-to-qc"])
    p.add_argument("game", help="the quantum-classical source game JSON file")
    p.add_argument("strategy", help="strategy JSON file to adapt")
    p.add_argument("--output", required=True, help="where to write the adapted strategy")
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("sweep", help="see-saw lower bounds across ancilla dimensions")
    p.add_argument("game", help="game JSON file")
    p.add_argument("--dims", nargs="+", required=True, metavar="DU,DV",
                   help="ancilla dimension pairs, componentwise non-decreasing")
    p.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    p.add_argument("--restarts", type=int, default=8, help="restarts per dimension (default 8)")
    p.add_argument("--max-rounds", type=int, default=500, help="round cap per restart (default 500)")
    p.add_argument("--tol", type=float, default=1e-9, help="per-round improvement cutoff (default 1e-9)")
    p.add_argument("--output", required=True, help="CSV file to write")
    p.add_argument("--timing", action="store_true",
                   help="record measured wall time in the CSV (breaks byte-level reproducibility)")
    p.add_argument("--no-figure", action="store_true", help="skip the figure next to the CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="validate a game file and print the report")
    p.add_argument("game", help="game JSON file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("catalog", help="list catalog games or write one")
    p.add_argument("name", nargs="?", default=None, help="catalog entry to write")
    p.add_argument("--output", default=None, help="where to write the game JSON")
    p.set_defaults(func=cmd_catalog)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        return args.func(args)
    except FileFormatError as exc:
        return _fail(command, EXIT_PARSE, str(exc))
    except ValidationFailedError as exc:
        return _fail(command, EXIT_VALIDATION, str(exc))
    except DimensionMismatchError as exc:
        return _fail(command, EXIT_DIMENSION, str(exc))
    except UnsupportedAnswerAlphabetError as exc:
        return _fail(command, EXIT_UNSUPPORTED, str(exc))
    except ToolkitError as exc:
        return _fail(command, EXIT_VALIDATION, str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
