"""Game and strategy models, validation predicates, and exact win probabilities.

Two game families live here.  A quantum-classical game hands Alice and Bob
halves of a fixed tripartite state (X, S, Y) and scores their classical
answers with win effects on the middle register S.  An extended nonlocal
game asks classical questions drawn from a distribution and scores with
measurement operators on a quantum referee register R that the players seed
in their shared state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ToolkitError
from .linalg import as_matrix, hs_inner, identity, kron, permute_registers
from .policy import DEFAULT_POLICY, NumericPolicy


def _frozen(m) -> np.ndarray:
    out = np.array(as_matrix(m))
    out.setflags(write=False)
    return out


def clamp01(p: float) -> float:
    """Clamp a raw probability to [0, 1] for reporting."""
    return min(1.0, max(0.0, float(p)))


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class QCGame:
    """Quantum-classical game.

    Attributes:
        rho: referee's prepared state on X (x) S (x) Y; X goes to Alice and
            Y to Bob while S stays with the referee.
        dims: ``(n, s, m)`` = dims of X, S, Y.
        win_ops: answer pair (a, b) -> win effect Q_ab on S.
        answer_sets: ``(|A|, |B|)``; answers are 0-based and contiguous.
    """

    rho: np.ndarray
    dims: tuple[int, int, int]
    win_ops: dict[tuple[int, int], np.ndarray]
    answer_sets: tuple[int, int] = (2, 2)

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen(self.rho))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(
            self,
            "win_ops",
            {(int(a), int(b)): _frozen(q) for (a, b), q in self.win_ops.items()},
        )
        object.__setattr__(self, "answer_sets", tuple(int(k) for k in self.answer_sets))

    @property
    def n(self) -> int:
        return self.dims[0]

    @property
    def s(self) -> int:
        return self.dims[1]

    @property
    def m(self) -> int:
        return self.dims[2]


@dataclass(frozen=True)
class ExtendedGame:
    """Extended nonlocal game.

    Attributes:
        pi: question pair (x, y) -> probability.
        ref_dim: dimension of the referee register R.
        ref_ops: (a, b, x, y) -> measurement operator P on R with
            0 <= P <= I; winning means outcome P.
        question_sets: ``(|X|, |Y|)``; questions 0-based and contiguous.
        answer_sets: ``(|A|, |B|)``.
    """

    pi: dict[tuple[int, int], float]
    ref_dim: int
    ref_ops: dict[tuple[int, int, int, int], np.ndarray]
    question_sets: tuple[int, int]
    answer_sets: tuple[int, int] = (2, 2)

    def __post_init__(self):
        object.__setattr__(
            self, "pi", {(int(x), int(y)): float(p) for (x, y), p in self.pi.items()}
        )
        object.__setattr__(self, "ref_dim", int(self.ref_dim))
        object.__setattr__(
            self,
            "ref_ops",
            {
                (int(a), int(b), int(x), int(y)): _frozen(p)
                for (a, b, x, y), p in self.ref_ops.items()
            },
        )
        object.__setattr__(self, "question_sets", tuple(int(k) for k in self.question_sets))
        object.__setattr__(self, "answer_sets", tuple(int(k) for k in self.answer_sets))


@dataclass(frozen=True)
class QCStrategy:
    """Entangled strategy for a quantum-classical game.

    Alice measures her ancilla U together with the received X; Bob measures
    Y together with his ancilla V.

    Attributes:
        sigma: shared state on U (x) V.
        dims: ``(dim U, dim V)``.
        alice_povm: a -> POVM element on U (x) X.
        bob_povm: b -> POVM element on Y (x) V.
    """

    sigma: np.ndarray
    dims: tuple[int, int]
    alice_povm: dict[int, np.ndarray]
    bob_povm: dict[int, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen(self.sigma))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(
            self, "alice_povm", {int(a): _frozen(e) for a, e in self.alice_povm.items()}
        )
        object.__setattr__(
            self, "bob_povm", {int(b): _frozen(e) for b, e in self.bob_povm.items()}
        )


@dataclass(frozen=True)
class ENLGStrategy:
    """Entangled strategy for an extended nonlocal game.

    Attributes:
        sigma: shared state on U (x) R (x) V; the R part is handed to the
            referee before questions are asked.
        dims: ``(dim U, dim R, dim V)``.
        alice_povms: question x -> (answer a -> POVM element on U).
        bob_povms: question y -> (answer b -> POVM element on V).
    """

    sigma: np.ndarray
    dims: tuple[int, int, int]
    alice_povms: dict[int, dict[int, np.ndarray]]
    bob_povms: dict[int, dict[int, np.ndarray]]

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen(self.sigma))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(
            self,
            "alice_povms",
            {int(x): {int(a): _frozen(e) for a, e in povm.items()} for x, povm in self.alice_povms.items()},
        )
        object.__setattr__(
            self,
            "bob_povms",
            {int(y): {int(b): _frozen(e) for b, e in povm.items()} for y, povm in self.bob_povms.items()},
        )


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    code: str       # short category, e.g. "psd", "trace", "completeness"
    where: str      # offending object or index
    residual: float

    def __str__(self) -> str:
        return f"[{self.code}] {self.where}: residual {self.residual:.3e}"


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, where: str, residual: float) -> None:
        self.violations.append(Violation(code, where, float(residual)))

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: valid"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


def _check_density(report: ValidationReport, m: np.ndarray, where: str, dim: int, policy: NumericPolicy):
    if m.shape != (dim, dim):
        report.add("shape", f"{where} has shape {m.shape}, expected {(dim, dim)}", 0.0)
        return
    norm = np.linalg.norm(m)
    herm = np.linalg.norm(m - m.conj().T)
    if norm > 0.0 and herm > policy.herm_tol * norm:
        report.add("hermitian", where, herm)
        return
    trace_res = abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag)
    if trace_res > policy.trace_tol:
        report.add("trace", where, trace_res)
    low = np.linalg.eigvalsh((m + m.conj().T) / 2.0).min()
    if low < -policy.psd_tol:
        report.add("psd", where, -low)


def _check_effect(report: ValidationReport, q: np.ndarray, where: str, dim: int, policy: NumericPolicy):
    """Hermitian with spectrum inside [-tol, 1+tol]."""
    if q.shape != (dim, dim):
        report.add("shape", f"{where} has shape {q.shape}, expected {(dim, dim)}", 0.0)
        return
    norm = np.linalg.norm(q)
    herm = np.linalg.norm(q - q.conj().T)
    if norm > 0.0 and herm > policy.herm_tol * norm:
        report.add("hermitian", where, herm)
        return
    vals = np.linalg.eigvalsh((q + q.conj().T) / 2.0)
    if vals.min() < -policy.psd_tol:
        report.add("operator_bound", f"{where} below 0", -vals.min())
    if vals.max() > 1.0 + policy.psd_tol:
        report.add("operator_bound", f"{where} above 1", vals.max() - 1.0)


def _check_povm(report: ValidationReport, povm: dict[int, np.ndarray], where: str,
                dim: int, outcomes: int, policy: NumericPolicy):
    if sorted(povm) != list(range(outcomes)):
        report.add("outcome_map", f"{where} has outcomes {sorted(povm)}, expected 0..{outcomes - 1}", 0.0)
        return
    for a, e in povm.items():
        _check_effect(report, e, f"{where}[{a}]", dim, policy)
    if all(e.shape == (dim, dim) for e in povm.values()):
        total = sum(povm.values())
        comp = np.linalg.norm(total - identity(dim))
        if comp > policy.povm_tol:
            report.add("completeness", where, comp)


def validate_qc_game(game: QCGame, policy: NumericPolicy = DEFAULT_POLICY) -> ValidationReport:
    """Diagnostics for a quantum-classical game; empty report means valid."""
    report = ValidationReport("QCGame")
    n, s, m = game.dims
    if min(n, s, m) < 1:
        report.add("dims", f"dims {game.dims} must be positive", 0.0)
        return report
    _check_density(report, game.rho, "rho", n * s * m, policy)
    na, nb = game.answer_sets
    expected = {(a, b) for a in range(na) for b in range(nb)}
    if set(game.win_ops) != expected:
        report.add("answer_map", f"win_ops keys {sorted(game.win_ops)} do not cover A x B", 0.0)
        return report
    for (a, b), q in sorted(game.win_ops.items()):
        _check_effect(report, q, f"Q[{a},{b}]", s, policy)
    return report


def validate_enlg(game: ExtendedGame, policy: NumericPolicy = DEFAULT_POLICY) -> ValidationReport:
    """Diagnostics for an extended nonlocal game; empty report means valid."""
    report = ValidationReport("ExtendedGame")
    nx, ny = game.question_sets
    na, nb = game.answer_sets
    if min(nx, ny, na, nb, game.ref_dim) < 1:
        report.add("dims", "question/answer counts and ref_dim must be positive", 0.0)
        return report
    expected_q = {(x, y) for x in range(nx) for y in range(ny)}
    if set(game.pi) != expected_q:
        report.add("question_map", f"pi keys do not cover X x Y ({len(game.pi)} of {len(expected_q)})", 0.0)
        return report
    neg = min(game.pi.values())
    if neg < -1e-12:
        report.add("distribution", "pi has a negative entry", -neg)
    total = sum(game.pi.values())
    if abs(total - 1.0) > policy.trace_tol:
        report.add("distribution", "pi does not sum to 1", abs(total - 1.0))
    expected_ops = {
        (a, b, x, y) for a in range(na) for b in range(nb) for x in range(nx) for y in range(ny)
    }
    if set(game.ref_ops) != expected_ops:
        report.add(
            "operator_map",
            f"ref_ops keys do not cover A x B x X x Y ({len(game.ref_ops)} of {len(expected_ops)})",
            0.0,
        )
        return report
    for key in sorted(game.ref_ops):
        _check_effect(report, game.ref_ops[key], f"P{key}", game.ref_dim, policy)
    return report


def validate_qc_strategy(strategy: QCStrategy, game: QCGame,
                         policy: NumericPolicy = DEFAULT_POLICY) -> ValidationReport:
    report = ValidationReport("QCStrategy")
    du, dv = strategy.dims
    n, _, m = game.dims
    na, nb = game.answer_sets
    _check_density(report, strategy.sigma, "sigma", du * dv, policy)
    _check_povm(report, strategy.alice_povm, "alice_povm", du * n, na, policy)
    _check_povm(report, strategy.bob_povm, "bob_povm", m * dv, nb, policy)
    return report


def validate_enlg_strategy(strategy: ENLGStrategy, game: ExtendedGame,
                           policy: NumericPolicy = DEFAULT_POLICY) -> ValidationReport:
    report = ValidationReport("ENLGStrategy")
    du, dr, dv = strategy.dims
    nx, ny = game.question_sets
    na, nb = game.answer_sets
    if dr != game.ref_dim:
        report.add("dims", f"strategy R dim {dr} != game ref_dim {game.ref_dim}", 0.0)
    _check_density(report, strategy.sigma, "sigma", du * dr * dv, policy)
    if sorted(strategy.alice_povms) != list(range(nx)):
        report.add("question_map", "alice_povms do not cover X", 0.0)
        return report
    if sorted(strategy.bob_povms) != list(range(ny)):
        report.add("question_map", "bob_povms do not cover Y", 0.0)
        return report
    for x in range(nx):
        _check_povm(report, strategy.alice_povms[x], f"alice_povms[{x}]", du, na, policy)
    for y in range(ny):
        _check_povm(report, strategy.bob_povms[y], f"bob_povms[{y}]", dv, nb, policy)
    return report


# ---------------------------------------------------------------------------
# Win probabilities


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DimensionMismatchError(message)


def _real_probability(value: complex, what: str, policy: NumericPolicy) -> float:
    if abs(value.imag) > policy.imag_tol:
        raise ToolkitError(f"{what} has imaginary residual {value.imag:.3e}")
    return float(value.real)


def qc_joint_state(game: QCGame, strategy: QCStrategy) -> np.ndarray:
    """State on (U, X, S, Y, V) after the referee distributes X and Y.

    Tensors the players' shared state with the referee's prepared state and
    reorders registers so Alice's (U, X) sit first and Bob's (Y, V) last.
    """
    du, dv = strategy.dims
    n, s, m = game.dims
    big = kron(strategy.sigma, game.rho)              # (U, V, X, S, Y)
    return permute_registers(big, (du, dv, n, s, m), (0, 2, 3, 4, 1))


def qc_win_prob(game: QCGame, strategy: QCStrategy,
                policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Exact winning probability of a strategy in a quantum-classical game.

    Computes sum_ab <A_a (x) Q_ab (x) B_b, state> on (U, X, S, Y, V).
    Returns the raw real value (kept unclamped so residual checks can see
    any drift); use :func:`clamp01` for display.
    """
    du, dv = strategy.dims
    n, s, m = game.dims
    na, nb = game.answer_sets
    _require(strategy.sigma.shape == (du * dv, du * dv),
             f"sigma shape {strategy.sigma.shape} != ancilla dims {du}x{dv}")
    for a in range(na):
        _require(strategy.alice_povm[a].shape == (du * n, du * n),
                 f"alice_povm[{a}] shape {strategy.alice_povm[a].shape}, expected side {du * n}")
    for b in range(nb):
        _require(strategy.bob_povm[b].shape == (m * dv, m * dv),
                 f"bob_povm[{b}] shape {strategy.bob_povm[b].shape}, expected side {m * dv}")
    state = qc_joint_state(game, strategy)
    payoff = np.zeros_like(state)
    for (a, b), q in sorted(game.win_ops.items()):
        payoff += kron(strategy.alice_povm[a], kron(q, strategy.bob_povm[b]))
    return _real_probability(hs_inner(payoff, state), "win probability", policy)


def enlg_payoff_operator(game: ExtendedGame,
                         alice_povms: dict[int, dict[int, np.ndarray]],
                         bob_povms: dict[int, dict[int, np.ndarray]]) -> np.ndarray:
    """Question-averaged payoff operator sum pi(x,y) A^x_a (x) P_abxy (x) B^y_b."""
    du = next(iter(alice_povms[0].values())).shape[0]
    dv = next(iter(bob_povms[0].values())).shape[0]
    side = du * game.ref_dim * dv
    payoff = np.zeros((side, side), dtype=complex)
    for (a, b, x, y), p_op in sorted(game.ref_ops.items()):
        weight = game.pi[(x, y)]
        if weight == 0.0:
            continue
        payoff += weight * kron(alice_povms[x][a], kron(p_op, bob_povms[y][b]))
    return payoff


def enlg_win_prob(game: ExtendedGame, strategy: ENLGStrategy,
                  policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Exact winning probability of a strategy in an extended nonlocal game.

    Computes sum_xyab pi(x,y) <A^x_a (x) P_abxy (x) B^y_b, sigma> with the
    shared state on (U, R, V).  Returns the raw real value; linear in the
    shared state.
    """
    du, dr, dv = strategy.dims
    _require(dr == game.ref_dim,
             f"strategy R dim {dr} != game ref_dim {game.ref_dim}")
    _require(strategy.sigma.shape == (du * dr * dv, du * dr * dv),
             f"sigma shape {strategy.sigma.shape} != dims {(du, dr, dv)}")
    nx, ny = game.question_sets
    _require(sorted(strategy.alice_povms) == list(range(nx)), "alice povms do not cover X")
    _require(sorted(strategy.bob_povms) == list(range(ny)), "bob povms do not cover Y")
    for x in range(nx):
        for a, e in strategy.alice_povms[x].items():
            _require(e.shape == (du, du), f"alice_povms[{x}][{a}] not on the {du}-dim ancilla")
    for y in range(ny):
        for b, e in strategy.bob_povms[y].items():
            _require(e.shape == (dv, dv), f"bob_povms[{y}][{b}] not on the {dv}-dim ancilla")
    payoff = enlg_payoff_operator(game, strategy.alice_povms, strategy.bob_povms)
    return _real_probability(hs_inner(payoff, strategy.sigma), "win probability", policy)
