"""Dense complex linear algebra over tuples of finite-dimensional registers.

Matrices are numpy complex arrays in row-major layout.  A register tuple is
described by its local dimensions, e.g. ``(2, 4, 2)`` for a qubit, a
four-dimensional register, and another qubit; the matrix acting on the tuple
has side ``prod(dims)`` and its basis is ordered lexicographically.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyKeepSetError,
    NoConvergenceError,
    NonSquareError,
    NotAPermutationError,
    NotHermitianError,
    ShapeMismatchError,
)
from .policy import DEFAULT_POLICY, NumericPolicy

# Type aliases: matrices are carried as plain ndarrays.
ComplexMatrix = np.ndarray
RegisterShape = tuple[int, ...]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex array."""
    out = np.asarray(m, dtype=complex)
    if out.ndim != 2:
        raise ShapeMismatchError(f"expected a matrix, got an array of ndim {out.ndim}")
    return out


def _checked_dims(dims: Sequence[int]) -> RegisterShape:
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise ShapeMismatchError(f"register dimensions must be positive, got {out}")
    return out


def conjugate(m) -> np.ndarray:
    """Entrywise complex conjugate."""
    return np.conj(as_matrix(m))


def transpose(m) -> np.ndarray:
    return as_matrix(m).T.copy()


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T.copy()


def kron(a, b) -> np.ndarray:
    """Kronecker product; register tuples concatenate left to right."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    out = None
    for f in factors:
        out = as_matrix(f) if out is None else np.kron(out, as_matrix(f))
    if out is None:
        raise ShapeMismatchError("kron_all needs at least one factor")
    return out


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a* b), conjugate-linear in ``a``."""
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise ShapeMismatchError(f"shapes {am.shape} and {bm.shape} do not match")
    return complex(np.vdot(am, bm))


def frobenius(m) -> float:
    return float(np.linalg.norm(as_matrix(m)))


def hermitian_eig(
    m, policy: NumericPolicy = DEFAULT_POLICY
) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a Hermitian matrix.

    Args:
        m: square matrix with Hermiticity residual below
            ``policy.herm_tol`` relative to its Frobenius norm.
        policy: tolerance policy.

    Returns:
        ``(values, vectors)`` with real eigenvalues sorted descending and
        the matching orthonormal eigenvectors as columns.  Degenerate
        eigenspaces come back with an arbitrary orthonormal basis.
    """
    mat = as_matrix(m)
    rows, cols = mat.shape
    if rows != cols:
        raise NonSquareError(f"matrix is {rows}x{cols}")
    norm = np.linalg.norm(mat)
    residual = np.linalg.norm(mat - mat.conj().T)
    if norm > 0.0 and residual > policy.herm_tol * norm:
        raise NotHermitianError(
            f"Hermiticity residual {residual:.3e} exceeds {policy.herm_tol:.1e} * ||m||"
        )
    try:
        values, vectors = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numerically exotic
        raise NoConvergenceError(str(exc)) from exc
    return values[::-1].astype(float), vectors[:, ::-1]


def eigenvalues(m, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Descending real spectrum of a Hermitian matrix."""
    values, _ = hermitian_eig(m, policy)
    return values


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every register not listed in ``keep``.

    Args:
        m: matrix on the register tuple described by ``dims``.
        dims: local dimension of each register.
        keep: indices of the registers to retain, order-insensitive; the
            result keeps them in their original relative order.

    Returns:
        Matrix on the retained registers.
    """
    dims = _checked_dims(dims)
    mat = as_matrix(m)
    total = math.prod(dims)
    if mat.shape != (total, total):
        raise ShapeMismatchError(f"matrix shape {mat.shape} incompatible with dims {dims}")
    keep_set = sorted(set(int(k) for k in keep))
    if not keep_set:
        raise EmptyKeepSetError("partial trace must keep at least one register")
    if keep_set[0] < 0 or keep_set[-1] >= len(dims):
        raise ShapeMismatchError(f"keep set {keep_set} out of range for {len(dims)} registers")

    tensor = mat.reshape(dims + dims)
    row, col, out_row, out_col = [], [], [], []
    cursor = 0
    for idx in range(len(dims)):
        if idx in keep_set:
            r, c = _LETTERS[cursor], _LETTERS[cursor + 1]
            cursor += 2
            out_row.append(r)
            out_col.append(c)
        else:
            r = c = _LETTERS[cursor]
            cursor += 1
        row.append(r)
        col.append(c)
    expr = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    kept = math.prod(dims[i] for i in keep_set)
    return np.einsum(expr, tensor).reshape(kept, kept)


def permute_registers(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the registers of ``m``.

    ``perm[j]`` names the input register that lands in output slot ``j``,
    so ``perm = (0, 2, 1)`` sends an operator on (A, B, C) to the same
    operator viewed on (A, C, B).  Equivalent to conjugating by the
    permutation unitary of :func:`permutation_matrix`.
    """
    dims = _checked_dims(dims)
    mat = as_matrix(m)
    total = math.prod(dims)
    if mat.shape != (total, total):
        raise ShapeMismatchError(f"matrix shape {mat.shape} incompatible with dims {dims}")
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise NotAPermutationError(f"{perm} is not a permutation of 0..{len(dims) - 1}")
    k = len(dims)
    tensor = mat.reshape(dims + dims)
    axes = perm + tuple(k + p for p in perm)
    return np.transpose(tensor, axes).reshape(total, total)


def permutation_matrix(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Unitary W with W M W* == permute_registers(M, dims, perm)."""
    dims = _checked_dims(dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise NotAPermutationError(f"{perm} is not a permutation of 0..{len(dims) - 1}")
    total = math.prod(dims)
    new_dims = tuple(dims[p] for p in perm)
    w = np.zeros((total, total), dtype=complex)
    for old in range(total):
        tup = np.unravel_index(old, dims)
        new = np.ravel_multi_index(tuple(tup[p] for p in perm), new_dims)
        w[new, old] = 1.0
    return w


def identity(d: int) -> np.ndarray:
    return np.eye(int(d), dtype=complex)
