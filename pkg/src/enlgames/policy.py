"""Numeric tolerance policy used by every validation and identity check."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances applied throughout the package.

    All checks route through a policy instance so a caller can loosen or
    tighten the whole package coherently instead of patching individual
    call sites.
    """

    herm_tol: float = 1e-9        # relative Hermiticity acceptance
    eig_tol: float = 1e-9         # relative eigendecomposition residual
    psd_tol: float = 1e-9         # absolute slack on eigenvalue bounds
    trace_tol: float = 1e-10      # trace / distribution normalization
    povm_tol: float = 1e-9        # POVM completeness residual
    imag_tol: float = 1e-10       # largest tolerated imaginary part of a probability
    identity_tol: float = 1e-9    # adaptation loss-identity residual bound


DEFAULT_POLICY = NumericPolicy()
