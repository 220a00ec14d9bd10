"""Scalars, small dense complex matrices, tolerances and phase canonicalization.

All numerical data in the package is plain ``complex`` / ``numpy.ndarray`` of
``complex128``.  Representations built from unitary categorical data are only
defined up to a global phase, so most comparisons in the package go through
:func:`phase_canonicalize` or :func:`projectively_equal` rather than raw
allclose checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroMatrix, ShapeMismatch

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "phase_canonicalize",
    "projectively_equal",
    "fit_scalar",
    "matrix_to_lists",
    "matrix_from_lists",
]


@dataclass(frozen=True)
class Tolerance:
    """Tolerance policy shared by every module.

    eq_tol       entrywise equality of matrices and scalars
    residual_tol pass/fail threshold for consistency-equation residuals
    dedup_tol    rounding grid used when deduplicating group elements
    """

    eq_tol: float = 1e-9
    residual_tol: float = 1e-10
    dedup_tol: float = 1e-6

    def __post_init__(self):
        if min(self.eq_tol, self.residual_tol, self.dedup_tol) <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def _first_large_entry(m: np.ndarray, cutoff: float) -> complex | None:
    flat = np.asarray(m, dtype=complex).ravel(order="C")
    idx = np.flatnonzero(np.abs(flat) > cutoff)
    if idx.size == 0:
        return None
    return complex(flat[idx[0]])


def phase_canonicalize(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Divide out the phase of the first entry with modulus above ``dedup_tol``.

    The scan is row-major, so the result is deterministic for a fixed basis
    enumeration: the pivot entry becomes real and positive.  Idempotent.
    """
    m = np.asarray(m, dtype=complex)
    pivot = _first_large_entry(m, tol.dedup_tol)
    if pivot is None:
        raise AllZeroMatrix("no entry with modulus above dedup_tol")
    return m * (abs(pivot) / pivot)


def projectively_equal(
    a: np.ndarray, b: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> tuple[bool, complex | None]:
    """Test a = e^{i phi} b entrywise and return the fitted unit phase.

    Scalar multiples with non-unit modulus are rejected: this implements
    equality in the projective unitary group, not mere proportionality (for
    the latter see :func:`fit_scalar`).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    pivot_b = _first_large_entry(b, tol.dedup_tol)
    if pivot_b is None:
        # b is numerically zero; equal iff a is too, with phase 1
        if np.max(np.abs(a), initial=0.0) <= tol.eq_tol:
            return True, 1.0 + 0.0j
        return False, None
    # locate the same pivot position in a
    flat_b = b.ravel(order="C")
    pos = int(np.flatnonzero(np.abs(flat_b) > tol.dedup_tol)[0])
    pivot_a = a.ravel(order="C")[pos]
    if abs(pivot_a) <= tol.dedup_tol:
        return False, None
    phase = pivot_a / pivot_b
    if abs(abs(phase) - 1.0) > tol.eq_tol:
        return False, None
    phase /= abs(phase)
    if np.max(np.abs(a - phase * b)) <= tol.eq_tol:
        return True, complex(phase)
    return False, None


def fit_scalar(a: np.ndarray, b: np.ndarray) -> complex:
    """Least-squares fit of the scalar c minimizing ||a - c b||_F.

    Used for comparisons "up to a nonzero scalar" where the printed reference
    matrix carries a non-unit prefactor.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    denom = np.vdot(b, b)
    if denom == 0:
        raise AllZeroMatrix("cannot fit a scalar against the zero matrix")
    return complex(np.vdot(b, a) / denom)


def matrix_to_lists(m: np.ndarray) -> list:
    """Nested [re, im] pairs, the JSON wire format for matrices."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_lists(data: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)
