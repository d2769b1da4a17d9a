"""Dense Hermitian positive-(semi)definite solves.

The transmit-precoder update repeatedly solves (A + mu*I) X = B with A
Hermitian PSD; Cholesky with a single diagonal-jitter retry covers the
near-singular mu = 0 case.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


class NumericalError(RuntimeError):
    """Raised when a solve is numerically singular or inputs are non-finite."""


def hermitian_solve(A: np.ndarray, mu: float, B: np.ndarray) -> np.ndarray:
    """Solve (A + mu*I) X = B for Hermitian PSD A and mu >= 0.

    Residual contract: ||(A+mu*I)X - B||_F <= 1e-9 ||B||_F.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if not (np.all(np.isfinite(A.real)) and np.all(np.isfinite(A.imag))
            and np.all(np.isfinite(B.real)) and np.all(np.isfinite(B.imag))):
        raise NumericalError("non-finite input to hermitian_solve")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got {A.shape}")
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    norm = np.max(np.abs(A)) if A.size else 0.0
    if norm > 0 and np.max(np.abs(A - A.conj().T)) > 1e-10 * norm:
        raise ValueError("A is not Hermitian to tolerance")

    M = A.shape[0]
    S = A + mu * np.eye(M, dtype=complex)
    trace_scale = max(np.trace(S).real / M, 0.0)
    pivot_floor = 1e-14 * trace_scale

    def attempt(mat):
        c, low = scipy.linalg.cho_factor(mat, lower=True, check_finite=False)
        d = np.abs(np.diag(c)) ** 2  # squared pivots
        if d.min() < pivot_floor:
            raise NumericalError(
                f"numerically singular system: pivot {d.min():.3e} below {pivot_floor:.3e}")
        return scipy.linalg.cho_solve((c, low), B, check_finite=False)

    try:
        return attempt(S)
    except np.linalg.LinAlgError:
        pass
    # one jitter retry for PSD matrices that are singular to rounding
    jitter = 1e-12 * max(trace_scale, 1.0)
    try:
        return attempt(S + jitter * np.eye(M, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky failed even with jitter: {exc}") from exc
