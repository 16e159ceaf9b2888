"""Small deterministic demo matrices so tests and examples need no data files."""

from __future__ import annotations

import numpy as np

__all__ = ["grcar", "kahan"]


def kahan(n: int, theta: float = 1.2) -> np.ndarray:
    """Kahan's upper-triangular matrix: graded diagonal with -cos couplings.

    A classic example with smallest singular value far below its smallest
    eigenvalue magnitude.
    """
    s, c = np.sin(theta), np.cos(theta)
    m = np.triu(-c * np.ones((n, n)), 1) + np.eye(n)
    return (np.diag(s ** np.arange(n)) @ m).astype(np.complex128)


def grcar(n: int, k: int = 3) -> np.ndarray:
    """Grcar's Toeplitz matrix: -1 subdiagonal, 1 on diagonal and k superdiagonals."""
    m = np.zeros((n, n))
    for d in range(0, k + 1):
        m += np.diag(np.ones(n - d), d)
    m -= np.diag(np.ones(n - 1), -1)
    return m.astype(np.complex128)
