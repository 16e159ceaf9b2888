"""The three structured pencil families and their reduced standard forms.

Each family pairs a Hamiltonian first member with a skew-Hamiltonian second
member whose eigenvalues ``i*r`` on the positive imaginary axis mark radii
where a target singular-value function crosses the level ``gamma`` along the
ray at angle ``theta``:

* continuous-time transient growth: ``sigma_min((r e^{i theta} I - A) / (r cos theta))``
* discrete-time transient growth:   ``sigma_min((r e^{i theta} I - A) / (r - 1))``
* distance to uncontrollability:    ``sigma_min([A - r e^{i theta} I, B])``

The reduced forms are built from explicit closed-form inverses of the second
member, never by numerical inversion, so the singularity guard is a pure
scalar test.  The raw pair is retained for structure tests and as a seam for
future structured eigensolvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import as_complex_matrix, sigma_min

__all__ = [
    "NearSingularSecondMember",
    "NonpositiveGamma",
    "PencilKind",
    "PencilPair",
    "ReducedPencil",
    "build_dtu_pencil",
    "build_kc_pencil",
    "build_kd_pencil",
    "build_pencil",
    "reduced_dtu_matrix",
    "reduced_kc_matrix",
    "reduced_kd_matrix",
    "sigma_f",
    "sigma_g",
    "sigma_h",
    "sigma_objective",
]

SINGULARITY_GUARD = 1e-12


class NearSingularSecondMember(ValueError):
    """The second pencil member is singular to within the scalar guard."""


class NonpositiveGamma(ValueError):
    """The uncontrollability pencil requires gamma > 0."""


class PencilKind(Enum):
    KREISS_CONTINUOUS = "kreiss-continuous"
    KREISS_DISCRETE = "kreiss-discrete"
    DIST_UNCONTROLLABLE = "dist-uncontrollable"


@dataclass(frozen=True)
class PencilPair:
    """Raw pencil (lhs, rhs): lhs Hamiltonian, rhs skew-Hamiltonian, order 2n."""

    lhs: np.ndarray
    rhs: np.ndarray
    kind: PencilKind
    gamma: float
    theta: float


@dataclass(frozen=True)
class ReducedPencil:
    """Standard eigenproblem ``rhs^{-1} lhs`` with the same spectrum as the pair."""

    matrix: np.ndarray
    kind: PencilKind
    gamma: float
    theta: float


def _eye_like(a: np.ndarray) -> np.ndarray:
    return np.eye(a.shape[0], dtype=np.complex128)


def _assemble(tl, tr, bl, br) -> np.ndarray:
    """2x2 block matrix by slice assignment (np.block is slow in hot loops)."""
    n = tl.shape[0]
    out = np.empty((2 * n, 2 * n), dtype=np.complex128)
    out[:n, :n] = tl
    out[:n, n:] = tr
    out[n:, :n] = bl
    out[n:, n:] = br
    return out


def reduced_kc_matrix(a: np.ndarray, gamma: float, theta: float) -> np.ndarray:
    """Closed-form reduced matrix of the continuous-time pencil."""
    gc = gamma * np.cos(theta)
    if abs(1.0 - abs(gc)) <= SINGULARITY_GUARD:
        raise NearSingularSecondMember(
            f"|gamma*cos(theta)| = {abs(gc)!r} within 1e-12 of 1"
        )
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    ah = a.conj().T
    s = 1j / (1.0 - gc * gc)
    return _assemble(s * e_m * a, s * gc * ah, s * gc * a, s * e_p * ah)


def reduced_kd_matrix(a: np.ndarray, gamma: float, theta: float) -> np.ndarray:
    """Closed-form reduced matrix of the discrete-time pencil."""
    if abs(1.0 - abs(gamma)) <= SINGULARITY_GUARD:
        raise NearSingularSecondMember(f"|gamma| = {abs(gamma)!r} within 1e-12 of 1")
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    g = gamma
    ah = a.conj().T
    eye = _eye_like(a)
    s = 1j / (1.0 - g * g)
    return _assemble(
        s * (e_m * a - g * g * eye),
        s * g * (ah - e_m * eye),
        s * g * (a - e_p * eye),
        s * (e_p * ah - g * g * eye),
    )


def reduced_dtu_matrix(a: np.ndarray, b: np.ndarray, gamma: float, theta: float) -> np.ndarray:
    """Closed-form reduced matrix of the uncontrollability pencil."""
    if gamma <= 0.0:
        raise NonpositiveGamma(f"gamma must be positive, got {gamma!r}")
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    eye = _eye_like(a)
    b_tilde = (1.0 / gamma) * (b @ b.conj().T) - gamma * eye
    return _assemble(
        1j * e_m * a, 1j * e_m * b_tilde, -1j * gamma * e_p * eye, 1j * e_p * a.conj().T
    )


def build_kc_pencil(a, gamma: float, theta: float) -> tuple[PencilPair, ReducedPencil]:
    """Continuous-time pencil at level ``gamma`` and ray angle ``theta``.

    Refuses the reduction when ``|gamma*cos(theta)|`` is within 1e-12 of 1,
    where the second member becomes singular; callers perturb gamma instead.
    """
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square A, got {a.shape}")
    reduced = reduced_kc_matrix(a, gamma, theta)
    gc = gamma * np.cos(theta)
    eye = _eye_like(a)
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    lhs = _assemble(a, 0 * eye, 0 * eye, -a.conj().T)
    rhs = _assemble(-1j * e_p * eye, 1j * gc * eye, -1j * gc * eye, 1j * e_m * eye)
    kind = PencilKind.KREISS_CONTINUOUS
    return (
        PencilPair(lhs, rhs, kind, gamma, theta),
        ReducedPencil(reduced, kind, gamma, theta),
    )


def build_kd_pencil(a, gamma: float, theta: float) -> tuple[PencilPair, ReducedPencil]:
    """Discrete-time pencil; singular second member iff ``|gamma| = 1``."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square A, got {a.shape}")
    reduced = reduced_kd_matrix(a, gamma, theta)
    eye = _eye_like(a)
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    g = gamma
    lhs = _assemble(a, -g * eye, g * eye, -a.conj().T)
    rhs = _assemble(-1j * e_p * eye, 1j * g * eye, -1j * g * eye, 1j * e_m * eye)
    kind = PencilKind.KREISS_DISCRETE
    return (
        PencilPair(lhs, rhs, kind, gamma, theta),
        ReducedPencil(reduced, kind, gamma, theta),
    )


def build_dtu_pencil(a, b, gamma: float, theta: float) -> tuple[PencilPair, ReducedPencil]:
    """Uncontrollability pencil; second member is always nonsingular."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square A, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"B must have {a.shape[0]} rows, got {b.shape}")
    reduced = reduced_dtu_matrix(a, b, gamma, theta)
    eye = _eye_like(a)
    e_p = np.exp(1j * theta)
    e_m = np.exp(-1j * theta)
    b_tilde = (1.0 / gamma) * (b @ b.conj().T) - gamma * eye
    lhs = _assemble(a, b_tilde, gamma * eye, -a.conj().T)
    rhs = _assemble(-1j * e_p * eye, 0 * eye, 0 * eye, 1j * e_m * eye)
    kind = PencilKind.DIST_UNCONTROLLABLE
    return (
        PencilPair(lhs, rhs, kind, gamma, theta),
        ReducedPencil(reduced, kind, gamma, theta),
    )


def build_pencil(kind: PencilKind, a, b, gamma: float, theta: float):
    """Dispatch to the family selected by ``kind`` (b ignored unless DTU)."""
    if kind is PencilKind.KREISS_CONTINUOUS:
        return build_kc_pencil(a, gamma, theta)
    if kind is PencilKind.KREISS_DISCRETE:
        return build_kd_pencil(a, gamma, theta)
    return build_dtu_pencil(a, b, gamma, theta)


def sigma_g(a, r: float, theta: float) -> float:
    """Continuous-time objective ``sigma_min((r e^{i theta} I - A)/(r cos theta))``.

    Returns +inf on the imaginary axis (r*cos(theta) == 0), where the
    objective blows up and no finite level set can reach.
    """
    a = np.asarray(a, dtype=np.complex128)
    denom = r * np.cos(theta)
    if denom == 0.0:
        return np.inf
    z = r * np.exp(1j * theta)
    return sigma_min((z * np.eye(a.shape[0]) - a) / denom)


def sigma_h(a, r: float, theta: float) -> float:
    """Discrete-time objective ``sigma_min((r e^{i theta} I - A)/(r - 1))``."""
    a = np.asarray(a, dtype=np.complex128)
    if r == 1.0:
        return np.inf
    z = r * np.exp(1j * theta)
    return sigma_min((z * np.eye(a.shape[0]) - a) / (r - 1.0))


def sigma_f(a, b, r: float, theta: float) -> float:
    """Uncontrollability objective ``sigma_min([A - r e^{i theta} I, B])``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    z = r * np.exp(1j * theta)
    return sigma_min(np.hstack([a - z * np.eye(a.shape[0]), b]))


def sigma_objective(kind: PencilKind, a, b, r: float, theta: float) -> float:
    """The radial objective for ``kind`` at polar point (r, theta)."""
    if kind is PencilKind.KREISS_CONTINUOUS:
        return sigma_g(a, r, theta)
    if kind is PencilKind.KREISS_DISCRETE:
        return sigma_h(a, r, theta)
    return sigma_f(a, b, r, theta)
