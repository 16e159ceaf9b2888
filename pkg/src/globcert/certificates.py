"""Angular certificate functions for the three radial level-set tests.

For a level ``gamma`` and ray angle ``theta``, each certificate computes the
spectrum of the corresponding reduced pencil and returns the minimum of
``Arg(-i*lambda)^2`` over eigenvalues with ``Re(lambda) <= 0``.  The value is
zero exactly when the ray meets the gamma-level set (or a lower one) of the
underlying singular-value surface, and every near-axis eigenvalue nominating
such a crossing is verified by one direct sigma_min evaluation before it may
force the value to zero.  That direct recheck replaces the structured
eigensolver backup pass: a nominated point is only useful if the objective
there is at most gamma, and the recheck answers exactly that, immune to
rounding in the eigensolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_complex_matrix
from .pencils import (
    PencilKind,
    reduced_dtu_matrix,
    reduced_kc_matrix,
    reduced_kd_matrix,
    sigma_f,
    sigma_g,
    sigma_h,
)

__all__ = [
    "CandidatePoint",
    "CertificateValue",
    "EvalPolicy",
    "NearZeroPencilEigenvalue",
    "NoAcceptedCandidates",
    "eval_certificate",
    "eval_f",
    "eval_g",
    "eval_h",
    "extract_restart_points",
]

PI_SQ = math.pi * math.pi


class NearZeroPencilEigenvalue(ArithmeticError):
    """A pencil eigenvalue collapsed to numerical zero; Arg would be noise.

    Upstream preconditions (0 not an eigenvalue of A, gamma kept away from
    the singular-value collisions) make this unreachable in normal use.
    """


class NoAcceptedCandidates(RuntimeError):
    """All nominated level-set radii failed the direct sigma_min recheck."""


@dataclass(frozen=True)
class EvalPolicy:
    """Tolerances for eigenvalue classification and candidate verification.

    imag_tol is absolute after normalizing the reduced pencil by its norm;
    ellipse_delta is the half-width of the discrete-time exclusion ellipse
    ``x^2/delta^2 + y^2 = 1``; verify_tol is the relative slack on the
    recheck ``sigma_min <= gamma * (1 + verify_tol)``.
    """

    imag_tol: float = 1e-8
    ellipse_delta: float = 1e-8
    verify_tol: float = 1e-8

    def __post_init__(self):
        if self.imag_tol <= 0 or self.ellipse_delta <= 0 or self.verify_tol <= 0:
            raise ValueError("EvalPolicy tolerances must be positive")


@dataclass(frozen=True)
class CandidatePoint:
    """A nominated level-set radius on the ray, with its recheck result."""

    r: float
    theta: float
    verified_value: float
    accepted: bool


@dataclass(frozen=True)
class CertificateValue:
    """One certificate evaluation at angle ``theta``.

    ``value`` lies in [0, pi^2] and is forced to zero only when at least one
    candidate passed verification.  ``recheck_used`` records whether any
    direct sigma_min evaluations were spent at this angle.
    """

    theta: float
    value: float
    candidates: tuple[CandidatePoint, ...] = field(default_factory=tuple)
    recheck_used: bool = False

    @property
    def accepted(self) -> tuple[CandidatePoint, ...]:
        return tuple(c for c in self.candidates if c.accepted)

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0 and any(c.accepted for c in self.candidates)


def _certificate(kind, a, b, gamma, theta, policy):
    """Shared evaluation core; see eval_g/eval_h/eval_f for the contracts."""
    a = as_complex_matrix(a)
    if kind is PencilKind.KREISS_CONTINUOUS:
        matrix = reduced_kc_matrix(a, gamma, theta)
        r_floor = 0.0

        def verify(r):
            return sigma_g(a, r, theta)

    elif kind is PencilKind.KREISS_DISCRETE:
        matrix = reduced_kd_matrix(a, gamma, theta)
        r_floor = 1.0

        def verify(r):
            return sigma_h(a, r, theta)

    else:
        b = as_complex_matrix(b)
        matrix = reduced_dtu_matrix(a, b, gamma, theta)
        r_floor = 0.0

        def verify(r):
            return sigma_f(a, b, r, theta)

    lam = np.linalg.eigvals(matrix)
    scale = max(float(np.linalg.norm(matrix, 2)), np.finfo(float).tiny)
    if np.min(np.abs(lam)) < 1e-14 * scale:
        raise NearZeroPencilEigenvalue(
            f"pencil eigenvalue at {lam[np.argmin(np.abs(lam))]!r} is "
            f"numerically zero relative to the pencil norm {scale!r}"
        )

    discrete = kind is PencilKind.KREISS_DISCRETE
    if discrete:
        # exact [0, i] segment exclusion, then the eccentric ellipse guard
        on_segment = (lam.real == 0.0) & (lam.imag >= 0.0) & (lam.imag <= 1.0)
        lam = lam[~on_segment]
        d = policy.ellipse_delta
        inside = (lam.real / d) ** 2 + lam.imag**2 < 1.0
        lam = lam[~inside]

    relevant = lam[lam.real <= 0.0]
    if relevant.size == 0:
        # every surviving eigenvalue was discarded by the guards above; the
        # discarded ones near [-i, 0] would each have contributed pi^2
        value = PI_SQ
    else:
        mu = relevant / 1j  # rotate: the positive imaginary axis -> positive reals
        value = float(np.min(np.angle(mu) ** 2))

    # nominate eigenvalues close to i*[r_floor, inf) as level-set radii
    mu_all = lam / 1j
    tol = policy.imag_tol * scale
    if r_floor == 0.0:
        dist = np.where(mu_all.real >= 0.0, np.abs(mu_all.imag), np.abs(mu_all))
    else:
        dist = np.where(
            mu_all.real >= r_floor, np.abs(mu_all.imag), np.abs(mu_all - r_floor)
        )
    flagged = np.sort(mu_all[(dist <= tol) & (mu_all.real > r_floor)].real)

    candidates = []
    for r in flagged:
        r = float(r)
        if candidates and abs(r - candidates[-1].r) <= 1e-10 * max(1.0, r):
            # radii within 1e-10 relative merge, keeping the smaller recheck
            prev = candidates[-1]
            verified = verify(r)
            if verified < prev.verified_value:
                candidates[-1] = CandidatePoint(
                    r, theta, verified, verified <= gamma * (1.0 + policy.verify_tol)
                )
            continue
        verified = verify(r)
        accepted = verified <= gamma * (1.0 + policy.verify_tol)
        candidates.append(CandidatePoint(r, theta, verified, accepted))

    if any(c.accepted for c in candidates):
        value = 0.0
    return CertificateValue(
        theta=float(theta),
        value=value,
        candidates=tuple(candidates),
        recheck_used=bool(candidates),
    )


def eval_g(a, gamma: float, theta: float, policy: EvalPolicy = EvalPolicy()) -> CertificateValue:
    """Continuous-time certificate on the ray at ``theta``; zero marks a crossing."""
    return _certificate(PencilKind.KREISS_CONTINUOUS, a, None, gamma, theta, policy)


def eval_h(a, gamma: float, theta: float, policy: EvalPolicy = EvalPolicy()) -> CertificateValue:
    """Discrete-time certificate; only crossings with radius > 1 count."""
    return _certificate(PencilKind.KREISS_DISCRETE, a, None, gamma, theta, policy)


def eval_f(a, b, gamma: float, theta: float, policy: EvalPolicy = EvalPolicy()) -> CertificateValue:
    """Uncontrollability certificate over the full plane sweep."""
    return _certificate(PencilKind.DIST_UNCONTROLLABLE, a, b, gamma, theta, policy)


def eval_certificate(kind: PencilKind, a, b, gamma, theta, policy=EvalPolicy()):
    """Dispatch on ``kind``; b is ignored unless evaluating the DTU certificate."""
    return _certificate(kind, a, b, gamma, theta, policy)


def extract_restart_points(cv: CertificateValue) -> list[tuple[complex, float]]:
    """Accepted candidates as Cartesian restart points for local optimization.

    Sorted ascending by verified objective value, ties by radius.  Raises
    NoAcceptedCandidates when every nomination failed its recheck, signalling
    the caller to treat the angle as a nonzero of the certificate.
    """
    if cv.value != 0.0:
        raise ValueError("extract_restart_points requires a zero certificate value")
    accepted = [c for c in cv.candidates if c.accepted]
    if not accepted:
        raise NoAcceptedCandidates(
            f"all {len(cv.candidates)} candidates at theta={cv.theta!r} failed verification"
        )
    accepted.sort(key=lambda c: (c.verified_value, c.r))
    return [(c.r * complex(np.exp(1j * c.theta)), c.verified_value) for c in accepted]
