"""Local minimization of the three two-variable singular-value objectives.

Values and gradients come from the singular-triplet identity: for a matrix
function F of a real parameter t, the derivative of sigma_min(F) along t is
``Re(u* dF/dt v)`` with u, v the unit singular vectors of sigma_min.  The
continuous-time and uncontrollability objectives are minimized in Cartesian
coordinates, the discrete-time one in polar coordinates.  Feasibility is kept
by smooth reparametrization (x = e^w for Re z > 0, r = 1 + e^w for |z| > 1),
so iterates can never leave the feasible region and no projection
nonsmoothness is introduced.

The search itself is a two-variable BFGS with backtracking line search; a
handful of iterations suffices at this dimension, so Hessians are not used.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import as_complex_matrix, smallest_singular_triplet
from .pencils import PencilKind

__all__ = [
    "InfeasiblePoint",
    "InfeasibleStart",
    "LocalMin",
    "Objective",
    "OptConfig",
    "minimize",
    "objective_value_grad",
]

DEGENERATE_REL_GAP = 1e-12


class InfeasiblePoint(ValueError):
    """Evaluation point violates the strict feasibility of the objective."""


class InfeasibleStart(ValueError):
    """Starting point violates the strict feasibility of the objective."""


@dataclass(frozen=True)
class Objective:
    """One of the three singular-value objectives over the complex plane."""

    kind: PencilKind
    a: np.ndarray
    b: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "a", as_complex_matrix(self.a))
        if self.a.shape[0] != self.a.shape[1]:
            raise ValueError(f"A must be square, got {self.a.shape}")
        if self.kind is PencilKind.DIST_UNCONTROLLABLE:
            if self.b is None:
                raise ValueError("the uncontrollability objective requires B")
            object.__setattr__(self, "b", as_complex_matrix(self.b))
            if self.b.shape[0] != self.a.shape[0]:
                raise ValueError(f"B must have {self.a.shape[0]} rows, got {self.b.shape}")
        elif self.b is not None:
            raise ValueError("B is only meaningful for the uncontrollability objective")


@dataclass(frozen=True)
class LocalMin:
    """Result of a local minimization run."""

    z: complex
    value: float
    grad_norm: float
    iterations: int
    converged: bool = True
    degenerate: bool = False


@dataclass(frozen=True)
class OptConfig:
    grad_tol: float = 1e-12
    step_tol: float = 1e-14
    max_iter: int = 200


def _feasible(kind: PencilKind, z: complex) -> bool:
    if kind is PencilKind.KREISS_CONTINUOUS:
        return z.real > 0.0
    if kind is PencilKind.KREISS_DISCRETE:
        return abs(z) > 1.0
    return True


def _triplet_info(m):
    """Smallest singular triplet plus a degeneracy flag for the two smallest."""
    trip = smallest_singular_triplet(m)
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    degenerate = len(s) >= 2 and (s[-2] - s[-1]) <= DEGENERATE_REL_GAP * max(s[0], 1e-300)
    return trip, degenerate


def objective_value_grad(obj: Objective, z: complex):
    """Objective value and analytic gradient at a strictly feasible point.

    Returns ``(value, grad, degenerate)`` where grad is a length-2 array in
    the objective's native parametrization: (x, y) Cartesian for the
    continuous-time and uncontrollability objectives, (r, theta) polar for
    the discrete-time one.  ``degenerate`` flags a (near-)multiple smallest
    singular value, in which case grad is a subgradient choice from the
    first returned triplet.
    """
    z = complex(z)
    if not _feasible(obj.kind, z):
        raise InfeasiblePoint(f"z={z!r} is not strictly feasible for {obj.kind.value}")
    n = obj.a.shape[0]
    eye = np.eye(n, dtype=np.complex128)

    if obj.kind is PencilKind.KREISS_CONTINUOUS:
        x = z.real
        trip, degen = _triplet_info(z * eye - obj.a)
        uv = complex(np.vdot(trip.u, trip.v))  # u* v
        s_x, s_y = uv.real, -uv.imag
        value = trip.sigma / x
        grad = np.array([(x * s_x - trip.sigma) / (x * x), s_y / x])
        return value, grad, degen

    if obj.kind is PencilKind.KREISS_DISCRETE:
        r, theta = abs(z), cmath.phase(z)
        trip, degen = _triplet_info(z * eye - obj.a)
        w = complex(np.exp(1j * theta) * np.vdot(trip.u, trip.v))  # e^{i theta} u* v
        s_r, s_t = w.real, -r * w.imag
        value = trip.sigma / (r - 1.0)
        grad = np.array(
            [(s_r * (r - 1.0) - trip.sigma) / (r - 1.0) ** 2, s_t / (r - 1.0)]
        )
        return value, grad, degen

    trip, degen = _triplet_info(np.hstack([obj.a - z * eye, obj.b]))
    uv1 = complex(np.vdot(trip.u, trip.v[:n]))  # u* v_1, first n rows of v
    grad = np.array([-uv1.real, uv1.imag])
    return trip.sigma, grad, degen


def _pack(kind: PencilKind, z: complex) -> np.ndarray:
    """Map a feasible point to unconstrained working parameters."""
    if kind is PencilKind.KREISS_CONTINUOUS:
        return np.array([math.log(z.real), z.imag])
    if kind is PencilKind.KREISS_DISCRETE:
        return np.array([math.log(abs(z) - 1.0), cmath.phase(z)])
    return np.array([z.real, z.imag])


def _unpack(kind: PencilKind, p: np.ndarray) -> complex:
    if kind is PencilKind.KREISS_CONTINUOUS:
        return complex(math.exp(p[0]), p[1])
    if kind is PencilKind.KREISS_DISCRETE:
        return (1.0 + math.exp(p[0])) * cmath.exp(1j * p[1])
    return complex(p[0], p[1])


def _working_grad(kind: PencilKind, p: np.ndarray, native_grad: np.ndarray) -> np.ndarray:
    # chain rule through x = e^w (continuous) or r = 1 + e^w (discrete)
    if kind in (PencilKind.KREISS_CONTINUOUS, PencilKind.KREISS_DISCRETE):
        return np.array([native_grad[0] * math.exp(p[0]), native_grad[1]])
    return native_grad.copy()


def minimize(obj: Objective, z0: complex, cfg: OptConfig = OptConfig()) -> LocalMin:
    """BFGS descent from ``z0``; iterates stay strictly feasible.

    Stops when the working-parameter gradient norm falls below
    ``grad_tol * max(1, value)`` or the step falls below ``step_tol``
    relative; hitting the iteration cap returns the best iterate with
    ``converged=False``.
    """
    z0 = complex(z0)
    if not _feasible(obj.kind, z0):
        raise InfeasibleStart(f"start z0={z0!r} is not strictly feasible for {obj.kind.value}")

    p = _pack(obj.kind, z0)
    f, ng, degen = objective_value_grad(obj, _unpack(obj.kind, p))
    g = _working_grad(obj.kind, p, ng)
    hinv = np.eye(2)
    iters = 0
    converged = False

    while iters < cfg.max_iter:
        gnorm = float(np.linalg.norm(g))
        if gnorm <= cfg.grad_tol * max(1.0, abs(f)):
            converged = True
            break
        d = -hinv @ g
        if float(d @ g) >= 0.0:  # not a descent direction: reset curvature model
            hinv = np.eye(2)
            d = -g
        # backtracking Armijo line search
        step = 1.0
        slope = float(d @ g)
        f_new = None
        for _ in range(50):
            p_try = p + step * d
            try:
                f_try, ng_try, degen_try = objective_value_grad(obj, _unpack(obj.kind, p_try))
            except (OverflowError, InfeasiblePoint):
                step *= 0.5
                continue
            if f_try <= f + 1e-4 * step * slope:
                f_new = f_try
                break
            step *= 0.5
        iters += 1
        if f_new is None:
            converged = True  # no descent along d at any step length: stationary
            break
        g_try = _working_grad(obj.kind, p_try, ng_try)
        s = p_try - p
        y = g_try - g
        p, f, g = p_try, f_new, g_try
        degen = degen or degen_try
        sy = float(s @ y)
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            rho = 1.0 / sy
            v = np.eye(2) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        if float(np.linalg.norm(s)) <= cfg.step_tol * max(1.0, float(np.linalg.norm(p))):
            converged = True
            break

    z = _unpack(obj.kind, p)
    return LocalMin(
        z=z,
        value=float(f),
        grad_norm=float(np.linalg.norm(g)),
        iterations=iters,
        converged=converged,
        degenerate=degen,
    )
