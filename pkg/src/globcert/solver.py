"""Optimization-with-restarts drivers certified by interpolation.

Each driver alternates two phases.  Local optimization lowers the current
estimate ``gamma`` of the target quantity.  A certificate round then sweeps
the angular domain, adaptively interpolating the certificate function
evaluated at the safeguarded level ``gamma * (1 - gamma_guard)``: any sampled
zero nominates level-set points, and optimization restarts from all of them
when it improves gamma by at least ``restart_rel`` relative.  Zeros whose
restarts cannot improve gamma are numerically stationary; they are consumed
and sampling continues.  Once an interpolant completes without unconsumed
zeros, the true certificate is re-evaluated at the interpolant's global
minimizers and then at midpoints of consecutive interpolant roots; only when
those checks also come back empty does the driver declare convergence.

Fast paths: normal stable matrices have transient bound exactly 1 (the
infimum is approached only as r grows without bound, so the loop could not
terminate on it), and unstable matrices have an infinite bound.
"""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .certificates import (
    CertificateValue,
    EvalPolicy,
    NoAcceptedCandidates,
    eval_certificate,
    extract_restart_points,
)
from .chebinterp import Completed, InterpOptions, approximate
from .linalg import (
    as_complex_matrix,
    eigenvalues,
    is_normal,
    norm2,
    spectral_abscissa,
    spectral_radius,
)
from .localopt import InfeasibleStart, LocalMin, Objective, OptConfig, minimize
from .pencils import NearSingularSecondMember, PencilKind, sigma_f

__all__ = [
    "RestartRecord",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "TraceRecord",
    "ZeroEigenvalue",
    "dtu",
    "kreiss_continuous",
    "kreiss_discrete",
]


class ZeroEigenvalue(ValueError):
    """Continuous-time input has a (numerically) zero eigenvalue.

    The certificate construction assumes the origin is not in the spectrum;
    shifting the search center is not certified to restore its properties,
    so this is reported instead of guessed around.
    """


class SolveStatus(Enum):
    CONVERGED = "Converged"
    MAX_RESTARTS = "MaxRestarts"
    TRIVIAL_NORMAL = "TrivialNormal"
    UNSTABLE_INFINITE = "UnstableInfinite"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, guards, domain control, and parallelism width."""

    term_rel: float = 1e-14
    restart_rel: float = 1e-6
    gamma_guard: float = 1e-14
    interp: InterpOptions = InterpOptions()
    policy: EvalPolicy = EvalPolicy()
    opt: OptConfig = OptConfig()
    max_restarts: int = 50
    workers: int = 1
    domain_override: Optional[tuple[float, float]] = None
    shift_center: bool = False

    def __post_init__(self):
        if not (0.0 < self.gamma_guard < self.restart_rel < 1.0):
            raise ValueError("need 0 < gamma_guard < restart_rel < 1")
        if self.term_rel <= 0.0:
            raise ValueError("term_rel must be positive")
        if self.max_restarts < 1 or self.workers < 1:
            raise ValueError("max_restarts and workers must be at least 1")


@dataclass(frozen=True)
class RestartRecord:
    gamma_before: float
    gamma_after: float
    trigger: str  # Probe | FinalMinCheck | RootMidpointCheck
    points_used: tuple[complex, ...]


@dataclass(frozen=True)
class TraceRecord:
    round: int
    gamma: float
    theta: float
    value: float
    n_candidates: int
    stage: str  # probe | final-min | root-midpoint


@dataclass(frozen=True)
class SolveResult:
    """Final value, derived quantity, minimizer, and the run's history."""

    quantity: float
    gamma_final: float
    minimizer: Optional[complex]
    status: SolveStatus
    restarts: tuple[RestartRecord, ...] = ()
    certificate_samples: tuple[int, ...] = ()
    trace: tuple[TraceRecord, ...] = ()
    wall_time_s: float = 0.0


def _pmap(fn, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _is_real(m: np.ndarray) -> bool:
    scale = max(norm2(m), np.finfo(float).tiny)
    return float(np.max(np.abs(m.imag))) <= 1e-14 * scale


def _is_hermitian(m: np.ndarray) -> bool:
    scale = max(norm2(m), np.finfo(float).tiny)
    return norm2(m - m.conj().T) <= 1e-14 * scale


class _Driver:
    """State machine for one optimization-with-restarts run."""

    def __init__(self, kind: PencilKind, a, b, starts, cfg: SolverConfig, domain):
        self.kind = kind
        self.a = a
        self.b = b
        self.cfg = cfg
        self.domain = cfg.domain_override if cfg.domain_override is not None else domain
        self.obj = Objective(kind, a, b)
        self.starts = list(starts)
        self.gamma = np.inf
        self.zstar: complex = complex(np.nan, np.nan)
        self.restarts: list[RestartRecord] = []
        self.trace: list[TraceRecord] = []
        self.samples_per_round: list[int] = []
        self.round = 0
        self.status = SolveStatus.CONVERGED

    # -- optimization ------------------------------------------------------

    def _optimize_from(self, points) -> Optional[LocalMin]:
        def run(z0):
            try:
                return minimize(self.obj, z0, self.cfg.opt)
            except Exception:
                return None

        results = [r for r in _pmap(run, points, self.cfg.workers) if r is not None]
        if not results:
            return None
        return min(results, key=lambda r: r.value)

    def _adopt(self, res: Optional[LocalMin]) -> float:
        """Update (gamma, zstar) if res improves; return relative improvement."""
        if res is None or not res.value < self.gamma:
            return 0.0
        improvement = (
            1.0 if not np.isfinite(self.gamma) else (self.gamma - res.value) / self.gamma
        )
        self.gamma, self.zstar = res.value, res.z
        return improvement

    # -- certificate rounds ------------------------------------------------

    def _pre_round_gamma_guard(self):
        """Keep gamma away from levels where the pencil family degenerates."""
        if self.kind is PencilKind.KREISS_DISCRETE:
            lam = np.linalg.eigvalsh(self.a @ self.a.conj().T)
            scale = max(norm2(self.a) ** 2, np.finfo(float).tiny)
            if np.min(np.abs(self.gamma**2 - lam)) <= 1e-12 * scale:
                self.gamma *= 1.0 - 10.0 * self.cfg.gamma_guard
        elif self.kind is PencilKind.DIST_UNCONTROLLABLE:
            f0 = sigma_f(self.a, self.b, 0.0, 0.0)
            if self.gamma >= f0 * (1.0 - 1e-12):
                self.gamma = f0 * (1.0 - 10.0 * self.cfg.gamma_guard)

    def _certificate_round(self) -> str:
        """One full certificate round; returns 'restart' or 'converged'."""
        self._pre_round_gamma_guard()
        gamma_round = self.gamma
        full_circle = (self.domain[1] - self.domain[0]) > 1.5 * np.pi  # (-pi, pi] sweep
        cache: dict[float, CertificateValue] = {}
        consumed: set[float] = set()
        stage = ["probe"]
        n_new = [0]

        for _attempt in range(6):
            gamma_cert = gamma_round * (1.0 - self.cfg.gamma_guard)
            if self.kind is not PencilKind.DIST_UNCONTROLLABLE:
                # Keep the certificate level away from 1, where the second
                # pencil member degenerates and its inverse amplifies
                # eigenvalue noise by 1/(1-gamma): reduced pencils at level
                # 1-d have norm ~1/d, drowning the certificate in rounding
                # noise as d shrinks.  Levels within 1e-6 of 1 correspond to
                # transient bounds within 1e-6 of the floor K = 1, where no
                # meaningful discrimination is possible anyway.
                if abs(gamma_cert - 1.0) <= 1e-6:
                    gamma_cert = 1.0 - 1e-6

            def batch_eval(thetas) -> list[CertificateValue]:
                thetas = [float(t) for t in np.atleast_1d(thetas)]
                missing = list(dict.fromkeys(t for t in thetas if t not in cache))

                def one(t):
                    return eval_certificate(
                        self.kind, self.a, self.b, gamma_cert, t, self.cfg.policy
                    )

                for t, cv in zip(missing, _pmap(one, missing, self.cfg.workers)):
                    cache[t] = cv
                    n_new[0] += 1
                    self.trace.append(
                        TraceRecord(
                            round=self.round,
                            gamma=gamma_cert,
                            theta=t,
                            value=cv.value,
                            n_candidates=len(cv.candidates),
                            stage=stage[0],
                        )
                    )
                return [cache[t] for t in thetas]

            def abort_on(cv: CertificateValue) -> bool:
                return cv.is_zero and cv.theta not in consumed

            try:
                verdict = self._round_body(
                    batch_eval, abort_on, consumed, stage, full_circle
                )
            except NearSingularSecondMember:
                # a sample landed on the degenerate level: perturb and retry
                gamma_round *= 1.0 - 10.0 * self.cfg.gamma_guard
                self.gamma = min(self.gamma, gamma_round)
                cache.clear()
                consumed.clear()
                continue
            self.samples_per_round.append(n_new[0])
            return verdict
        raise NearSingularSecondMember(
            "could not perturb gamma away from the singular second member"
        )

    def _round_body(self, batch_eval, abort_on, consumed, stage, full_circle) -> str:
        lo, hi = self.domain
        # probe phase: sample adaptively, restarting optimization on zeros
        while True:
            stage[0] = "probe"
            outcome = approximate(
                batch_eval,
                lo,
                hi,
                opts=self.cfg.interp,
                abort_on=abort_on,
                value_key=lambda cv: cv.value,
            )
            if isinstance(outcome, Completed):
                break
            zeros = [cv for _, cv in outcome.trigger_samples]
            verdict = self._assess_zeros(zeros, "Probe", consumed)
            if verdict != "consumed":
                return verdict
            # consumed zeros: re-enter sampling; cached values make the
            # replay up to the abort point free

        # final checks on the completed interpolant; the interpolant and its
        # check abscissae are computed once, consumed angles are filtered out
        interp = outcome.interpolant
        xs, _ = interp.global_minimizers()
        mids = None
        while True:
            stage[0] = "final-min"
            cvs = batch_eval(xs)
            zeros = [cv for cv in cvs if cv.is_zero and cv.theta not in consumed]
            trigger = "FinalMinCheck"
            if not zeros:
                stage[0] = "root-midpoint"
                if mids is None:
                    roots = interp.roots()
                    mids = list(0.5 * (roots[:-1] + roots[1:]))
                    if full_circle and len(roots) >= 1:
                        wrap = 0.5 * (roots[-1] + roots[0] + 2.0 * np.pi)
                        if wrap > hi:
                            wrap -= 2.0 * np.pi
                        mids.append(wrap)
                if mids:
                    cvs = batch_eval(np.array(mids))
                    zeros = [cv for cv in cvs if cv.is_zero and cv.theta not in consumed]
                trigger = "RootMidpointCheck"
            if not zeros:
                return "converged"
            verdict = self._assess_zeros(zeros, trigger, consumed)
            if verdict != "consumed":
                return verdict

    def _assess_zeros(self, zeros: list[CertificateValue], trigger: str, consumed) -> str:
        """Restart optimization from all accepted candidates of the batch."""
        points: list[complex] = []
        for cv in zeros:
            try:
                points.extend(z for z, _ in extract_restart_points(cv))
            except NoAcceptedCandidates:
                continue  # all nominations failed recheck: treat angle as nonzero
        consumed.update(cv.theta for cv in zeros)
        if not points:
            return "consumed"
        gamma_before = self.gamma
        improvement = self._adopt(self._optimize_from(points))
        if improvement >= self.cfg.restart_rel:
            self.restarts.append(
                RestartRecord(gamma_before, self.gamma, trigger, tuple(points))
            )
            return "restart"
        if improvement < self.cfg.term_rel:
            # numerically stationary at the global minimum: terminal record
            if improvement > 0.0:
                self.restarts.append(
                    RestartRecord(gamma_before, self.gamma, trigger, tuple(points))
                )
            return "converged"
        return "consumed"

    # -- main loop ----------------------------------------------------------

    def run(self) -> "_Driver":
        best = self._optimize_from(self.starts)
        if best is None:
            raise RuntimeError("no starting point produced a feasible local minimum")
        self._adopt(best)
        while True:
            if self.kind is PencilKind.DIST_UNCONTROLLABLE and self._dtu_zero():
                self.status = SolveStatus.CONVERGED
                return self
            if len(self.restarts) >= self.cfg.max_restarts:
                self.status = SolveStatus.MAX_RESTARTS
                return self
            self.round += 1
            verdict = self._certificate_round()
            if verdict == "converged":
                self.status = SolveStatus.CONVERGED
                return self

    def _dtu_zero(self) -> bool:
        # a value at the sigma_min noise floor certifies itself: tau ~ 0
        scale = max(norm2(np.hstack([self.a, self.b])), 1.0)
        return self.gamma <= 1e-12 * scale


def _finish(driver: _Driver, quantity_of, t0: float) -> SolveResult:
    return SolveResult(
        quantity=quantity_of(driver.gamma),
        gamma_final=driver.gamma,
        minimizer=driver.zstar,
        status=driver.status,
        restarts=tuple(driver.restarts),
        certificate_samples=tuple(driver.samples_per_round),
        trace=tuple(driver.trace),
        wall_time_s=time.perf_counter() - t0,
    )


def _trivial(status: SolveStatus, quantity: float, gamma: float, t0: float) -> SolveResult:
    return SolveResult(
        quantity=quantity,
        gamma_final=gamma,
        minimizer=None,
        status=status,
        wall_time_s=time.perf_counter() - t0,
    )


def kreiss_continuous(a, starts, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Continuous-time transient-growth bound of ``a`` (its Kreiss constant).

    ``starts`` are initial points with Re z > 0.  Returns quantity K with
    K = 1/gamma_final, or the trivial statuses for normal/unstable inputs.
    """
    t0 = time.perf_counter()
    a = as_complex_matrix(a)
    scale = max(norm2(a), np.finfo(float).tiny)
    alpha = spectral_abscissa(a)
    if alpha > 1e-12 * scale:
        return _trivial(SolveStatus.UNSTABLE_INFINITE, np.inf, 0.0, t0)
    if is_normal(a):
        return _trivial(SolveStatus.TRIVIAL_NORMAL, 1.0, 1.0, t0)
    if np.min(np.abs(eigenvalues(a))) <= 1e-12 * scale:
        raise ZeroEigenvalue("A has a numerically zero eigenvalue")
    if not starts:
        raise ValueError("at least one starting point is required")
    for z in starts:
        if not complex(z).real > 0.0:
            raise InfeasibleStart(f"continuous-time start {z!r} must have Re z > 0")

    shift = 0.0
    work = a
    if cfg.shift_center:
        shift = float(np.mean(eigenvalues(a).imag))
        work = a - 1j * shift * np.eye(a.shape[0])
    starts = [complex(z) - 1j * shift for z in starts]

    domain = (0.0, np.pi / 2) if _is_real(work) else (-np.pi / 2, np.pi / 2)
    driver = _Driver(PencilKind.KREISS_CONTINUOUS, work, None, starts, cfg, domain).run()
    result = _finish(driver, lambda g: 1.0 / g, t0)
    if shift != 0.0 and result.minimizer is not None:
        result = dataclasses.replace(result, minimizer=result.minimizer + 1j * shift)
    return result


def kreiss_discrete(a, starts, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Discrete-time transient-growth bound of ``a``.

    ``starts`` must satisfy |z| > 1; optimization runs in polar coordinates.
    """
    t0 = time.perf_counter()
    a = as_complex_matrix(a)
    if spectral_radius(a) > 1.0 + 1e-12:
        return _trivial(SolveStatus.UNSTABLE_INFINITE, np.inf, 0.0, t0)
    if is_normal(a):
        return _trivial(SolveStatus.TRIVIAL_NORMAL, 1.0, 1.0, t0)
    if not starts:
        raise ValueError("at least one starting point is required")
    for z in starts:
        if not abs(complex(z)) > 1.0:
            raise InfeasibleStart(f"discrete-time start {z!r} must have |z| > 1")
    domain = (0.0, np.pi) if _is_real(a) else (-np.pi, np.pi)
    driver = _Driver(PencilKind.KREISS_DISCRETE, a, None, starts, cfg, domain).run()
    return _finish(driver, lambda g: 1.0 / g, t0)


def dtu(a, b, starts, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Distance to uncontrollability of the pair (A, B).

    The origin is always included as a starting point.  Returns quantity
    tau = gamma_final.
    """
    t0 = time.perf_counter()
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    starts = [complex(z) for z in starts] + [0j]
    symmetric = (_is_real(a) and _is_real(b)) or _is_hermitian(a)
    domain = (0.0, np.pi) if symmetric else (-np.pi, np.pi)
    driver = _Driver(PencilKind.DIST_UNCONTROLLABLE, a, b, starts, cfg, domain).run()
    return _finish(driver, lambda g: g, t0)
