"""Adaptive interpolation engine: convergence, splitting, roots, abort."""

import numpy as np
import pytest

from conftest import assert_close, rng
from globcert.chebinterp import (
    Aborted,
    BudgetExceeded,
    Completed,
    InterpOptions,
    OutOfDomain,
    approximate,
    vals2coeffs,
)


def batch(f):
    return lambda xs: [f(float(x)) for x in xs]


def max_err(p, f, lo, hi, n=4001):
    xs = np.linspace(lo, hi, n)
    return max(abs(p.evaluate(float(x)) - f(float(x))) for x in xs)


def test_vals2coeffs_reproduces_samples():
    gen = rng(41)
    for m in (8, 16, 33):
        v = gen.standard_normal(m + 1)
        c = vals2coeffs(v)
        t = np.cos(np.pi * np.arange(m, -1, -1) / m)
        recon = np.polynomial.chebyshev.chebval(t, c)
        assert np.max(np.abs(recon - v)) <= 1e-14 * max(1.0, np.max(np.abs(v)))


def test_square_is_exact_single_piece():
    out = approximate(batch(lambda x: x * x), -1, 1)
    assert isinstance(out, Completed)
    p = out.interpolant
    assert len(p.pieces) == 1
    c = p.pieces[0].coeffs
    assert len(c) == 3
    assert_close(c[0], 0.5, rel=1e-12)
    assert abs(c[1]) <= 1e-14
    assert_close(c[2], 0.5, rel=1e-12)
    assert_close(p.evaluate(0.5), 0.25, rel=1e-12)


def test_abs_splits_at_zero():
    out = approximate(batch(abs), -1, 1)
    p = out.interpolant
    assert len(p.pieces) == 2
    assert abs(p.pieces[0].b) <= 1e-12
    assert max_err(p, abs, -1, 1) <= 1e-12
    assert abs(p.evaluate(0.0)) <= 1e-12


def test_analytic_convergence():
    out = approximate(batch(np.exp), -1, 1)
    assert max_err(out.interpolant, np.exp, -1, 1) <= 1e-12
    runge = lambda x: 1.0 / (1.0 + 25.0 * x * x)
    out = approximate(batch(runge), -1, 1)
    assert max_err(out.interpolant, runge, -1, 1) <= 1e-12


def test_roots_of_sin():
    out = approximate(batch(np.sin), 0, 10)
    roots = out.interpolant.roots()
    expect = [0.0, np.pi, 2 * np.pi, 3 * np.pi]
    assert len(roots) == 4
    for r, e in zip(roots, expect):
        assert abs(r - e) <= 1e-10


def test_roots_none_and_double():
    out = approximate(batch(lambda x: x * x + 1.0), -1, 1)
    assert len(out.interpolant.roots()) == 0
    out = approximate(batch(lambda x: x * x), -1, 1)
    roots = out.interpolant.roots()
    assert len(roots) == 1
    assert abs(roots[0]) <= 1e-10


def test_global_min_examples():
    out = approximate(batch(lambda x: (x - 0.3) ** 2), -1, 1)
    xs, v = out.interpolant.global_minimizers()
    assert_close(xs[0], 0.3, rel=1e-9)
    assert abs(v) <= 1e-12
    out = approximate(batch(np.cos), 0, 2 * np.pi)
    x0, v = out.interpolant.global_min()
    assert_close(x0, np.pi, rel=1e-9)
    assert_close(v, -1.0, rel=1e-9)
    out = approximate(batch(lambda x: 3.0), -1, 1)
    xs, v = out.interpolant.global_minimizers()
    assert xs[0] == -1.0 and v == 3.0 and len(xs) >= 2


def test_global_min_high_degree_path():
    # degree well above the derivative-rootfinding cutoff
    f = lambda x: np.cos(40.0 * x) + 0.2 * x
    out = approximate(batch(f), -4, 4)
    assert max(len(p.coeffs) for p in out.interpolant.pieces) > 65
    xs = np.linspace(-4, 4, 200001)
    vals = f(xs)
    k = int(np.argmin(vals))
    x0, v = out.interpolant.global_min()
    assert abs(v - vals[k]) <= 1e-8
    assert abs(x0 - xs[k]) <= 1e-4


def test_roots_and_min_match_dense_scan():
    gen = rng(42)
    for trial in range(20):
        freq = float(gen.uniform(0.5, 3.0))
        shift = float(gen.uniform(-0.5, 0.5))
        f = lambda x: np.sin(freq * x + shift) + 0.3 * np.cos(2.1 * freq * x)
        out = approximate(batch(f), -2, 2)
        xs = np.linspace(-2, 2, 100001)
        vals = np.array([f(x) for x in xs])
        k = int(np.argmin(vals))
        x0, v = out.interpolant.global_min()
        assert v <= vals[k] + 1e-8
        assert abs(v - vals[k]) <= 1e-8
        # every dense-scan sign change matches a reported root
        roots = out.interpolant.roots()
        crossings = xs[:-1][vals[:-1] * vals[1:] < 0.0]
        assert len(roots) == len(crossings)
        for r, c in zip(roots, crossings):
            assert abs(r - c) <= 1e-4  # within one dense-grid cell


def test_evaluate_boundaries_and_domain():
    out = approximate(batch(abs), -1, 1)
    p = out.interpolant
    assert_close(p.evaluate(-1.0), 1.0, rel=1e-12)
    assert_close(p.evaluate(1.0), 1.0, rel=1e-12)
    with pytest.raises(OutOfDomain):
        p.evaluate(1.5)


def test_abort_on_first_triggering_batch():
    calls = []

    def fn(xs):
        calls.append(list(xs))
        return [np.sin(x) for x in xs]

    out = approximate(fn, 0, 10, abort_on=lambda v: v <= 0.0)
    assert isinstance(out, Aborted)
    assert len(calls) == 1  # the very first batch contains sin <= 0 points
    assert out.sample_count == len(calls[0])
    assert all(v <= 0.0 for _, v in out.trigger_samples)
    assert any(x >= np.pi for x, _ in out.trigger_samples)


def test_abort_deterministic_under_evaluation_order():
    def make_fn(reverse):
        def fn(xs):
            idx = np.argsort(xs)[::-1] if reverse else np.arange(len(xs))
            vals = [None] * len(xs)
            for i in idx:  # simulate out-of-order completion
                vals[int(i)] = float(np.sin(xs[int(i)]))
            return vals

        return fn

    outs = [
        approximate(make_fn(rev), 0, 10, abort_on=lambda v: v <= 0.0)
        for rev in (False, True)
    ]
    t0 = [x for x, _ in outs[0].trigger_samples]
    t1 = [x for x, _ in outs[1].trigger_samples]
    assert t0 == t1
    assert outs[0].sample_count == outs[1].sample_count


def test_min_samples_and_option_validation():
    with pytest.raises(ValueError):
        InterpOptions(min_samples=3)
    with pytest.raises(ValueError):
        InterpOptions(max_degree=1000)  # not on the 2^k + 1 ladder
    out = approximate(batch(np.exp), -1, 1, opts=InterpOptions(min_samples=9))
    assert max_err(out.interpolant, np.exp, -1, 1) <= 1e-12


def test_budget_exceeded_carries_best_interpolant():
    # white-noise function cannot be interpolated: budget must trip
    gen = rng(43)
    noise = {}

    def f(x):
        if x not in noise:
            noise[x] = float(gen.standard_normal())
        return noise[x]

    opts = InterpOptions(max_degree=65, max_pieces=4)
    with pytest.raises(BudgetExceeded) as info:
        approximate(batch(f), -1, 1, opts=opts)
    assert info.value.interpolant.pieces
    assert info.value.error_estimate > 0.0


def test_pieces_tile_domain():
    out = approximate(batch(lambda x: abs(np.sin(3 * x)) ), -4, 4)
    p = out.interpolant
    assert p.pieces[0].a == -4.0 and p.pieces[-1].b == 4.0
    for left, right in zip(p.pieces[:-1], p.pieces[1:]):
        assert left.b == right.a
    assert max_err(p, lambda x: abs(np.sin(3 * x)), -4, 4) <= 1e-11
