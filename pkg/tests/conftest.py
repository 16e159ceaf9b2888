"""Shared test helpers: seeded random instance generators."""

from __future__ import annotations

import numpy as np

from globcert.linalg import spectral_abscissa, spectral_radius


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_complex(gen, rows, cols=None):
    cols = rows if cols is None else cols
    return gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))


def stable_continuous(gen, n, alpha_lo=-0.5, alpha_hi=-0.01):
    """Random nonnormal A with spectral abscissa in [alpha_lo, alpha_hi]."""
    a = random_complex(gen, n)
    target = gen.uniform(alpha_lo, alpha_hi)
    a = a - (spectral_abscissa(a) - target) * np.eye(n)
    return a


def stable_discrete(gen, n, rho_lo=0.8, rho_hi=0.999):
    """Random nonnormal A with spectral radius in [rho_lo, rho_hi]."""
    a = random_complex(gen, n)
    a += np.triu(random_complex(gen, n), 1)  # extra nonnormal coupling
    target = gen.uniform(rho_lo, rho_hi)
    return a * (target / spectral_radius(a))


def assert_close(actual, expected, rel=1e-10, abs_tol=0.0, label=""):
    err = abs(actual - expected)
    bound = rel * max(abs(expected), 1e-300) + abs_tol
    assert err <= bound, f"{label}: |{actual} - {expected}| = {err} > {bound}"
