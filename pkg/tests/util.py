"""Shared Monte Carlo helpers for the test suite.

These are the independent oracles: they draw from the model directly and
never call the quadrature/closed-form paths they are used to check.
"""

from __future__ import annotations

import math

import numpy as np


def mc_mean_se(draw_fn, n_draws: int, rng, chunk: int = 1_000_000):
    """Chunked mean and standard error of a vectorized draw function."""
    total = 0.0
    total_sq = 0.0
    left = n_draws
    while left > 0:
        size = min(chunk, left)
        vals = np.asarray(draw_fn(rng, size), dtype=np.float64)
        total += float(vals.sum())
        total_sq += float(np.dot(vals, vals))
        left -= size
    mean = total / n_draws
    var = max(0.0, total_sq / n_draws - mean * mean)
    return mean, math.sqrt(var / n_draws)


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-11) -> float:
    """Scalar minimizer of a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
