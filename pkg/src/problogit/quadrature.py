"""Half-line Gaussian expectations and the noise-level calibration.

Everything here computes expectations of the form ``E[f(|z|)]`` for a
standard normal ``z``, i.e. integrals of ``f`` against the half-normal
density ``sqrt(2/pi) * exp(-t**2/2)`` on ``[0, inf)``.

The workhorse is composite Gauss-Legendre quadrature on geometrically
growing panels ``[0, s/8], [s/8, s/4], ..., [.., 40]``, where ``s`` is the
integrand's natural length scale (for ``f`` varying like ``exp(-tau*t)``,
``s = 1/tau``).  Beyond ``t = 40`` the half-normal density is below
``1e-347``, so truncation costs nothing at double precision.  Adaptivity is
by order doubling: a result is accepted once two consecutive orders agree.

On top of the quadrature sits the calibration between the probit noise
level ``sigma`` and the length ``tau_star`` of the population minimizer of
the logistic risk.  The two are linked through the strictly decreasing
function

    link_value(tau) = E[ |z| / (1 + exp(tau*|z|)) ],

via the equation ``link_value(tau_star) = (1 - 1/sqrt(1+sigma^2)) / sqrt(2*pi)``,
solved by bisection (derivative-free; the derivative would be yet another
integral).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfcx

from .validation import check_positive

__all__ = [
    "QuadratureRule",
    "QuadratureError",
    "CalibrationError",
    "half_line_rule",
    "expect_abs",
    "exp_abs_moment",
    "link_value",
    "link_value_limit_at_zero",
    "sigma_to_tau_star",
    "tau_star_to_sigma",
]

#: truncation point of the half-line; the half-normal tail mass beyond it
#: is below 1e-306, i.e. zero at any tolerance we use, while the density at
#: the cutoff is still a positive normal double (at 40 it would underflow
#: to exactly zero and produce zero quadrature weights)
TAIL_CUTOFF = 37.5

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class QuadratureError(RuntimeError):
    """Raised when an integrand misbehaves or refinement stalls."""


class CalibrationError(RuntimeError):
    """Raised when the link equation cannot be bracketed."""


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights integrating ``f`` against the |N(0,1)| density.

    Weights already contain the half-normal density, so
    ``rule.apply(f) ~ E[f(|z|)]`` and ``rule.apply(lambda t: 1) = 1``.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if nodes.ndim != 1 or weights.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if nodes.size == 0:
            raise ValueError("rule must have at least one node")
        if np.any(nodes < 0.0):
            raise ValueError("nodes must be nonnegative")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def apply(self, f) -> float:
        """Evaluate ``E[f(|z|)]``; ``f`` must accept an ndarray of points."""
        vals = np.asarray(f(self.nodes), dtype=np.float64)
        if vals.shape != self.nodes.shape:
            raise ValueError("integrand must return one value per node")
        if not np.all(np.isfinite(vals)):
            bad = self.nodes[~np.isfinite(vals)][0]
            raise QuadratureError(f"integrand is non-finite at node t={bad!r}")
        return float(np.dot(self.weights, vals))


def _panel_edges(scale: float, cutoff: float) -> np.ndarray:
    """Geometric panel edges 0, s/8, s/4, ... clipped at ``cutoff``."""
    first = min(scale, 1.0) / 8.0
    first = max(first, 1e-30)
    edges = [0.0, first]
    while edges[-1] < cutoff:
        edges.append(min(edges[-1] * 2.0, cutoff))
    return np.asarray(edges)


@lru_cache(maxsize=256)
def _cached_rule(log2_scale: int, order: int, cutoff: float) -> QuadratureRule:
    return half_line_rule(scale=2.0**log2_scale, order=order, cutoff=cutoff)


def half_line_rule(
    scale: float = 1.0, order: int = 48, cutoff: float = TAIL_CUTOFF
) -> QuadratureRule:
    """Build a composite Gauss-Legendre rule for ``E[f(|z|)]``.

    ``scale`` is the shortest length over which the integrand varies
    appreciably; panels start at ``scale/8`` and double up to ``cutoff``.
    """
    check_positive(scale, "scale")
    if order < 2:
        raise ValueError("order must be at least 2")
    xi, wi = np.polynomial.legendre.leggauss(order)
    edges = _panel_edges(scale, cutoff)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        t = half * xi + 0.5 * (a + b)
        w = half * wi * _SQRT_2_OVER_PI * np.exp(-0.5 * t * t)
        nodes.append(t)
        weights.append(w)
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights))


_DEFAULT_RULE: QuadratureRule | None = None


def _default_rule() -> QuadratureRule:
    global _DEFAULT_RULE
    if _DEFAULT_RULE is None:
        _DEFAULT_RULE = half_line_rule(scale=1.0, order=48)
    return _DEFAULT_RULE


def expect_abs(f, rule: QuadratureRule | None = None) -> float:
    """Approximate ``E[f(|z|)]`` for standard normal ``z``.

    ``f`` must be finite on the rule's nodes and vectorized over ndarrays.
    """
    if rule is None:
        rule = _default_rule()
    return rule.apply(f)


def expect_abs_adaptive(
    f, scale: float = 1.0, rtol: float = 5e-14, max_order: int = 512
) -> float:
    """``E[f(|z|)]`` with order doubling until two refinements agree.

    The relative tolerance is checked against ``max(|I|, 1e-300)`` so that
    integrals of tiny magnitude are still resolved to full relative
    precision rather than accepted at absolute noise level.
    """
    key = int(math.floor(math.log2(min(scale, 1.0))))
    order = 32
    prev = _cached_rule(key, order, TAIL_CUTOFF).apply(f)
    while order < max_order:
        order *= 2
        cur = _cached_rule(key, order, TAIL_CUTOFF).apply(f)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise QuadratureError(f"order doubling did not converge below rtol={rtol}")


def exp_abs_moment(s: float) -> float:
    """Closed form ``E[exp(-s*|z|)] = 2*exp(s^2/2)*Phi(-s) = erfcx(s/sqrt(2))``.

    Evaluated through the scaled complementary error function, which is
    overflow-free for any ``s >= 0``.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    return float(erfcx(s / math.sqrt(2.0)))


def link_value(tau: float, rtol: float = 5e-14) -> float:
    """``E[|z| / (1 + exp(tau*|z|))]``, strictly decreasing in ``tau``.

    Evaluated as ``|z| * sigmoid(-tau*|z|)`` to avoid overflow of the
    exponential, with panels adapted to the ``1/tau`` decay scale.
    """
    check_positive(tau, "tau")

    def integrand(t: np.ndarray) -> np.ndarray:
        # sigmoid(-tau*t) = exp(-logaddexp(0, tau*t))
        return t * np.exp(-np.logaddexp(0.0, tau * t))

    return expect_abs_adaptive(integrand, scale=1.0 / max(tau, 1.0), rtol=rtol)


def link_value_limit_at_zero() -> float:
    """The ``tau -> 0+`` limit of ``link_value``: ``E|z|/2 = 1/sqrt(2*pi)``."""
    return _INV_SQRT_2PI


def _link_target(sigma: float) -> float:
    return (1.0 - 1.0 / math.sqrt(1.0 + sigma * sigma)) * _INV_SQRT_2PI


def sigma_to_tau_star(sigma: float, tol: float = 1e-10) -> float:
    """Calibrate the population-minimizer length for noise level ``sigma``.

    Solves ``link_value(tau) = (1 - 1/sqrt(1+sigma^2)) / sqrt(2*pi)`` by
    bisection to absolute tolerance ``tol``, expanding the initial bracket
    ``[max(eps, 1/sigma)/4, 4*sqrt(2*pi)/sigma]`` if needed.  For
    ``sigma <= 1/sqrt(2)`` the result satisfies
    ``1 <= sigma * tau_star <= sqrt(2*pi)``.
    """
    check_positive(sigma, "sigma")
    target = _link_target(sigma)
    # the target approaches the tau -> 0 supremum like 1/(sigma*sqrt(2*pi))
    # and the tau -> inf limit 0 like sigma^2; once either gap is at rounding
    # level no bracket can be trusted
    if 1.0 / math.sqrt(1.0 + sigma * sigma) < 2.5e-13:
        raise CalibrationError(
            f"sigma={sigma!r} puts the link target within rounding of its supremum"
        )
    if target <= 0.0:
        raise CalibrationError(
            f"sigma={sigma!r} underflows the link target; no bracket exists"
        )

    lo = max(1e-8, 1.0 / sigma) / 4.0
    hi = 4.0 * math.sqrt(2.0 * math.pi) / sigma
    # link_value decreases, so f(lo) > target > f(hi) is required
    try:
        expansions = 0
        while link_value(lo) <= target:
            lo /= 2.0
            expansions += 1
            if lo < 1e-300 or expansions > 2000:
                raise CalibrationError(
                    f"cannot bracket tau_star from below for sigma={sigma!r}"
                )
        expansions = 0
        while link_value(hi) >= target:
            hi *= 2.0
            expansions += 1
            if hi > 1e300 or expansions > 2000:
                raise CalibrationError(
                    f"cannot bracket tau_star from above for sigma={sigma!r}"
                )
    except QuadratureError as exc:
        raise CalibrationError(
            f"link values are numerically unresolvable while bracketing sigma={sigma!r}"
        ) from exc

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # interval is down to adjacent doubles; tol unreachable
        if link_value(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tau_star_to_sigma(tau_star: float) -> float:
    """Invert the calibration in closed form.

    Well defined because ``link_value(tau) < 1/sqrt(2*pi)`` for every
    ``tau > 0``: the noise level is
    ``sqrt(1/(1 - sqrt(2*pi)*link_value(tau))^2 - 1)``.
    """
    check_positive(tau_star, "tau_star")
    d = 1.0 - link_value(tau_star) / _INV_SQRT_2PI
    return math.sqrt(1.0 / (d * d) - 1.0)
