"""Machine-checkable catalogue of Gaussian moment bounds and identities.

Each catalogue entry packages one inequality (or identity) about a
half-line Gaussian expectation into a named check: given a parameter
point it produces the analytic lower/upper bounds and a numerical value
for the middle, then reports whether the sandwich holds with an explicit
slack.  One-dimensional expectations are evaluated by quadrature;
expectations over R^p are first reduced by rotation invariance to at most
two Gaussian coordinates (plus the label-noise coordinate where labels
are involved) and then evaluated by quadrature where the reduced
integrand is smooth, by Monte Carlo with a reported standard error where
it is kinked.

Conventions:

* a vacuous (negative) analytic lower bound is clipped to ``-inf`` and
  the check reported as trivially holding;
* a parameter point violating an entry's precondition yields a skipped
  report carrying the reason, never a silent pass;
* quadrature slack is ``1e-9``, Monte Carlo slack ``max(1e-9, 4*stderr)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.special import gamma as gamma_fn

from .geometry import disagreement_moment
from .quadrature import expect_abs_adaptive, sigma_to_tau_star

__all__ = [
    "BoundReport",
    "check_bounds",
    "default_grid",
    "identity_grid",
    "lemma_ids",
    "write_bound_reports",
    "BOUND_REPORT_COLUMNS",
]

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_QUAD_SLACK = 1e-9

#: curvature lower bounds become nontrivial only above this scale
_CURVATURE_SCALE = math.sqrt(3.0 + math.sqrt(33.0 / 2.0))


@dataclass
class BoundReport:
    """Outcome of one inequality check at one parameter point.

    ``holds`` is ``None`` when the point was skipped (see ``reason``);
    otherwise it states whether
    ``lower - slack <= value <= upper + slack``.
    """

    lemma_id: str
    params: dict
    lower: float
    value: float
    upper: float
    method: str
    holds: bool | None
    slack: float = 0.0
    stderr: float = 0.0
    reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.holds is None


def _finish(lemma_id, params, lower, value, upper, method, stderr=0.0) -> BoundReport:
    if lower > upper:
        raise ValueError(f"{lemma_id}: analytic bounds are inverted at {params}")
    if not math.isfinite(lower) and lower > 0:
        raise ValueError(f"{lemma_id}: lower bound is +inf at {params}")
    clipped = -math.inf if (math.isfinite(lower) and lower < 0.0) else lower
    slack = max(_QUAD_SLACK, 4.0 * stderr)
    holds = (clipped - slack <= value) and (value <= upper + slack)
    return BoundReport(
        lemma_id=lemma_id,
        params=dict(params),
        lower=clipped,
        value=value,
        upper=upper,
        method=method,
        holds=bool(holds),
        slack=slack,
        stderr=stderr,
    )


def _skip(lemma_id, params, reason) -> BoundReport:
    return BoundReport(
        lemma_id=lemma_id,
        params=dict(params),
        lower=math.nan,
        value=math.nan,
        upper=math.nan,
        method="skipped",
        holds=None,
        reason=reason,
    )


# ---------------------------------------------------------------------------
# shared quadrature pieces

def _exp_moment(s: float) -> float:
    """E[exp(-s|z|)]"""
    return expect_abs_adaptive(lambda t: np.exp(-s * t), scale=1.0 / max(s, 1.0))


def _square_exp_moment(s: float) -> float:
    """E[z^2 exp(-s|z|)]"""
    return expect_abs_adaptive(lambda t: t * t * np.exp(-s * t), scale=1.0 / max(s, 1.0))


def _softplus_gap_integrand(tau: float, k: float):
    def f(t: np.ndarray) -> np.ndarray:
        return np.logaddexp(0.0, -tau * t) - np.logaddexp(0.0, -k * tau * t)

    return f


def _mc_mean(draw_fn: Callable, n_draws: int, rng, chunk: int = 1_000_000):
    """Chunked Monte Carlo mean and standard error of ``draw_fn(rng, size)``."""
    total = 0.0
    total_sq = 0.0
    left = n_draws
    while left > 0:
        size = min(chunk, left)
        vals = draw_fn(rng, size)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        left -= size
    mean = total / n_draws
    var = max(0.0, total_sq / n_draws - mean * mean)
    return mean, math.sqrt(var / n_draws)


# ---------------------------------------------------------------------------
# catalogue entries

@dataclass(frozen=True)
class _Entry:
    lemma_id: str
    required: tuple[str, ...]
    check: Callable  # (params, draws, rng) -> BoundReport
    precondition: Callable  # params -> str | None
    uses_mc: bool = False


def _pre_exp_moment(p) -> str | None:
    if p["tau"] <= 0:
        return "tau must be positive"
    return None


def _chk_exp_moment(p, draws, rng) -> BoundReport:
    tau = p["tau"]
    value = _exp_moment(tau)
    lower = _SQRT_2_OVER_PI * (1.0 / tau - 1.0 / tau**3)
    upper = _SQRT_2_OVER_PI / tau
    return _finish("exp_moment", p, lower, value, upper, "quadrature")


def _chk_link_moment(p, draws, rng) -> BoundReport:
    tau = p["tau"]
    f = lambda t: t * np.exp(-np.logaddexp(0.0, tau * t))
    value = expect_abs_adaptive(f, scale=1.0 / max(tau, 1.0))
    lower = _INV_SQRT_2PI / tau**2 * (1.0 - 3.0 / tau**2)
    upper = _SQRT_2_OVER_PI / tau**2
    return _finish("link_moment", p, lower, value, upper, "quadrature")


def _chk_square_exp_moment(p, draws, rng) -> BoundReport:
    tau = p["tau"]
    value = _square_exp_moment(tau)
    lower = _SQRT_2_OVER_PI * (2.0 / tau**3 - 12.0 / tau**5 - 15.0 / tau**7)
    upper = _SQRT_2_OVER_PI * (2.0 / tau**3 + 3.0 / tau**5)
    return _finish("square_exp_moment", p, lower, value, upper, "quadrature")


def _weighted_distance_value(ng: float, ngp: float, rho: float) -> float:
    # E[(x'(g - g'))^2 exp(-2|x'g'|)] splits over span{g'} and its complement:
    # the two projections of x are independent, so the cross term vanishes
    a = rho * ng - ngp
    b2 = ng * ng * (1.0 - rho * rho)
    return math.sqrt(a * a * _square_exp_moment(2.0 * ngp) + b2 * _exp_moment(2.0 * ngp))


def _pre_weighted(p) -> str | None:
    if p["norm_gamma"] <= 0 or p["norm_gamma_prime"] <= 0:
        return "both vectors must be nonzero"
    if abs(p["rho"]) > 1:
        return "rho must lie in [-1, 1]"
    return None


def _chk_weighted_distance(p, draws, rng) -> BoundReport:
    ng, ngp, rho = p["norm_gamma"], p["norm_gamma_prime"], p["rho"]
    value = _weighted_distance_value(ng, ngp, rho)
    upper = ng * math.sqrt(_INV_SQRT_2PI * (1.0 - rho * rho) / ngp) + abs(
        rho * ng - ngp
    ) * math.sqrt(_SQRT_2_OVER_PI * (0.25 / ngp**3 + 3.0 / (32.0 * ngp**5)))
    return _finish("weighted_distance_moment", p, 0.0, value, upper, "quadrature")


def _pre_weighted_unit(p) -> str | None:
    base = _pre_weighted(p)
    if base:
        return base
    if p["norm_gamma_prime"] < 1.0:
        return "simplified form requires norm_gamma_prime >= 1"
    return None


def _chk_weighted_distance_unit(p, draws, rng) -> BoundReport:
    ng, ngp, rho = p["norm_gamma"], p["norm_gamma_prime"], p["rho"]
    value = _weighted_distance_value(ng, ngp, rho)
    upper = ng * math.sqrt(_INV_SQRT_2PI * (1.0 - rho * rho) / ngp) + math.sqrt(
        11.0 / 32.0 * _SQRT_2_OVER_PI
    ) * abs(rho * ng - ngp) / ngp**1.5
    return _finish("weighted_distance_moment_unit", p, 0.0, value, upper, "quadrature")


def _pre_curvature(p) -> str | None:
    if p["kappa"] <= _CURVATURE_SCALE:
        return f"kappa must exceed sqrt(3 + sqrt(33/2)) ~ {_CURVATURE_SCALE:.4f}"
    if p["tau_bar"] < p["kappa"]:
        return "tau_bar must be at least kappa"
    return None


def _chk_curvature(p, draws, rng) -> BoundReport:
    tau_bar, kappa = p["tau_bar"], p["kappa"]

    def f(t: np.ndarray) -> np.ndarray:
        # z^2 e^{s}/(1+e^{s})^2 with s = tau_bar*t, via paired sigmoids
        s = tau_bar * t
        return t * t * np.exp(-np.logaddexp(0.0, s) - np.logaddexp(0.0, -s))

    value = expect_abs_adaptive(f, scale=1.0 / max(tau_bar, 1.0))
    lower = (
        (1.0 / math.sqrt(8.0 * math.pi))
        * (2.0 - 12.0 / kappa**2 - 15.0 / kappa**4)
        / tau_bar**3
    )
    return _finish("curvature_lower", p, lower, value, math.inf, "quadrature")


def _pre_softplus_gap(p) -> str | None:
    if p["k"] <= 1:
        return "k must exceed 1"
    if p["tau"] <= 0:
        return "tau must be positive"
    return None


def _chk_softplus_gap(p, draws, rng) -> BoundReport:
    tau, k = p["tau"], p["k"]
    value = expect_abs_adaptive(
        _softplus_gap_integrand(tau, k), scale=1.0 / max(k * tau, 1.0)
    )
    lower = _INV_SQRT_2PI * (k - 1.0) / (k * k * tau) * (1.0 - 3.0 / tau**2)
    upper = _SQRT_2_OVER_PI * (k - 1.0) / tau
    return _finish("softplus_gap", p, lower, value, upper, "quadrature")


def _pre_softplus_gap_scaled(p) -> str | None:
    base = _pre_softplus_gap(p)
    if base:
        return base
    if p["tau"] > p["l"]:
        return "scaled form requires tau <= l"
    return None


def _chk_softplus_gap_scaled(p, draws, rng) -> BoundReport:
    tau, k, l = p["tau"], p["k"], p["l"]
    value = expect_abs_adaptive(
        _softplus_gap_integrand(tau, k), scale=1.0 / max(k * tau, 1.0)
    )
    kl2 = (k * l) ** 2
    lower = _INV_SQRT_2PI * tau * (k - 1.0) / kl2 * (1.0 - 3.0 / kl2)
    upper = tau * (k - 1.0) * _INV_SQRT_2PI
    return _finish("softplus_gap_scaled", p, lower, value, upper, "quadrature")


def _chk_softplus_gap_second_moment(p, draws, rng) -> BoundReport:
    tau, k, l = p["tau"], p["k"], p["l"]
    f = _softplus_gap_integrand(tau, k)
    value = expect_abs_adaptive(
        lambda t: f(t) ** 2, scale=1.0 / max(k * tau, 1.0)
    )
    upper = (k - 1.0) ** 2 * min(
        math.sqrt(1.0 / (32.0 * math.pi)) * (2.0 / tau + 3.0 / (4.0 * tau**3)),
        tau * tau / 4.0,
    )
    # The mean-value point of the gap sits anywhere in [tau, k*tau], so the
    # exponential envelope controlling the lower bound runs at scale k*l.
    kl = k * l
    lower = (
        tau * tau * (k - 1.0) ** 2 / math.sqrt(128.0 * math.pi)
        * (1.0 / kl**3 - 1.5 / kl**5 - 15.0 / (32.0 * kl**7))
    )
    return _finish("softplus_gap_second_moment", p, lower, value, upper, "quadrature")


def _pre_direction_swap(p) -> str | None:
    if p["tau"] < 1.0:
        return "requires tau >= 1"
    if not 0.0 < p["dist"] <= 2.0:
        return "dist must lie in (0, 2]"
    return None


def _chk_direction_swap(p, draws, rng) -> BoundReport:
    tau, dist = p["tau"], p["dist"]
    rho = 1.0 - dist * dist / 2.0
    s = math.sqrt(max(0.0, 1.0 - rho * rho))

    def draw(r, size):
        z1 = r.standard_normal(size)
        z2 = r.standard_normal(size)
        u = np.abs(z1)
        v = np.abs(rho * z1 + s * z2)
        g = np.logaddexp(0.0, -tau * u) - np.logaddexp(0.0, -tau * v)
        return g * g

    value, stderr = _mc_mean(draw, draws, rng)
    upper = (
        2.0
        * dist
        * dist
        * (math.sqrt(tau * _INV_SQRT_2PI) + math.sqrt(11.0 / 8.0 * _SQRT_2_OVER_PI / tau)) ** 2
    )
    return _finish(
        "direction_swap_second_moment", p, 0.0, value, upper, "monte_carlo", stderr
    )


def _pre_label_flip(p) -> str | None:
    if int(p["m"]) != p["m"] or p["m"] < 1:
        return "m must be a positive integer"
    if p["tau"] <= 0 or p["sigma"] <= 0:
        return "tau and sigma must be positive"
    if abs(p["rho"]) > 1:
        return "rho must lie in [-1, 1]"
    return None


def _chk_label_flip(p, draws, rng) -> BoundReport:
    m, tau, rho, sigma = int(p["m"]), p["tau"], p["rho"], p["sigma"]
    tau_star = sigma_to_tau_star(sigma)
    a = tau * rho - tau_star
    b = tau * math.sqrt(max(0.0, 1.0 - rho * rho))

    def draw(r, size):
        z1 = r.standard_normal(size)
        z2 = r.standard_normal(size)
        eps = r.standard_normal(size)
        flip = np.signbit(z1) != np.signbit(z1 + sigma * eps)
        return (2.0 * flip * np.abs(a * z1 + b * z2)) ** m

    value, stderr = _mc_mean(draw, draws, rng)
    d = math.sqrt(max(0.0, 2.0 - 2.0 * rho))
    upper = (
        sigma
        / (2.0 * math.pi)
        * float(gamma_fn((m + 1) / 2.0))
        * (
            (math.sqrt(32.0) * tau * d) ** m / math.sqrt(math.pi)
            + (math.sqrt(8.0) * math.pi * abs(a) * sigma) ** m
        )
    )
    return _finish("label_flip_cross_moment", p, 0.0, value, upper, "monte_carlo", stderr)


def _pre_sign_flip(p) -> str | None:
    if int(p["m"]) != p["m"] or p["m"] < 0:
        return "m must be a nonnegative integer"
    if abs(p["rho"]) > 1:
        return "rho must lie in [-1, 1]"
    return None


def _chk_sign_flip_moment(p, draws, rng) -> BoundReport:
    """Identity: MC moment against the sine-integral closed form."""
    m, rho = int(p["m"]), p["rho"]
    s = math.sqrt(max(0.0, 1.0 - rho * rho))

    def draw(r, size):
        z1 = r.standard_normal(size)
        z2 = r.standard_normal(size)
        disagree = z1 * (rho * z1 + s * z2) < 0.0
        return np.abs(z1) ** m * disagree

    value, stderr = _mc_mean(draw, draws, rng)
    exact = disagreement_moment(m, rho)
    return _finish("sign_flip_moment", p, exact, value, exact, "monte_carlo", stderr)


def _chk_sign_flip_moment_bound(p, draws, rng) -> BoundReport:
    m, rho = int(p["m"]), p["rho"]
    value = disagreement_moment(m, rho)
    d = math.sqrt(max(0.0, 2.0 - 2.0 * rho))
    upper = (
        1.0
        / (math.sqrt(2.0) * math.pi)
        * float(gamma_fn(m / 2.0 + 1.0))
        / (m + 1.0)
        * (math.pi * d / math.sqrt(2.0)) ** (m + 1)
    )
    return _finish("sign_flip_moment_bound", p, 0.0, value, upper, "quadrature")


def _pre_wrong_label_unbounded(p) -> str | None:
    if abs(p["rho"]) > 1:
        return "rho must lie in [-1, 1]"
    if p["sigma"] < 0:
        return "sigma must be nonnegative"
    return None


def _chk_wrong_label_unbounded(p, draws, rng) -> BoundReport:
    """Identity: E[|x'b| ; y x'b < 0] = (1 - rho/sqrt(1+sigma^2)) / sqrt(2*pi)."""
    rho, sigma = p["rho"], p["sigma"]
    s = math.sqrt(max(0.0, 1.0 - rho * rho))

    def draw(r, size):
        z1 = r.standard_normal(size)  # component along the true direction
        z2 = r.standard_normal(size)
        eps = r.standard_normal(size)
        xb = rho * z1 + s * z2
        y = np.where(z1 + sigma * eps >= 0.0, 1.0, -1.0)
        return np.abs(xb) * (y * xb < 0.0)

    value, stderr = _mc_mean(draw, draws, rng)
    exact = _INV_SQRT_2PI * (1.0 - rho / math.sqrt(1.0 + sigma * sigma))
    return _finish("wrong_label_unbounded", p, exact, value, exact, "monte_carlo", stderr)


_REGISTRY: dict[str, _Entry] = {
    e.lemma_id: e
    for e in [
        _Entry("exp_moment", ("tau",), _chk_exp_moment, _pre_exp_moment),
        _Entry("link_moment", ("tau",), _chk_link_moment, _pre_exp_moment),
        _Entry("square_exp_moment", ("tau",), _chk_square_exp_moment, _pre_exp_moment),
        _Entry(
            "weighted_distance_moment",
            ("norm_gamma", "norm_gamma_prime", "rho"),
            _chk_weighted_distance,
            _pre_weighted,
        ),
        _Entry(
            "weighted_distance_moment_unit",
            ("norm_gamma", "norm_gamma_prime", "rho"),
            _chk_weighted_distance_unit,
            _pre_weighted_unit,
        ),
        _Entry("curvature_lower", ("tau_bar", "kappa"), _chk_curvature, _pre_curvature),
        _Entry("softplus_gap", ("tau", "k"), _chk_softplus_gap, _pre_softplus_gap),
        _Entry(
            "softplus_gap_scaled",
            ("tau", "k", "l"),
            _chk_softplus_gap_scaled,
            _pre_softplus_gap_scaled,
        ),
        _Entry(
            "softplus_gap_second_moment",
            ("tau", "k", "l"),
            _chk_softplus_gap_second_moment,
            _pre_softplus_gap_scaled,
        ),
        _Entry(
            "direction_swap_second_moment",
            ("tau", "dist"),
            _chk_direction_swap,
            _pre_direction_swap,
            uses_mc=True,
        ),
        _Entry(
            "label_flip_cross_moment",
            ("m", "tau", "rho", "sigma"),
            _chk_label_flip,
            _pre_label_flip,
            uses_mc=True,
        ),
        _Entry(
            "sign_flip_moment",
            ("m", "rho"),
            _chk_sign_flip_moment,
            _pre_sign_flip,
            uses_mc=True,
        ),
        _Entry(
            "sign_flip_moment_bound",
            ("m", "rho"),
            _chk_sign_flip_moment_bound,
            _pre_sign_flip,
        ),
        _Entry(
            "wrong_label_unbounded",
            ("rho", "sigma"),
            _chk_wrong_label_unbounded,
            _pre_wrong_label_unbounded,
            uses_mc=True,
        ),
    ]
}


def lemma_ids() -> list[str]:
    """All registered check identifiers."""
    return sorted(_REGISTRY)


def check_bounds(
    grid: Iterable, mc_draws: int = 10_000_000, master_seed: int = 20_240_801
) -> list[BoundReport]:
    """Run every (lemma_id, params) point of ``grid`` and report the results.

    ``grid`` items are either ``{"lemma_id": ..., "params": {...}}`` mappings
    or ``(lemma_id, params)`` pairs.  Monte Carlo entries draw
    ``mc_draws`` samples from a stream derived from ``master_seed`` and the
    point's position in the grid, so results are reproducible and
    independent of evaluation order.
    """
    reports = []
    for index, item in enumerate(grid):
        if isinstance(item, dict):
            lemma_id, params = item["lemma_id"], dict(item["params"])
        else:
            lemma_id, params = item[0], dict(item[1])
        entry = _REGISTRY.get(lemma_id)
        if entry is None:
            raise ValueError(f"unknown lemma_id {lemma_id!r}; known: {lemma_ids()}")
        missing = [k for k in entry.required if k not in params]
        if missing:
            raise ValueError(f"{lemma_id}: missing parameters {missing}")
        reason = entry.precondition(params)
        if reason is not None:
            reports.append(_skip(lemma_id, params, reason))
            continue
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,)))
        )
        reports.append(entry.check(params, mc_draws, rng))
    return reports


def default_grid() -> list[tuple[str, dict]]:
    """In-precondition parameter points covering the inequality catalogue."""
    grid: list[tuple[str, dict]] = []
    for tau in (0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 30.0):
        grid.append(("exp_moment", {"tau": tau}))
    for tau in (0.5, 2.0, 3.0, 5.0, 10.0, 30.0):
        grid.append(("link_moment", {"tau": tau}))
    for tau in (2.0, 3.0, 5.0, 10.0):
        grid.append(("square_exp_moment", {"tau": tau}))
    weighted_points = [
        (1.0, 1.0, 0.9),
        (2.0, 1.5, 0.5),
        (0.5, 2.0, -0.3),
        (3.0, 3.0, 0.99),
        (5.0, 2.0, 0.0),
        (1.5, 0.5, 0.7),
    ]
    for ng, ngp, rho in weighted_points:
        grid.append(
            ("weighted_distance_moment", {"norm_gamma": ng, "norm_gamma_prime": ngp, "rho": rho})
        )
        if ngp >= 1.0:
            grid.append(
                (
                    "weighted_distance_moment_unit",
                    {"norm_gamma": ng, "norm_gamma_prime": ngp, "rho": rho},
                )
            )
    kappa0 = math.sqrt(6.0 + math.sqrt(51.0))
    for tau_bar, kappa in ((kappa0, kappa0), (4.0, 3.0), (5.0, 4.0), (10.0, 5.0), (8.0, 8.0)):
        grid.append(("curvature_lower", {"tau_bar": tau_bar, "kappa": kappa}))
    for tau, k in ((0.5, 2.0), (2.0, 1.5), (3.0, 2.0), (5.0, 4.0), (10.0, 1.2)):
        grid.append(("softplus_gap", {"tau": tau, "k": k}))
    for tau, k, l in ((0.5, 2.0, 1.0), (1.0, 3.0, 2.0), (2.0, 1.5, 2.0), (3.0, 2.0, 5.0)):
        grid.append(("softplus_gap_scaled", {"tau": tau, "k": k, "l": l}))
    for tau, k, l in (
        (1.0, 2.0, 1.0),
        (2.0, 1.5, 2.0),
        (3.0, 2.0, 3.0),
        (3.0, 2.0, 4.0),
        (5.0, 3.0, 5.0),
    ):
        grid.append(("softplus_gap_second_moment", {"tau": tau, "k": k, "l": l}))
    for tau, dist in ((1.0, 0.5), (2.0, 1.0), (3.0, 0.2), (5.0, 1.5), (10.0, 2.0)):
        grid.append(("direction_swap_second_moment", {"tau": tau, "dist": dist}))
    for m, tau, rho, sigma in (
        (1, 3.0, 0.8, 0.5),
        (2, 5.0, 0.9, 0.3),
        (2, 2.0, 0.5, 0.5),
        (1, 6.0, 0.95, 0.25),
        (3, 4.0, 0.9, 0.4),
        (2, 2.0, 0.8, 0.85),
    ):
        grid.append(
            ("label_flip_cross_moment", {"m": m, "tau": tau, "rho": rho, "sigma": sigma})
        )
    return grid


def identity_grid() -> list[tuple[str, dict]]:
    """Closed-form identity spot checks (Monte Carlo against exact values)."""
    grid: list[tuple[str, dict]] = []
    for m, rho in ((1, 0.7), (1, -0.4), (2, 0.5), (3, 0.9)):
        grid.append(("sign_flip_moment", {"m": m, "rho": rho}))
    for m, rho in ((2, 0.5), (3, 0.7), (4, -0.2)):
        grid.append(("sign_flip_moment_bound", {"m": m, "rho": rho}))
    for rho, sigma in ((1.0, 1.0), (0.8, 0.5), (0.3, 0.2)):
        grid.append(("wrong_label_unbounded", {"rho": rho, "sigma": sigma}))
    return grid


BOUND_REPORT_COLUMNS = ["lemma_id", "param_json", "lower", "value", "upper", "method", "holds"]


def write_bound_reports(reports: Iterable[BoundReport], fh) -> None:
    """Write reports as CSV with the stable column set (see module docs)."""
    fh.write(",".join(BOUND_REPORT_COLUMNS) + "\n")
    for r in reports:
        holds = "" if r.holds is None else str(r.holds).lower()
        row = [
            r.lemma_id,
            json.dumps(r.params, sort_keys=True).replace(",", ";"),
            repr(r.lower),
            repr(r.value),
            repr(r.upper),
            r.method,
            holds,
        ]
        fh.write(",".join(row) + "\n")
