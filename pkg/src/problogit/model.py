"""Probit data generation and exact population-level oracles.

Labels follow ``y = sign(x'beta_star + sigma*eps)`` with standard Gaussian
``x`` and ``eps``.  Because the covariates are Gaussian, the population
logistic risk of any ``gamma = tau*beta`` has the closed split

    risk(tau, beta) = E[log(1 + exp(-tau|z|))]
                      + tau * (1 - beta'beta_star/sqrt(1+sigma^2)) / sqrt(2*pi)

(one half-line quadrature plus a closed form), which makes exact risk,
gradient and Hessian values available as oracles against which both the
sample estimator and the concentration claims can be tested.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundReport, _finish, _skip
from .quadrature import expect_abs_adaptive, sigma_to_tau_star
from .validation import as_labels, as_matrix, as_unit_vector, check_positive

__all__ = [
    "ModelSpec",
    "Dataset",
    "SeedSpec",
    "sample",
    "population_unbounded_mean",
    "population_excess_unbounded",
    "population_risk",
    "population_risk_h",
    "population_hessian",
    "margin_check",
    "CURVATURE_THRESHOLD",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

#: below this length scale the population curvature lower bound
#: ``sqrt(1/(8*pi)) / tau^3`` is not available
CURVATURE_THRESHOLD = math.sqrt(6.0 + math.sqrt(51.0))


@dataclass(frozen=True)
class ModelSpec:
    """Data-generating triple: dimension, noise-to-signal ratio, direction."""

    p: int
    sigma: float
    beta_star: np.ndarray

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        check_positive(self.sigma, "sigma")
        object.__setattr__(
            self, "beta_star", as_unit_vector(self.beta_star, "beta_star")
        )
        if self.beta_star.shape[0] != self.p:
            raise ValueError("beta_star must have length p")

    @classmethod
    def along_first_axis(cls, p: int, sigma: float) -> "ModelSpec":
        beta = np.zeros(p)
        beta[0] = 1.0
        return cls(p=p, sigma=sigma, beta_star=beta)


@dataclass
class Dataset:
    """Covariate rows plus -1/+1 labels."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = as_matrix(self.X, "X")
        self.y = as_labels(self.y, self.X.shape[0], "y")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def to_csv(self, path) -> None:
        """Write ``x1,...,xp,y`` rows at full double precision."""
        with open(path, "w", encoding="utf-8") as fh:
            self.write_csv(fh)

    def write_csv(self, fh: io.TextIOBase) -> None:
        header = ",".join(f"x{j + 1}" for j in range(self.p)) + ",y"
        fh.write(header + "\n")
        for row, label in zip(self.X, self.y):
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write(f",{int(label)}\n")

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if header[-1] != "y" or not all(
                c == f"x{j + 1}" for j, c in enumerate(header[:-1])
            ):
                raise ValueError(f"unexpected dataset header {header}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        return cls(X=data[:, :-1], y=data[:, -1])


@dataclass(frozen=True)
class SeedSpec:
    """Root of the reproducible stream tree.

    A stream for (cell, replicate) is a Philox generator keyed by
    ``SeedSequence(master_seed, spawn_key=(cell_index, replicate_index))``;
    the derivation is a pure hash, so identical requests give bit-identical
    streams regardless of creation order or threading.
    """

    master_seed: int

    def rng(self, cell_index: int = 0, replicate_index: int = 0) -> np.random.Generator:
        seq = np.random.SeedSequence(
            self.master_seed, spawn_key=(cell_index, replicate_index)
        )
        return np.random.Generator(np.random.Philox(seq))

    def stream_id(self, cell_index: int = 0, replicate_index: int = 0) -> int:
        """Stable 64-bit identifier of the derived stream (for reports)."""
        seq = np.random.SeedSequence(
            self.master_seed, spawn_key=(cell_index, replicate_index)
        )
        return int(seq.generate_state(1, np.uint64)[0])


def sample(spec: ModelSpec, n: int, rng: np.random.Generator) -> Dataset:
    """Draw ``n`` covariate rows and probit labels from ``spec``.

    A zero noisy margin (a probability-zero event) maps to the label +1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    X = rng.standard_normal((n, spec.p))
    eps = rng.standard_normal(n)
    margins = np.einsum("ij,j->i", X, spec.beta_star) + spec.sigma * eps
    y = np.where(margins >= 0.0, 1.0, -1.0)
    return Dataset(X=X, y=y)


def population_unbounded_mean(beta, spec: ModelSpec) -> float:
    """Exact ``E[|x'beta| ; y x'beta < 0]`` for a unit direction ``beta``."""
    beta = as_unit_vector(beta, "beta")
    rho = float(np.dot(beta, spec.beta_star))
    return _INV_SQRT_2PI * (1.0 - rho / math.sqrt(1.0 + spec.sigma**2))


def population_excess_unbounded(beta, spec: ModelSpec) -> float:
    """Excess of the unbounded-term mean over its value at the true direction.

    Closed form ``|beta - beta_star|^2 / sqrt(8*pi*(1+sigma^2))``.
    """
    beta = as_unit_vector(beta, "beta")
    d2 = float(np.dot(beta - spec.beta_star, beta - spec.beta_star))
    return d2 / math.sqrt(8.0 * math.pi * (1.0 + spec.sigma**2))


def _softplus_abs_mean(tau: float) -> float:
    """E[log(1 + exp(-tau*|z|))] by half-line quadrature."""
    return expect_abs_adaptive(
        lambda t: np.logaddexp(0.0, -tau * t), scale=1.0 / max(tau, 1.0)
    )


def population_risk(tau: float, beta, spec: ModelSpec) -> float:
    """Exact population logistic risk of ``gamma = tau * beta``."""
    check_positive(tau, "tau")
    return _softplus_abs_mean(tau) + tau * population_unbounded_mean(beta, spec)


def population_risk_h(tau: float, h, spec: ModelSpec) -> float:
    """Population risk in (length, tangent) coordinates on the positive hemisphere.

    Only ``beta'beta_star = sqrt(1 - |h|^2)`` enters, so no explicit frame
    is needed.
    """
    check_positive(tau, "tau")
    h = np.asarray(h, dtype=np.float64)
    hn2 = float(np.dot(h, h))
    if hn2 >= 1.0:
        raise ValueError("h must have norm strictly below 1")
    rho = math.sqrt(1.0 - hn2)
    unbounded = _INV_SQRT_2PI * (1.0 - rho / math.sqrt(1.0 + spec.sigma**2))
    return _softplus_abs_mean(tau) + tau * unbounded


def _curvature(tau: float) -> float:
    """E[z^2 / (exp(tau|z|/2) + exp(-tau|z|/2))^2], the length curvature."""

    def f(t: np.ndarray) -> np.ndarray:
        s = tau * t
        return t * t * np.exp(-np.logaddexp(0.0, s) - np.logaddexp(0.0, -s))

    return expect_abs_adaptive(f, scale=1.0 / max(tau, 1.0))


def population_hessian(tau: float, h, spec: ModelSpec) -> np.ndarray:
    """Hessian of the population risk in (length, tangent) coordinates.

    Block structure: the scalar length-curvature (by quadrature), the
    coupling ``h / (sqrt(2*pi*(1+sigma^2)) * sqrt(1-|h|^2))`` (positive:
    growing the length amplifies the direction penalty), and the direction
    block
    ``tau/(sqrt(2*pi*(1+sigma^2))*sqrt(1-|h|^2)) * (I + h h'/(1-|h|^2))``.
    Matches central finite differences of ``population_risk_h``.
    """
    check_positive(tau, "tau")
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 1:
        raise ValueError("h must be a 1-D array")
    hn2 = float(np.dot(h, h))
    if hn2 >= 1.0:
        raise ValueError("h must have norm strictly below 1")
    q = h.shape[0]
    root = math.sqrt(1.0 - hn2)
    c = 1.0 / (math.sqrt(2.0 * math.pi * (1.0 + spec.sigma**2)) * root)
    H = np.empty((q + 1, q + 1))
    H[0, 0] = _curvature(tau)
    H[0, 1:] = c * h
    H[1:, 0] = c * h
    H[1:, 1:] = tau * c * (np.eye(q) + np.outer(h, h) / (1.0 - hn2))
    return H


def margin_check(
    spec: ModelSpec,
    kappa_tau: float,
    sample_count: int,
    rng: np.random.Generator,
) -> list[BoundReport]:
    """Verify the excess-risk margin lower bound on random in-band points.

    Each sampled pair ``(tau, beta)`` with ``|tau - tau_star| <=
    kappa_tau*tau_star``, ``tau`` above the curvature threshold and
    ``beta'beta_star > 0`` must satisfy

        risk(tau, beta) - risk(tau_star, beta_star)
            >= (1/sqrt(32*pi)) * min((1+kappa_tau)^-3,
                                     (1-3*kappa_tau)/sqrt(1+sigma^2)) * d_star^2.

    Out-of-band samples are skipped with a reason, never asserted.
    """
    from .geometry import StarGeometry

    lemma_id = "excess_risk_margin"
    tau_star = sigma_to_tau_star(spec.sigma)
    reports: list[BoundReport] = []

    if not 0.0 < kappa_tau < 1.0 / 3.0:
        reason = f"kappa_tau must lie in (0, 1/3), got {kappa_tau!r}"
        return [_skip(lemma_id, {"kappa_tau": kappa_tau}, reason) for _ in range(sample_count)]
    if tau_star < CURVATURE_THRESHOLD:
        reason = (
            f"tau_star={tau_star:.4f} is below the curvature threshold "
            f"{CURVATURE_THRESHOLD:.4f}"
        )
        return [_skip(lemma_id, {"kappa_tau": kappa_tau}, reason) for _ in range(sample_count)]

    geom = StarGeometry(tau_star)
    factor = (1.0 / math.sqrt(32.0 * math.pi)) * min(
        (1.0 + kappa_tau) ** -3.0,
        (1.0 - 3.0 * kappa_tau) / math.sqrt(1.0 + spec.sigma**2),
    )
    base_risk = population_risk(tau_star, spec.beta_star, spec)

    for _ in range(sample_count):
        tau = tau_star * (1.0 + kappa_tau * (2.0 * rng.random() - 1.0))
        beta = rng.standard_normal(spec.p)
        beta /= np.linalg.norm(beta)
        if float(np.dot(beta, spec.beta_star)) < 0.0:
            beta = -beta
        params = {
            "tau": tau,
            "dist": float(np.linalg.norm(beta - spec.beta_star)),
            "kappa_tau": kappa_tau,
        }
        if tau < CURVATURE_THRESHOLD:
            reports.append(
                _skip(lemma_id, params, f"sampled tau={tau:.4f} below curvature threshold")
            )
            continue
        if float(np.dot(beta, spec.beta_star)) <= 0.0:
            reports.append(_skip(lemma_id, params, "beta is not in the open hemisphere"))
            continue
        excess = population_risk(tau, beta, spec) - base_risk
        lower = factor * geom.d_star(spec.beta_star, tau * beta) ** 2
        reports.append(
            _finish(lemma_id, params, lower, excess, math.inf, "quadrature")
        )
    return reports
